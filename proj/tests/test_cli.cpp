#include "atorsion/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = atorsion::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

json report(const std::vector<std::string>& args) {
    const auto o = run(args);
    REQUIRE(o.code == 0);
    return json::parse(o.out);
}

std::string without_timestamp(const std::string& text) {
    auto j = json::parse(text);
    j.erase("timestamp");
    return j.dump();
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::ofstream(name) << content;
    return name;
}

}  // namespace

TEST_CASE("torsion of the quarter-twisted circle") {
    const auto j = report({"torsion", "--circle", "L=6.2831853", "--alpha", "0.25"});
    CHECK(j.at("command") == "torsion");
    CHECK(j.at("passed") == true);
    CHECK(j.at("logT").get<double>() == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-7));
    CHECK(j.contains("timestamp"));
}

TEST_CASE("exclusion with random conjugators") {
    const auto j = report({"exclusion", "--n", "2", "--N", "10", "--trials", "1000", "--seed", "7"});
    CHECK(j.at("passed") == true);
    CHECK(j.at("trials") == 1000);
    CHECK(j.at("min_distance").get<double>() >= j.at("bound").at("radius").get<double>());
}

TEST_CASE("same seed gives the same report") {
    const std::vector<std::vector<std::string>> commands = {
        {"exclusion", "--n", "3", "--N", "12", "--trials", "200", "--seed", "99"},
        {"distance", "--n", "4", "--trials", "300", "--seed", "5"},
    };
    for (const auto& args : commands) {
        const auto a = run(args);
        const auto b = run(args);
        REQUIRE(a.code == 0);
        REQUIRE(b.code == 0);
        CHECK(without_timestamp(a.out) == without_timestamp(b.out));
    }
    auto other = commands[1];
    other.back() = "6";
    CHECK(without_timestamp(run(other).out) != without_timestamp(run(commands[1]).out));
}

TEST_CASE("input errors exit 2") {
    const auto empty = write_temp("test_cli_empty.json", "{}");
    CHECK(run({"--config", empty}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"integrate"}).code == 2);
    CHECK(run({"zeta", "--s", "2"}).code == 2);
    CHECK(run({"torsion", "--circle", "L=abc"}).code == 2);
    CHECK(run({"heat", "--spectrum", "/nonexistent.json", "--t", "1"}).code == 2);
    CHECK(run({"dance", "--n", "1"}).code == 2);
    const auto e = run({"dance", "--format", "xml"});
    CHECK(e.code == 2);
    const auto bad = write_temp("test_cli_bad.json", R"({"entries": [[1.0]]})");
    const auto r = run({"zeta", "--spectrum", bad, "--s", "2"});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("error: ", 0) == 0);
    std::remove(empty.c_str());
    std::remove(bad.c_str());
}

TEST_CASE("assertion failures exit 1") {
    // lambda far below the requirement: the budget is infeasible.
    CHECK(run({"dance", "--n", "2", "--lambda", "0.01"}).code == 1);
}

TEST_CASE("config files expand into flags") {
    const auto cfg = write_temp("test_cli_config.json",
                                R"({"command": "torsion", "circle": "L=6.283185307179586", "alpha": 0.25})");
    const auto o = run({"--config", cfg});
    CHECK(o.code == 0);
    CHECK(json::parse(o.out).at("logT").get<double>() == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-8));
    std::remove(cfg.c_str());
}

TEST_CASE("every subcommand has a passing selftest") {
    for (const char* cmd : {"distance", "exclusion", "heat", "zeta", "torsion", "dance"}) {
        const auto o = run({cmd, "--selftest", "--seed", "3"});
        CHECK_MESSAGE(o.code == 0, cmd << ": " << o.err);
        CHECK(json::parse(o.out).at("passed") == true);
    }
}

TEST_CASE("csv output and --out") {
    const auto heat = run({"heat", "--circle", "L=6.283185307179586,alpha=0.3", "--tmin", "0.1", "--tmax", "10",
                           "--points", "5", "--format", "csv"});
    REQUIRE(heat.code == 0);
    CHECK(heat.out.rfind("t,value,tail_bound,model_trace\n", 0) == 0);
    CHECK(std::count(heat.out.begin(), heat.out.end(), '\n') == 6);

    const auto zeta = run({"zeta", "--circle", "L=6.283185307179586", "--alpha", "0.5", "--s", "2", "-0.5",
                           "--format", "csv"});
    REQUIRE(zeta.code == 0);
    std::istringstream lines(zeta.out);
    std::string header, first, second;
    std::getline(lines, header);
    std::getline(lines, first);
    std::getline(lines, second);
    CHECK(header == "s,mellin,direct,direct_tail");
    CHECK(second.substr(second.size() - 2) == ",,");

    const auto dance = run({"dance", "--n", "2", "--levels", "10", "100", "--format", "csv"});
    REQUIRE(dance.code == 0);
    CHECK(dance.out.rfind("N,T,R,vol,bound_E0,bound_E1,bound_E2,rhs\n", 0) == 0);

    const std::string path = "test_cli_out.json";
    const auto o = run({"torsion", "--circle", "L=6.283185307179586", "--alpha", "0.25", "--out", path});
    CHECK(o.code == 0);
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(json::parse(text.str()).at("command") == "torsion");
    std::remove(path.c_str());
}
