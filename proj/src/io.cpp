#include "atorsion/io.hpp"

#include "atorsion/error.hpp"

#include <fstream>
#include <sstream>

namespace atorsion::io {

namespace {

template <typename T>
T required(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::InputError, std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InputError, std::string("bad field '") + key + "': " + e.what());
    }
}

template <typename T>
T optional_field(const Json& j, const char* key, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InputError, std::string("bad field '") + key + "': " + e.what());
    }
}

Json component_to_json(const spectra::ModelComponent& c) {
    Json out;
    out["K"] = c.cutoff;
    if (const auto* circle = std::get_if<spectra::CircleModel>(&c.shape)) {
        out["kind"] = "circle";
        out["params"] = {{"L", circle->length}, {"alpha", circle->twist}};
    } else {
        const auto& torus = std::get<spectra::TorusModel>(c.shape);
        out["kind"] = "torus";
        out["params"] = {{"lengths", torus.lengths}, {"alphas", torus.twists}, {"p", torus.degree}};
    }
    return out;
}

spectra::ModelComponent component_from_json(const Json& j) {
    const auto kind = required<std::string>(j, "kind");
    const int K = required<int>(j, "K");
    const Json params = j.contains("params") ? j.at("params") : Json::object();
    if (kind == "circle") {
        return {spectra::CircleModel{required<double>(params, "L"), optional_field<double>(params, "alpha", 0.0)}, K};
    }
    if (kind == "torus") {
        const auto lengths = required<std::vector<double>>(params, "lengths");
        const auto alphas = optional_field<std::vector<double>>(params, "alphas", std::vector<double>(lengths.size(), 0.0));
        return {spectra::TorusModel{lengths, alphas, optional_field<int>(params, "p", 0)}, K};
    }
    throw Error(ErrorCode::InputError, "unknown model kind '" + kind + "'");
}

spectra::Spectrum generate(const spectra::ModelComponent& c) {
    if (const auto* circle = std::get_if<spectra::CircleModel>(&c.shape)) {
        return spectra::circle_spectrum(circle->length, circle->twist, c.cutoff);
    }
    const auto& torus = std::get<spectra::TorusModel>(c.shape);
    return spectra::torus_form_spectrum(torus.lengths, torus.twists, torus.degree, c.cutoff);
}

}  // namespace

Json to_json(const spectra::Spectrum& spec) {
    Json out;
    out["dim"] = spec.dim();
    out["kernel_dim"] = spec.kernel_dim();
    Json entries = Json::array();
    for (const auto& e : spec.entries()) entries.push_back({e.eigenvalue, e.multiplicity});
    out["entries"] = entries;
    const auto& cutoff = spec.cutoff();
    if (cutoff.kind == "union") {
        Json comps = Json::array();
        for (const auto& c : cutoff.components) comps.push_back(component_to_json(c));
        out["cutoff"] = {{"kind", "union"}, {"components", comps}};
    } else if (cutoff.has_model()) {
        out["cutoff"] = component_to_json(cutoff.components.front());
    } else {
        out["cutoff"] = {{"kind", "explicit"}};
    }
    return out;
}

spectra::Spectrum spectrum_from_json(const Json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InputError, "spectrum must be a JSON object");
    const Json cutoff = j.contains("cutoff") ? j.at("cutoff") : Json{{"kind", "explicit"}};
    const auto kind = optional_field<std::string>(cutoff, "kind", "explicit");

    std::vector<spectra::ModelComponent> components;
    if (kind == "union") {
        for (const auto& c : required<Json>(cutoff, "components")) components.push_back(component_from_json(c));
        if (components.empty()) throw Error(ErrorCode::InputError, "union needs components");
    } else if (kind != "explicit") {
        components.push_back(component_from_json(cutoff));
    }

    if (!j.contains("entries")) {
        if (components.empty()) throw Error(ErrorCode::InputError, "explicit spectrum needs entries");
        spectra::Spectrum out = generate(components.front());
        for (std::size_t i = 1; i < components.size(); ++i) out = spectra::disjoint_union(out, generate(components[i]));
        return out;
    }

    std::vector<spectra::SpectrumEntry> entries;
    for (const auto& e : j.at("entries")) {
        if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::InputError, "entries must be [eigenvalue, multiplicity] pairs");
        try {
            entries.push_back({e[0].get<double>(), e[1].get<std::uint64_t>()});
        } catch (const Json::exception& ex) {
            throw Error(ErrorCode::InputError, std::string("bad spectrum entry: ") + ex.what());
        }
    }
    spectra::Cutoff meta;
    meta.kind = kind;
    meta.components = components;
    spectra::Spectrum out(std::move(entries), optional_field<int>(j, "dim", 1), std::move(meta));
    if (j.contains("kernel_dim") && required<std::uint64_t>(j, "kernel_dim") != out.kernel_dim()) {
        throw Error(ErrorCode::InputError, "kernel_dim does not match the zero eigenvalue multiplicity");
    }
    return out;
}

Json to_json(const congruence::ValuationCertificate& cert) {
    Json rows = Json::array();
    for (const auto& r : cert.rows) {
        Json val = r.val.is_infinite() ? Json("inf") : Json(r.val.value());
        rows.push_back({{"p", r.p}, {"k", r.k}, {"val", val}, {"required", r.required}});
    }
    return {{"n", cert.n}, {"N", cert.level}, {"gamma", cert.gamma.to_strings()}, {"rows", rows}, {"passed", cert.passed}};
}

congruence::ExactMatrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw Error(ErrorCode::InputError, "matrix must be a nonempty array of rows");
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : j) {
        if (!row.is_array()) throw Error(ErrorCode::InputError, "matrix rows must be arrays");
        std::vector<std::string> r;
        for (const auto& v : row) {
            if (v.is_string()) {
                r.push_back(v.get<std::string>());
            } else if (v.is_number_integer()) {
                r.push_back(std::to_string(v.get<long long>()));
            } else {
                throw Error(ErrorCode::InputError, "matrix entries must be integers or \"num/den\" strings");
            }
        }
        rows.push_back(std::move(r));
    }
    return congruence::ExactMatrix::from_strings(rows);
}

torsion::TorsionInput torsion_input_from_json(const Json& j) {
    torsion::TorsionInput in;
    in.dim = required<int>(j, "dim");
    in.lambda = optional_field<double>(j, "lambda", 0.0);
    in.kernel_removed_override = optional_field<bool>(j, "kernel_removed_override", false);
    const Json degrees = required<Json>(j, "per_degree");
    if (!degrees.is_object()) throw Error(ErrorCode::InputError, "per_degree must map degrees to spectra");
    for (const auto& [key, value] : degrees.items()) {
        int p = 0;
        try {
            std::size_t used = 0;
            p = std::stoi(key, &used);
            if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InputError, "degree keys must be integers, got '" + key + "'");
        }
        in.per_degree.emplace(p, spectrum_from_json(value));
    }
    return in;
}

Json to_json(const torsion::TorsionResult& result) {
    Json fd = Json::object();
    Json laurent = Json::object();
    for (const auto& [p, v] : result.zeta_prime) fd[std::to_string(p)] = v;
    for (const auto& [p, v] : result.zeta_prime_laurent) laurent[std::to_string(p)] = v;
    return {{"logT", result.log_t}, {"per_degree_zeta_prime", fd}, {"per_degree_zeta_prime_laurent", laurent}};
}

dance::ErrorBudget budget_from_json(const Json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InputError, "budget must be a JSON object");
    dance::ErrorBudget b;
    b.n = required<int>(j, "n");
    if (j.contains("lambda") && !j.at("lambda").is_null()) b.lambda = required<double>(j, "lambda");
    b.epsilon = optional_field<double>(j, "epsilon", b.epsilon);
    b.C1 = optional_field<double>(j, "C1", b.C1);
    b.C2 = optional_field<double>(j, "C2", b.C2);
    b.C3 = optional_field<double>(j, "C3", b.C3);
    b.C4 = optional_field<double>(j, "C4", b.C4);
    b.Cn = optional_field<double>(j, "Cn", b.Cn);
    b.beta = optional_field<double>(j, "beta", b.beta);
    b.form = dance::e1_form_from_string(optional_field<std::string>(j, "form", "derived"));
    b.validate();
    return b;
}

Json to_json(const dance::ErrorBudget& b) {
    Json out = {{"n", b.n}, {"epsilon", b.epsilon}, {"C1", b.C1}, {"C2", b.C2}, {"C3", b.C3},
                {"C4", b.C4}, {"Cn", b.Cn}, {"beta", b.beta}, {"form", dance::to_string(b.form)}};
    out["lambda"] = b.lambda ? Json(*b.lambda) : Json(nullptr);
    return out;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InputError, "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::InputError, "malformed JSON in '" + path + "': " + e.what());
    }
}

}  // namespace atorsion::io
