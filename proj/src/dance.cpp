#include "atorsion/dance.hpp"

#include "atorsion/congruence.hpp"
#include "atorsion/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace atorsion::dance {

namespace {

constexpr double kGridStep = 1e-4;

struct E1Coefficients {
    double a;  // coefficient of 1/beta
    double b;  // coefficient of beta
};

E1Coefficients e1_coefficients(const ErrorBudget& budget) {
    switch (budget.form) {
        case E1Form::Derived: return {budget.C4 * budget.Cn * budget.Cn, budget.C2};
        case E1Form::DroppedC2: return {budget.C4 * budget.Cn * budget.Cn, 1.0};
        case E1Form::LinearCn: return {budget.C4 * budget.Cn, budget.C2};
    }
    throw Error(ErrorCode::InputError, "unknown E1 form");
}

double require_lambda(const ErrorBudget& budget) {
    if (!budget.lambda) throw Error(ErrorCode::InputError, "lambda must be set");
    if (!(*budget.lambda > 0.0)) throw Error(ErrorCode::InputError, "lambda must be positive");
    return *budget.lambda;
}

double log_sum_exp(const std::vector<double>& logs) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : logs) hi = std::max(hi, v);
    if (!std::isfinite(hi)) return hi;
    double sum = 0.0;
    for (double v : logs) sum += std::exp(v - hi);
    return hi + std::log(sum);
}

}  // namespace

std::string to_string(E1Form form) {
    switch (form) {
        case E1Form::Derived: return "derived";
        case E1Form::DroppedC2: return "dropped-c2";
        case E1Form::LinearCn: return "linear-cn";
    }
    return "unknown";
}

E1Form e1_form_from_string(const std::string& name) {
    if (name == "derived") return E1Form::Derived;
    if (name == "dropped-c2") return E1Form::DroppedC2;
    if (name == "linear-cn") return E1Form::LinearCn;
    throw Error(ErrorCode::InputError, "unknown E1 form '" + name + "'");
}

void ErrorBudget::validate() const {
    if (n < 2) throw Error(ErrorCode::InputError, "n must be >= 2");
    if (!(C1 > 0.0 && C3 > 0.0 && C4 > 0.0 && Cn > 0.0)) {
        throw Error(ErrorCode::InputError, "C1, C3, C4, Cn must be positive");
    }
    if (!(C2 >= 0.0)) throw Error(ErrorCode::InputError, "C2 must be nonnegative");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InputError, "epsilon must lie in [0, 1)");
    if (!(beta > 0.0)) throw Error(ErrorCode::InputError, "beta must be positive");
    if (lambda && !(*lambda > 0.0)) throw Error(ErrorCode::InputError, "lambda must be positive");
}

ExponentReport exponents(const ErrorBudget& budget) {
    budget.validate();
    const double lambda = require_lambda(budget);
    const auto [a, b] = e1_coefficients(budget);
    ExponentReport r;
    r.e0 = lambda * (1.0 - budget.epsilon) * budget.beta;
    r.e1 = a / budget.beta - b * budget.beta;
    r.e2 = lambda * budget.beta;
    r.min_exponent = std::min({r.e0, r.e1, r.e2});
    r.feasible = r.min_exponent > budget.n - 1;
    r.lambda_required = (budget.n - 1) / ((1.0 - budget.epsilon) * budget.beta);
    return r;
}

BetaChoice optimize_beta_unchecked(const ErrorBudget& budget) {
    budget.validate();
    const double lambda = require_lambda(budget);
    const auto [a, b] = e1_coefficients(budget);
    // e1 decreases and e0 <= e2 increase in beta, so the optimum has e0 = e1.
    BetaChoice choice;
    choice.beta_star = std::sqrt(a / (lambda * (1.0 - budget.epsilon) + b));

    ErrorBudget probe = budget;
    const double upper = std::max(10.0, 2.0 * choice.beta_star);
    double best = -std::numeric_limits<double>::infinity();
    const auto steps = static_cast<long>(std::floor(upper / kGridStep));
    for (long k = 1; k <= steps; ++k) {
        probe.beta = static_cast<double>(k) * kGridStep;
        const double m = exponents(probe).min_exponent;
        if (m > best) {
            best = m;
            choice.beta_grid = probe.beta;
        }
    }
    if (std::abs(choice.beta_grid - choice.beta_star) > 1e-3) {
        std::ostringstream msg;
        msg << "closed-form beta " << choice.beta_star << " disagrees with grid argmax " << choice.beta_grid;
        throw Error(ErrorCode::AssertionFailure, msg.str());
    }
    probe.beta = choice.beta_star;
    choice.report = exponents(probe);
    return choice;
}

BetaChoice optimize_beta(const ErrorBudget& budget) {
    BetaChoice choice = optimize_beta_unchecked(budget);
    if (!choice.report.feasible) {
        std::ostringstream msg;
        msg << "best min exponent " << choice.report.min_exponent << " does not exceed n - 1 = " << budget.n - 1;
        throw Error(ErrorCode::Infeasible, msg.str());
    }
    return choice;
}

LambdaRequirement required_lambda(const ErrorBudget& budget, double delta) {
    if (!(delta >= 0.0)) throw Error(ErrorCode::InputError, "delta must be nonnegative");
    ErrorBudget check = budget;
    check.lambda.reset();
    check.validate();
    const auto [a, b] = e1_coefficients(budget);
    const double m = budget.n - 1;
    // Positive root of b beta^2 + m beta - a = 0, in the form that survives b = 0.
    LambdaRequirement r;
    r.beta_max = 2.0 * a / (m + std::sqrt(m * m + 4.0 * a * b));
    r.lambda_min = (1.0 + delta) * m / r.beta_max;
    return r;
}

double theorem_rhs(int n, double N, double a, double vol) {
    if (!(N >= 3.0)) throw Error(ErrorCode::InputError, "N must be >= 3");
    if (!(vol > 0.0)) throw Error(ErrorCode::InputError, "vol must be positive");
    return vol * std::pow(N, -(n - 1.0)) * std::pow(std::log(N), a);
}

double log_volume_proxy(int n, std::uint64_t N) {
    const congruence::Integer count = congruence::sl_count_formula(n, N);
    long exponent = 0;
    const double mantissa = mpz_get_d_2exp(&exponent, count.get_mpz_t());
    return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0);
}

BudgetTable budget_table(const ErrorBudget& budget, double a, const std::vector<std::uint64_t>& levels,
                         std::optional<double> vol) {
    const ExponentReport report = exponents(budget);
    if (!report.feasible) {
        std::ostringstream msg;
        msg << "min exponent " << report.min_exponent << " does not exceed n - 1 = " << budget.n - 1;
        throw Error(ErrorCode::Infeasible, msg.str());
    }
    if (vol && !(*vol > 0.0)) throw Error(ErrorCode::InputError, "vol must be positive");
    const double lambda = *budget.lambda;
    const double beta = budget.beta;
    const double lambda0 = lambda * (1.0 - budget.epsilon);

    // Logs of E0, E1, E2 and rhs without the common volume factor, at x = log N.
    auto log_bounds = [&](double x) {
        const double T = beta * x;
        const double R = budget.Cn * x;
        return std::array<double, 4>{-lambda0 * T, std::log(budget.C3) - budget.C4 * R * R / T + budget.C2 * T,
                                     -lambda * T, -(budget.n - 1.0) * x + a * std::log(x)};
    };

    BudgetTable table;
    table.beta = beta;
    table.a = a;
    for (std::uint64_t N : levels) {
        if (N < 3) throw Error(ErrorCode::InputError, "levels must be >= 3");
        const double x = std::log(static_cast<double>(N));
        const double lv = vol ? std::log(*vol) : log_volume_proxy(budget.n, N);
        const auto lb = log_bounds(x);
        BudgetRow row;
        row.N = N;
        row.T = beta * x;
        row.R = budget.Cn * x;
        row.vol = std::exp(lv);
        row.bound_e0 = std::exp(lb[0] + lv);
        row.bound_e1 = std::exp(lb[1] + lv);
        row.bound_e2 = std::exp(lb[2] + lv);
        row.rhs = std::exp(lb[3] + lv);
        table.rows.push_back(row);
    }

    // Excess decay rates of the three bounds over the target N^{-(n-1)}.
    const double g1 = budget.C4 * budget.Cn * budget.Cn / beta - budget.C2 * beta - (budget.n - 1.0);
    const double g_min = std::min({lambda0 * beta - (budget.n - 1.0), g1});
    if (!(g_min > 0.0)) {
        table.N1 = std::numeric_limits<double>::infinity();
        return table;
    }
    // log(sum / rhs) is decreasing in x once x > -a / g_min.
    auto excess = [&](double x) {
        const auto lb = log_bounds(x);
        return log_sum_exp({lb[0], lb[1], lb[2]}) - lb[3];
    };
    double lo = std::max(std::log(3.0), a < 0.0 ? -a / g_min : 0.0);
    if (excess(lo) <= 0.0) {
        table.N1 = std::ceil(std::exp(lo));
        return table;
    }
    double hi = 2.0 * lo;
    while (excess(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e8) {
            table.N1 = std::numeric_limits<double>::infinity();
            return table;
        }
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    table.N1 = std::ceil(std::exp(hi));
    return table;
}

std::string budget_table_csv(const BudgetTable& table) {
    std::ostringstream out;
    out << "N,T,R,vol,bound_E0,bound_E1,bound_E2,rhs\n";
    char line[512];
    for (const auto& r : table.rows) {
        std::snprintf(line, sizeof line, "%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      static_cast<unsigned long long>(r.N), r.T, r.R, r.vol, r.bound_e0, r.bound_e1, r.bound_e2,
                      r.rhs);
        out << line;
    }
    return out.str();
}

}  // namespace atorsion::dance
