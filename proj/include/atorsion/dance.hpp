/*
 * dance.hpp - balancing the truncation and compactification errors.
 *
 * With T = beta log N and R = Cn log N the three error terms behave like
 *
 *     E0 ~ N^{-lambda (1 - eps) beta},   E1 ~ N^{-(C4 Cn^2 / beta - C2 beta)},   E2 ~ N^{-lambda beta}
 *
 * (times vol), and all of them must beat N^{-(n-1)}.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace atorsion::dance {

// How the E1 exponent is formed. Derived: C4 Cn^2 / beta - C2 beta.
// DroppedC2: C4 Cn^2 / beta - beta. LinearCn: C4 Cn / beta - C2 beta.
enum class E1Form { Derived, DroppedC2, LinearCn };

std::string to_string(E1Form form);
E1Form e1_form_from_string(const std::string& name);

struct ErrorBudget {
    int n = 2;
    std::optional<double> lambda;
    double epsilon = 0.01;
    double C1 = 1.0;
    double C2 = 1.0;
    double C3 = 1.0;
    double C4 = 1.0;
    double Cn = 1.0;
    double beta = 1.0;
    E1Form form = E1Form::Derived;

    // Throws InputError unless n >= 2, constants > 0 (C2 >= 0), eps in [0, 1).
    void validate() const;
};

struct ExponentReport {
    double e0 = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double min_exponent = 0.0;
    bool feasible = false;
    // Smallest lambda with lambda (1 - eps) beta >= n - 1 at this beta.
    double lambda_required = 0.0;
};

ExponentReport exponents(const ErrorBudget& budget);

struct BetaChoice {
    double beta_star = 0.0;
    double beta_grid = 0.0;  // argmax of min(e0, e1, e2) on the cross-check grid
    ExponentReport report;
};

// Closed-form maximizer of min(e0, e1, e2) over beta, cross-checked against
// a grid of step 1e-4 (AssertionFailure if they differ by more than 1e-3).
BetaChoice optimize_beta_unchecked(const ErrorBudget& budget);
// As above; throws Infeasible when min_exponent <= n - 1.
BetaChoice optimize_beta(const ErrorBudget& budget);

struct LambdaRequirement {
    double beta_max = 0.0;
    double lambda_min = 0.0;
};

// beta_max solves e1(beta) = n - 1; lambda_min = (1 + delta)(n - 1) / beta_max.
// Depends on C2, C4, Cn and the E1 form only.
LambdaRequirement required_lambda(const ErrorBudget& budget, double delta);

double theorem_rhs(int n, double N, double a, double vol);

// Volume proxy |SL(n, Z/N)| = N^{n^2-1} prod_{p | N} prod_{k=2}^{n} (1 - p^{-k}), as a logarithm.
double log_volume_proxy(int n, std::uint64_t N);

struct BudgetRow {
    std::uint64_t N = 0;
    double T = 0.0;
    double R = 0.0;
    double vol = 0.0;
    double bound_e0 = 0.0;
    double bound_e1 = 0.0;
    double bound_e2 = 0.0;
    double rhs = 0.0;
};

struct BudgetTable {
    double beta = 0.0;
    double a = 0.0;
    // Beyond N1 the summed bounds stay below rhs.
    double N1 = 0.0;
    std::vector<BudgetRow> rows;
};

// Uses budget.beta; vol is the caller's volume or, when empty, the proxy.
// Throws Infeasible when the exponents do not beat n - 1.
BudgetTable budget_table(const ErrorBudget& budget, double a, const std::vector<std::uint64_t>& levels,
                         std::optional<double> vol = std::nullopt);

std::string budget_table_csv(const BudgetTable& table);

}  // namespace atorsion::dance
