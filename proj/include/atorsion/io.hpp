// JSON forms of spectra, certificates, torsion inputs and error budgets.
#pragma once

#include "atorsion/congruence.hpp"
#include "atorsion/dance.hpp"
#include "atorsion/spectra.hpp"
#include "atorsion/torsion.hpp"

#include <json.hpp>

#include <string>

namespace atorsion::io {

using Json = nlohmann::json;

// {dim, kernel_dim, entries: [[eigenvalue, multiplicity], ...],
//  cutoff: {kind, K, params}}; unions carry cutoff.components instead.
Json to_json(const spectra::Spectrum& spec);
// Model spectra without "entries" are regenerated from their parameters.
spectra::Spectrum spectrum_from_json(const Json& j);

// {n, N, gamma: [[num/den strings]], rows: [{p, k, val, required}], passed}
Json to_json(const congruence::ValuationCertificate& cert);
congruence::ExactMatrix matrix_from_json(const Json& j);

// {dim, lambda, kernel_removed_override, per_degree: {"p": spectrum}}
torsion::TorsionInput torsion_input_from_json(const Json& j);
Json to_json(const torsion::TorsionResult& result);

// {n, lambda, epsilon, C1, C2, C3, C4, Cn, beta, form}
dance::ErrorBudget budget_from_json(const Json& j);
Json to_json(const dance::ErrorBudget& budget);

Json read_json_file(const std::string& path);

}  // namespace atorsion::io
