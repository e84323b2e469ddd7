#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace atorsion {

enum class ErrorCode {
    SingularMatrix,
    NotPrime,
    NotCongruent,
    IsUnipotent,
    DetNotUnit,
    BudgetExceeded,
    NonpositiveTime,
    HasKernel,
    UnsupportedModel,
    NonpositiveT,
    DivergentTail,
    QuadratureFailure,
    PoleTooDeep,
    PoleAtOne,
    PoleAtZero,
    NotAcyclic,
    PoleRemains,
    Infeasible,
    InputError,
    AssertionFailure,
};

std::string_view to_string(ErrorCode code);

// Every library failure carries a code so callers (and the CLI exit-code
// mapping) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NotPrime: return "NotPrime";
        case ErrorCode::NotCongruent: return "NotCongruent";
        case ErrorCode::IsUnipotent: return "IsUnipotent";
        case ErrorCode::DetNotUnit: return "DetNotUnit";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::NonpositiveTime: return "NonpositiveTime";
        case ErrorCode::HasKernel: return "HasKernel";
        case ErrorCode::UnsupportedModel: return "UnsupportedModel";
        case ErrorCode::NonpositiveT: return "NonpositiveT";
        case ErrorCode::DivergentTail: return "DivergentTail";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::PoleTooDeep: return "PoleTooDeep";
        case ErrorCode::PoleAtOne: return "PoleAtOne";
        case ErrorCode::PoleAtZero: return "PoleAtZero";
        case ErrorCode::NotAcyclic: return "NotAcyclic";
        case ErrorCode::PoleRemains: return "PoleRemains";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::InputError: return "InputError";
        case ErrorCode::AssertionFailure: return "AssertionFailure";
    }
    return "Unknown";
}

}  // namespace atorsion
