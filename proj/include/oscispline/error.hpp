#pragma once

#include <stdexcept>
#include <string>

namespace oscispline {

enum class ErrorKind {
    InvalidArgument,
    NonPositive,
    MissingLimit,
    DomainMismatch,
    NotFinite,
    Divergent,
    KnotsOutOfRange,
    KnotsNotSorted,
    OutOfDomain,
    ZerosTooClose,
    InvalidEnvelope,
    AssumptionsNotVerified,
    PreconditionViolated,
    OutOfRange,
    NoConvergence,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; the kind carries the error category.
/// `residual` is filled by solvers that stop without converging.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, double residual = 0.0)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind), residual_(residual) {}

    ErrorKind kind() const noexcept { return kind_; }
    double residual() const noexcept { return residual_; }

private:
    ErrorKind kind_;
    double residual_;
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::MissingLimit: return "MissingLimit";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::NotFinite: return "NotFinite";
    case ErrorKind::Divergent: return "Divergent";
    case ErrorKind::KnotsOutOfRange: return "KnotsOutOfRange";
    case ErrorKind::KnotsNotSorted: return "KnotsNotSorted";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::ZerosTooClose: return "ZerosTooClose";
    case ErrorKind::InvalidEnvelope: return "InvalidEnvelope";
    case ErrorKind::AssumptionsNotVerified: return "AssumptionsNotVerified";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NoConvergence: return "NoConvergence";
    }
    return "Unknown";
}

}  // namespace oscispline
