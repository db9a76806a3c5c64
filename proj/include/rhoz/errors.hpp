#pragma once

#include <stdexcept>
#include <string>

namespace rhoz {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument values: probabilities outside [0,1], |rho| >= 1, bad
/// distribution parameters.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Structurally invalid configuration: degree above cap, quadrature size out
/// of range.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A marginal quantile failed to evaluate (non-finite value at a node).
class MarginalError : public Error {
public:
    using Error::Error;
};

/// The requested rho_x lies outside the attainable range of the pair.
/// Carries the attainable [lo, hi] interval for reporting.
class InfeasibleTargetError : public Error {
public:
    InfeasibleTargetError(const std::string& what, double lo, double hi)
        : Error(what), feasible_lo(lo), feasible_hi(hi) {}

    double feasible_lo;
    double feasible_hi;
};

}  // namespace rhoz
