#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rhoz/link.hpp"

namespace rhoz {

enum class SolveMethod { PolynomialInvert, ClosedForm };

struct SolveReport {
    double rho_z = 0.0;
    double residual = 0.0;  // |P(rho_z) - rho_x|
    std::pair<double, double> feasible_range{-1.0, 1.0};
    SolveMethod method = SolveMethod::PolynomialInvert;
    std::vector<std::string> warnings;
};

/// Attainable rho_x interval of the link: the polynomial evaluated at the
/// ends of its monotone bracket, clamped to [-1, 1]. The bracket is trimmed
/// to the outermost 0.01-grid points at which the derivative is still
/// positive, which neutralizes truncation wiggle at the interval edges.
std::pair<double, double> feasible_range(const LinkPolynomial& p);

/// Inverts the link for a target rho_x. rho_x = 0 returns rho_z = 0
/// directly; otherwise a bracketed root search (bisection with secant
/// acceleration) runs on the side of 0 matching the sign of rho_x, so the
/// returned rho_z always satisfies rho_z * rho_x >= 0. Throws
/// InfeasibleTargetError when rho_x is outside the attainable range.
SolveReport solve_rho_z(const LinkPolynomial& p, double rho_x, double tol = 1e-12);

}  // namespace rhoz
