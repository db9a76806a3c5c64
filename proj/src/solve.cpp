#include "rhoz/solve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rhoz/errors.hpp"

namespace rhoz {

namespace {

constexpr double kBracketEnd = 1.0 - 1e-9;

// Outermost grid points (step 0.01) at which the link is still increasing
// moving outward from 0. Truncation wiggle past these points is ignored.
std::pair<double, double> monotone_bracket(const LinkPolynomial& p) {
    double pos = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double r = std::min(i / 100.0, kBracketEnd);
        if (derivative(p, r) <= 0.0) break;
        pos = r;
    }
    double neg = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double r = std::max(-i / 100.0, -kBracketEnd);
        if (derivative(p, r) <= 0.0) break;
        neg = r;
    }
    return {neg, pos};
}

}  // namespace

std::pair<double, double> feasible_range(const LinkPolynomial& p) {
    const auto [neg, pos] = monotone_bracket(p);
    const double lo = std::clamp(evaluate(p, neg), -1.0, 1.0);
    const double hi = std::clamp(evaluate(p, pos), -1.0, 1.0);
    return {lo, hi};
}

SolveReport solve_rho_z(const LinkPolynomial& p, double rho_x, double tol) {
    if (std::isnan(rho_x) || std::fabs(rho_x) > 1.0)
        throw DomainError("solve_rho_z: rho_x must lie in [-1, 1]");

    SolveReport report;
    report.method = SolveMethod::PolynomialInvert;
    report.warnings = p.meta.warnings;
    report.feasible_range = feasible_range(p);

    if (rho_x == 0.0) {
        report.rho_z = 0.0;
        report.residual = std::fabs(p.b[0]);
        return report;
    }

    const auto [neg, pos] = monotone_bracket(p);
    double lo = rho_x > 0.0 ? 0.0 : neg;
    double hi = rho_x > 0.0 ? pos : 0.0;
    double f_lo = evaluate(p, lo) - rho_x;
    double f_hi = evaluate(p, hi) - rho_x;

    if (f_lo * f_hi > 0.0) {
        std::ostringstream os;
        os << "solve_rho_z: rho_x = " << rho_x << " outside the attainable range ["
           << report.feasible_range.first << ", " << report.feasible_range.second << "]";
        throw InfeasibleTargetError(os.str(), report.feasible_range.first,
                                    report.feasible_range.second);
    }

    // Bisection with secant acceleration on the monotone bracket.
    double x = 0.5 * (lo + hi);
    double f_x = evaluate(p, x) - rho_x;
    for (int iter = 0; iter < 200 && std::fabs(f_x) > tol; ++iter) {
        if (f_x * f_lo < 0.0) {
            hi = x;
            f_hi = f_x;
        } else {
            lo = x;
            f_lo = f_x;
        }
        double next = x;
        if (f_hi != f_lo) next = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) next = 0.5 * (lo + hi);
        if (next == x) break;  // bracket exhausted at machine precision
        x = next;
        f_x = evaluate(p, x) - rho_x;
    }

    report.rho_z = x == 0.0 ? 0.0 : x;  // normalize -0.0
    report.residual = std::fabs(f_x);
    return report;
}

}  // namespace rhoz
