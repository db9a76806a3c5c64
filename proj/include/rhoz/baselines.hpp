#pragma once

#include <cstdint>

#include "rhoz/marginal.hpp"

namespace rhoz {

/// Work counters for the cost comparison between the polynomial route and
/// the linear-search baselines. Accumulated per call and returned by value;
/// no shared state.
struct EvalCounters {
    long quantile_calls = 0;       // F^{-1}(Phi(.)) evaluations
    long bivariate_cdf_calls = 0;  // finite-argument bivariate CDF evaluations
    long hermite_and_pdf_calls = 0;
};

/// Bisection iterations needed for error bound eps: ceil(1 - log2(eps)).
int bisection_T(double eps);

struct BisectionResult {
    double rho_z = 0.0;
    EvalCounters counters;
};

/// Continuous-pair linear search: evaluates rho_x(rho_z) on an m x m
/// Gauss-Hermite grid via the substitution x_j-argument = rho_z u_i +
/// sqrt(1-rho_z^2) u_j and bisects T times. The outer quantiles are cached,
/// so the counter records exactly T*m^2 + m quantile calls; the feasibility
/// probe at the bracket end is uncounted setup.
BisectionResult bisection_continuous(const Marginal& mi, const Marginal& mj, double rho_x,
                                     int m = 11, double eps = 1e-3);

/// Discrete-pair linear search on the four-corner CDF sum. Counts at most
/// 4*T*Ni*Nj bivariate CDF calls; corners with an infinite coordinate
/// short-circuit to univariate values and are not counted.
BisectionResult bisection_discrete(const Marginal& mi, const Marginal& mj, double rho_x,
                                   double eps = 1e-3);

/// Mixed-pair linear search: m1-point Gauss-Hermite outer integral, m2-point
/// Gauss-Legendre inner integral per finite threshold segment (unbounded end
/// segments truncated at |z| = 8.5, where phi is below 1e-16). Counts
/// T*Ni*m1*m2 quantile calls.
BisectionResult bisection_mixed(const Marginal& mi, const Marginal& mj, double rho_x,
                                int m1 = 11, int m2 = 11, double eps = 1e-3);

struct McEstimate {
    double rho_hat = 0.0;
    long sample_count = 0;
    double std_error = 0.0;
};

/// Monte Carlo check: samples standard normal pairs at correlation rho_z,
/// pushes them through the marginal transforms and returns the sample
/// Pearson correlation. Deterministic for a given seed regardless of thread
/// count (fixed shard layout, moments pooled in shard order).
McEstimate mc_estimate(const Marginal& mi, const Marginal& mj, double rho_z,
                       long n_samples = 1000000, std::uint64_t seed = 20240901);

/// Copy of a continuous marginal whose quantile increments *counter on every
/// call. The counter must outlive the returned marginal.
Marginal with_counted_quantile(const Marginal& m, long* counter);

}  // namespace rhoz
