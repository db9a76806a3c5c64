#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rhoz/marginal.hpp"

namespace rhoz {

enum class LinkRoute { ContinuousContinuous, DiscreteDiscrete, Mixed, ClosedForm };

struct LinkMeta {
    std::string label_i;
    std::string label_j;
    int rule_points_i = 0;  // 0 when the route needs no quadrature on that side
    int rule_points_j = 0;
    CoefficientMode mode = CoefficientMode::AnalyticWhenKnown;
    long hermite_phi_evals = 0;  // He_k(z)*phi(z) evaluations spent building
    std::vector<std::string> warnings;
};

/// Polynomial approximation rho_x ~= sum b_k rho_z^k of the link between the
/// normal-space correlation and the target-space correlation of a marginal
/// pair. b[0] is stored as computed, not forced to zero; a value above 1e-8
/// flags quadrature trouble in meta.warnings.
struct LinkPolynomial {
    std::vector<double> b;  // ascending powers
    LinkRoute route = LinkRoute::ContinuousContinuous;
    LinkMeta meta;

    int degree() const { return static_cast<int>(b.size()) - 1; }
};

double evaluate(const LinkPolynomial& p, double rho_z);
double derivative(const LinkPolynomial& p, double rho_z);

struct BuildOptions {
    /// Quadrature points for coefficient integrals; 0 means max(n+1, 40).
    int rule_points = 0;
    CoefficientMode mode = CoefficientMode::AnalyticWhenKnown;
};

LinkPolynomial build_continuous(const Marginal& mi, const Marginal& mj, int n,
                                const BuildOptions& opts = {});
LinkPolynomial build_discrete(const Marginal& mi, const Marginal& mj, int n);
/// Either argument order is accepted; the discrete marginal is placed in the
/// i slot internally.
LinkPolynomial build_mixed(const Marginal& mi, const Marginal& mj, int n,
                           const BuildOptions& opts = {});

/// Builds the link by the route matching the pair's kinds at a fixed degree.
LinkPolynomial build_link(const Marginal& mi, const Marginal& mj, int n,
                          const BuildOptions& opts = {});

struct SelectOptions {
    int degree_step = 2;       // ladder increment
    double delta = 1e-4;       // stabilization bound on max |P_j - P_{j+step}|
    double grid_step = 0.01;   // comparison grid over [-1, 1], endpoints included
    int degree_cap = 39;       // odd, so parity-forced coefficient patterns survive
};

struct DegreeSelection {
    int selected_degree = 0;     // degree at which the ladder stabilized
    LinkPolynomial poly;         // the finer polynomial P_{j+step}, already built
    std::vector<std::pair<int, double>> deltas;  // (j, max|P_j - P_{j+step}|)
    bool cap_hit = false;
};

/// Degree-selection ladder: builds P_1, P_{1+step}, ... and stops at the
/// first j whose gap to P_{j+step} over the rho_z grid falls below delta.
/// Candidate polynomials use plain quadrature with exactly j+1 points (the
/// configuration whose shrinking coefficient error drives the gap sequence);
/// analytic fast paths are bypassed here.
DegreeSelection select_degree(const Marginal& mi, const Marginal& mj,
                              const SelectOptions& opts = {});

enum class ClosedFormCase {
    UniformUniform,
    UniformBernoulli,
    UniformNormal,
    UniformLognormal,
    BernoulliBernoulli,
    BernoulliNormal,
    BernoulliLognormal,
    NormalLognormal,
    LognormalLognormal,
};

enum class LinkDirection { XToZ, ZToX };

/// Analytic link for the nine special pairs. sigma1/sigma2 are the
/// lognormal shape parameters where the case involves one (ignored
/// otherwise; the second slot holds the lognormal in the single-lognormal
/// cases). XToZ inverts the rho_x = f(rho_z) forms by monotone bisection to
/// 1e-12 and reports an infeasible target when rho_x is outside [f(-1), f(1)].
double closed_form(ClosedFormCase c, LinkDirection dir, double value,
                   double sigma1 = 1.0, double sigma2 = 1.0);

struct ClosedFormMatch {
    ClosedFormCase case_id;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
};

/// Recognizes pairs of built-in marginals covered by a closed-form link.
std::optional<ClosedFormMatch> match_closed_form(const Marginal& mi, const Marginal& mj);

}  // namespace rhoz
