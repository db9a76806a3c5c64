#include "rhoz/link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rhoz/errors.hpp"
#include "rhoz/quadrature.hpp"
#include "rhoz/special_functions.hpp"

namespace rhoz {

namespace {

constexpr int kBuilderDegreeCap = kHermiteDegreeCap - 1;  // mixed route needs He_{n} and He_{n-1}

void check_degree(int n) {
    if (n < 1 || n > kBuilderDegreeCap)
        throw ConfigError("link degree must lie in [1, " + std::to_string(kBuilderDegreeCap) +
                          "]");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

// Post-construction health checks; findings are recorded, not fatal.
void annotate(LinkPolynomial& p) {
    if (std::fabs(p.b[0]) > 1e-8)
        p.meta.warnings.push_back("b0 = " + fmt(p.b[0]) + " exceeds 1e-8 (quadrature health)");

    const double at_pos = evaluate(p, 1.0);
    const double at_neg = evaluate(p, -1.0);
    if (at_pos > 1.05 || at_neg < -1.05)
        p.meta.warnings.push_back("link exceeds correlation bounds at +-1 (P(1) = " + fmt(at_pos) +
                                  ", P(-1) = " + fmt(at_neg) + ")");

    for (int i = -99; i <= 99; ++i) {
        const double r = i / 100.0;
        if (derivative(p, r) <= 0.0) {
            p.meta.warnings.push_back("derivative not positive at rho_z = " + fmt(r));
            break;
        }
    }
}

// Per-marginal corner-difference factor of the discrete route:
// D(order) = sum_k X_k [He_{order-1}(Z_{k-1}) phi(Z_{k-1}) - He_{order-1}(Z_k) phi(Z_k)].
// Returns D(1..n); infinite thresholds contribute nothing.
std::vector<double> corner_factors(const Marginal& m, int n, long& eval_count) {
    const ThresholdSet cuts = discrete_thresholds(m);
    const std::vector<double>& x = m.support();
    const size_t big_n = x.size();

    // h[c][k] = He_k(Z_c) phi(Z_c) for k = 0..n-1.
    std::vector<std::vector<double>> h(big_n + 1);
    for (size_t c = 0; c <= big_n; ++c) {
        const double z = cuts.z_cuts[c];
        if (std::isinf(z)) {
            h[c].assign(static_cast<size_t>(n), 0.0);
            continue;
        }
        const HermiteSequence he = hermite_sequence(z, n - 1);
        const double pdf = std_normal_pdf(z);
        h[c].resize(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) h[c][static_cast<size_t>(k)] = he[k] * pdf;
        eval_count += n;
    }

    std::vector<double> d(static_cast<size_t>(n) + 1, 0.0);
    for (int order = 1; order <= n; ++order) {
        double sum = 0.0;
        for (size_t k = 0; k < big_n; ++k)
            sum += x[k] * (h[k][static_cast<size_t>(order) - 1] -
                           h[k + 1][static_cast<size_t>(order) - 1]);
        d[static_cast<size_t>(order)] = sum;
    }
    return d;
}

int resolve_points(const BuildOptions& opts, int n) {
    return opts.rule_points > 0 ? opts.rule_points : default_rule_points(n);
}

}  // namespace

double evaluate(const LinkPolynomial& p, double rho_z) {
    double acc = 0.0;
    for (size_t k = p.b.size(); k-- > 0;) acc = acc * rho_z + p.b[k];
    return acc;
}

double derivative(const LinkPolynomial& p, double rho_z) {
    double acc = 0.0;
    for (size_t k = p.b.size(); k-- > 1;) acc = acc * rho_z + static_cast<double>(k) * p.b[k];
    return acc;
}

LinkPolynomial build_continuous(const Marginal& mi, const Marginal& mj, int n,
                                const BuildOptions& opts) {
    check_degree(n);
    if (!mi.is_continuous() || !mj.is_continuous())
        throw ConfigError("build_continuous: both marginals must be continuous");

    const int pts = resolve_points(opts, n);
    const HermiteCoefficients ci = hermite_coefficients(mi, n, pts, opts.mode);
    const HermiteCoefficients cj = hermite_coefficients(mj, n, pts, opts.mode);

    LinkPolynomial p;
    p.route = LinkRoute::ContinuousContinuous;
    p.meta.label_i = mi.name();
    p.meta.label_j = mj.name();
    p.meta.rule_points_i = p.meta.rule_points_j = pts;
    p.meta.mode = opts.mode;
    p.b.resize(static_cast<size_t>(n) + 1);

    const double scale = mi.stddev() * mj.stddev();
    // Analytically zero (the k = 0 projection is the mean); kept as computed.
    p.b[0] = (ci.raw_sum[0] * cj.raw_sum[0] - mi.mean() * mj.mean()) / scale;
    double kf = 1.0;
    for (int k = 1; k <= n; ++k) {
        kf *= k;
        p.b[static_cast<size_t>(k)] =
            (ci.raw_sum[static_cast<size_t>(k)] * cj.raw_sum[static_cast<size_t>(k)] / kf) / scale;
    }
    annotate(p);
    return p;
}

LinkPolynomial build_discrete(const Marginal& mi, const Marginal& mj, int n) {
    check_degree(n);
    if (!mi.is_discrete() || !mj.is_discrete())
        throw ConfigError("build_discrete: both marginals must be discrete");

    LinkPolynomial p;
    p.route = LinkRoute::DiscreteDiscrete;
    p.meta.label_i = mi.name();
    p.meta.label_j = mj.name();
    p.b.assign(static_cast<size_t>(n) + 1, 0.0);

    const std::vector<double> di = corner_factors(mi, n, p.meta.hermite_phi_evals);
    const std::vector<double> dj = corner_factors(mj, n, p.meta.hermite_phi_evals);

    const double scale = mi.stddev() * mj.stddev();
    double kf = 1.0;
    for (int k = 1; k <= n; ++k) {
        kf *= k;
        p.b[static_cast<size_t>(k)] =
            (di[static_cast<size_t>(k)] * dj[static_cast<size_t>(k)] / kf) / scale;
    }
    annotate(p);
    return p;
}

LinkPolynomial build_mixed(const Marginal& mi, const Marginal& mj, int n,
                           const BuildOptions& opts) {
    check_degree(n);
    if (mi.is_continuous() && mj.is_discrete()) return build_mixed(mj, mi, n, opts);
    if (!mi.is_discrete() || !mj.is_continuous())
        throw ConfigError("build_mixed: need one discrete and one continuous marginal");

    const int pts = resolve_points(opts, n);
    const HermiteCoefficients cj = hermite_coefficients(mj, n, pts, opts.mode);

    LinkPolynomial p;
    p.route = LinkRoute::Mixed;
    p.meta.label_i = mi.name();
    p.meta.label_j = mj.name();
    p.meta.rule_points_j = pts;
    p.meta.mode = opts.mode;
    p.b.assign(static_cast<size_t>(n) + 1, 0.0);

    const std::vector<double> di = corner_factors(mi, n, p.meta.hermite_phi_evals);

    // b_n = D_i(n) I_j(n) / (n! sigma_i sigma_j) with I_j(n) = n! a_{j,n}.
    const double scale = mi.stddev() * mj.stddev();
    double kf = 1.0;
    for (int k = 1; k <= n; ++k) {
        kf *= k;
        p.b[static_cast<size_t>(k)] =
            (di[static_cast<size_t>(k)] * cj.raw_sum[static_cast<size_t>(k)] / kf) / scale;
    }
    annotate(p);
    return p;
}

LinkPolynomial build_link(const Marginal& mi, const Marginal& mj, int n,
                          const BuildOptions& opts) {
    if (mi.is_continuous() && mj.is_continuous()) return build_continuous(mi, mj, n, opts);
    if (mi.is_discrete() && mj.is_discrete()) return build_discrete(mi, mj, n);
    return build_mixed(mi, mj, n, opts);
}

DegreeSelection select_degree(const Marginal& mi, const Marginal& mj, const SelectOptions& opts) {
    if (opts.degree_step < 1) throw ConfigError("select_degree: step must be >= 1");
    if (opts.degree_cap < 1 + opts.degree_step || opts.degree_cap > kBuilderDegreeCap)
        throw ConfigError("select_degree: cap out of range");

    const int grid_n = static_cast<int>(std::lround(2.0 / opts.grid_step));
    const auto builder = [&](int degree) {
        BuildOptions b;
        b.rule_points = degree + 1;
        b.mode = CoefficientMode::QuadratureOnly;
        return build_link(mi, mj, degree, b);
    };

    DegreeSelection sel;
    LinkPolynomial coarse = builder(1);
    for (int j = 1; j + opts.degree_step <= opts.degree_cap; j += opts.degree_step) {
        LinkPolynomial fine = builder(j + opts.degree_step);
        double gap = 0.0;
        for (int i = 0; i <= grid_n; ++i) {
            const double r = -1.0 + i * opts.grid_step;
            gap = std::max(gap, std::fabs(evaluate(coarse, r) - evaluate(fine, r)));
        }
        sel.deltas.emplace_back(j, gap);
        if (gap < opts.delta) {
            sel.selected_degree = j;
            sel.poly = std::move(fine);
            return sel;
        }
        coarse = std::move(fine);
    }
    sel.cap_hit = true;
    sel.selected_degree = coarse.degree();
    coarse.meta.warnings.push_back("degree selection hit the cap (" +
                                   std::to_string(opts.degree_cap) +
                                   ") before stabilizing below " + fmt(opts.delta));
    sel.poly = std::move(coarse);
    return sel;
}

namespace {

double case_forward(ClosedFormCase c, double rho_z, double s1, double s2) {
    constexpr double pi = 3.14159265358979323846;
    switch (c) {
        case ClosedFormCase::UniformUniform:
            return (6.0 / pi) * std::asin(rho_z / 2.0);
        case ClosedFormCase::UniformBernoulli:
            return (2.0 * std::sqrt(3.0) / pi) * std::asin(rho_z / std::sqrt(2.0));
        case ClosedFormCase::UniformNormal:
            return std::sqrt(3.0 / pi) * rho_z;
        case ClosedFormCase::UniformLognormal:
            return (2.0 * std::sqrt(3.0) * std_normal_cdf(s2 * rho_z / std::sqrt(2.0)) -
                    std::sqrt(3.0)) /
                   std::sqrt(std::expm1(s2 * s2));
        case ClosedFormCase::BernoulliBernoulli:
            return (2.0 / pi) * std::asin(rho_z);
        case ClosedFormCase::BernoulliNormal:
            return std::sqrt(2.0 / pi) * rho_z;
        case ClosedFormCase::BernoulliLognormal:
            return (2.0 * std_normal_cdf(s2 * rho_z) - 1.0) / std::sqrt(std::expm1(s2 * s2));
        case ClosedFormCase::NormalLognormal:
            return s2 * rho_z / std::sqrt(std::expm1(s2 * s2));
        case ClosedFormCase::LognormalLognormal:
            return std::expm1(s1 * s2 * rho_z) /
                   std::sqrt(std::expm1(s1 * s1) * std::expm1(s2 * s2));
    }
    throw ConfigError("closed_form: unknown case");
}

// Monotone bisection of rho_x = f(rho_z) on [-1, 1] to 1e-12 in the argument.
double invert_forward(ClosedFormCase c, double rho_x, double s1, double s2) {
    const double lo_val = case_forward(c, -1.0, s1, s2);
    const double hi_val = case_forward(c, 1.0, s1, s2);
    if (rho_x < lo_val || rho_x > hi_val)
        throw InfeasibleTargetError("closed_form: rho_x outside the attainable range", lo_val,
                                    hi_val);
    double lo = -1.0, hi = 1.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (case_forward(c, mid, s1, s2) < rho_x)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double closed_form(ClosedFormCase c, LinkDirection dir, double value, double sigma1,
                   double sigma2) {
    constexpr double pi = 3.14159265358979323846;
    if (std::isnan(value) || std::fabs(value) > 1.0)
        throw DomainError("closed_form: correlation must lie in [-1, 1]");
    if (dir == LinkDirection::ZToX) return case_forward(c, value, sigma1, sigma2);

    switch (c) {
        case ClosedFormCase::UniformUniform:
            return 2.0 * std::sin(pi * value / 6.0);
        case ClosedFormCase::UniformBernoulli:
            return std::sqrt(2.0) * std::sin(pi * value / (2.0 * std::sqrt(3.0)));
        case ClosedFormCase::UniformNormal:
            return std::sqrt(pi / 3.0) * value;
        case ClosedFormCase::BernoulliBernoulli:
            return std::sin(pi * value / 2.0);
        case ClosedFormCase::BernoulliNormal:
            return std::sqrt(pi / 2.0) * value;
        case ClosedFormCase::UniformLognormal:
        case ClosedFormCase::BernoulliLognormal:
        case ClosedFormCase::NormalLognormal:
        case ClosedFormCase::LognormalLognormal:
            return invert_forward(c, value, sigma1, sigma2);
    }
    throw ConfigError("closed_form: unknown case");
}

std::optional<ClosedFormMatch> match_closed_form(const Marginal& mi, const Marginal& mj) {
    const auto rank = [](MarginalFamily f) {
        switch (f) {
            case MarginalFamily::Uniform01: return 0;
            case MarginalFamily::BernoulliHalf: return 1;
            case MarginalFamily::Normal01: return 2;
            case MarginalFamily::Lognormal: return 3;
            default: return -1;
        }
    };
    const int ri = rank(mi.family());
    const int rj = rank(mj.family());
    if (ri < 0 || rj < 0) return std::nullopt;

    const Marginal& a = ri <= rj ? mi : mj;
    const Marginal& b = ri <= rj ? mj : mi;
    ClosedFormMatch match;
    if (a.family() == MarginalFamily::Lognormal) match.sigma1 = a.param2();
    if (b.family() == MarginalFamily::Lognormal) match.sigma2 = b.param2();

    switch (rank(a.family()) * 4 + rank(b.family())) {
        case 0 * 4 + 0: match.case_id = ClosedFormCase::UniformUniform; break;
        case 0 * 4 + 1: match.case_id = ClosedFormCase::UniformBernoulli; break;
        case 0 * 4 + 2: match.case_id = ClosedFormCase::UniformNormal; break;
        case 0 * 4 + 3: match.case_id = ClosedFormCase::UniformLognormal; break;
        case 1 * 4 + 1: match.case_id = ClosedFormCase::BernoulliBernoulli; break;
        case 1 * 4 + 2: match.case_id = ClosedFormCase::BernoulliNormal; break;
        case 1 * 4 + 3: match.case_id = ClosedFormCase::BernoulliLognormal; break;
        case 2 * 4 + 3: match.case_id = ClosedFormCase::NormalLognormal; break;
        case 3 * 4 + 3:
            match.case_id = ClosedFormCase::LognormalLognormal;
            match.sigma1 = a.param2();
            match.sigma2 = b.param2();
            break;
        case 2 * 4 + 2:
            return std::nullopt;  // normal x normal: the identity link, no table entry needed
        default:
            return std::nullopt;
    }
    return match;
}

}  // namespace rhoz
