#include "rhoz/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "rhoz/errors.hpp"
#include "rhoz/quadrature.hpp"
#include "rhoz/special_functions.hpp"

namespace rhoz {

namespace {

constexpr double kTailTruncation = 8.5;  // phi < 1e-16 beyond this

void check_target(double rho_x) {
    if (std::isnan(rho_x) || std::fabs(rho_x) > 1.0)
        throw DomainError("bisection: rho_x must lie in [-1, 1]");
}

// T midpoint evaluations of a monotone g on the sign-matched bracket.
// g(end) is probed first through `probe` (an uncounted twin of g) so an
// unattainable target fails fast; the counted work is exactly the T loop.
// Targets within eps of the attainable end still count as feasible, since
// the search only promises that error bound anyway.
template <typename G, typename Probe>
double bisect_monotone(double rho_x, double eps, G&& g, Probe&& probe) {
    const int iterations = bisection_T(eps);
    double lo = rho_x > 0.0 ? 1e-12 : -(1.0 - 1e-9);
    double hi = rho_x > 0.0 ? 1.0 - 1e-9 : -1e-12;

    const double end = rho_x > 0.0 ? hi : lo;
    const double g_end = probe(end);
    if ((rho_x > 0.0 && g_end + eps < rho_x) || (rho_x < 0.0 && g_end - eps > rho_x)) {
        const double other = probe(-end);
        std::ostringstream os;
        os << "bisection: rho_x = " << rho_x << " outside the attainable range";
        throw InfeasibleTargetError(os.str(), std::min(g_end, other), std::max(g_end, other));
    }

    for (int t = 0; t < iterations; ++t) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < rho_x)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform draw strictly inside (0, 1): 53 bits plus a half-ulp offset.
double to_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

struct MomentSums {
    double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
};

MomentSums mc_shard(const Marginal& mi, const Marginal& mj, double rho_z, long count,
                    std::uint64_t shard_seed) {
    std::mt19937_64 engine(shard_seed);
    const double slope = std::sqrt(1.0 - rho_z * rho_z);
    MomentSums s;
    for (long i = 0; i < count; ++i) {
        const double z1 = std_normal_quantile(to_unit(engine()));
        const double w = std_normal_quantile(to_unit(engine()));
        const double z2 = rho_z * z1 + slope * w;
        const double x = mi.transform(z1);
        const double y = mj.transform(z2);
        s.sx += x;
        s.sy += y;
        s.sxx += x * x;
        s.syy += y * y;
        s.sxy += x * y;
    }
    s.n = static_cast<double>(count);
    return s;
}

}  // namespace

int bisection_T(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("bisection_T: eps must lie in (0, 1)");
    return static_cast<int>(std::ceil(1.0 - std::log2(eps)));
}

Marginal with_counted_quantile(const Marginal& m, long* counter) {
    if (!m.is_continuous())
        throw ConfigError("with_counted_quantile: not a continuous marginal");
    Marginal wrapped = m;
    wrapped.family_ = MarginalFamily::Custom;  // force the quadrature path
    auto inner = m.quantile_;
    wrapped.quantile_ = [inner, counter](double p) {
        ++*counter;
        return inner(p);
    };
    return wrapped;
}

BisectionResult bisection_continuous(const Marginal& mi, const Marginal& mj, double rho_x, int m,
                                     double eps) {
    check_target(rho_x);
    if (!mi.is_continuous() || !mj.is_continuous())
        throw ConfigError("bisection_continuous: both marginals must be continuous");

    BisectionResult result;
    if (rho_x == 0.0) return result;

    const QuadratureRule rule = gauss_hermite_rule(m);
    EvalCounters& c = result.counters;

    // Outer quantiles depend only on the nodes; cache them once (m calls).
    std::vector<double> outer(static_cast<size_t>(m));
    for (int a = 0; a < m; ++a) {
        outer[static_cast<size_t>(a)] = mi.transform(rule.nodes[static_cast<size_t>(a)]);
        ++c.quantile_calls;
    }

    const double scale = mi.stddev() * mj.stddev();
    const double offset = mi.mean() * mj.mean();
    const auto g_impl = [&](double rho, bool counted) {
        const double slope = std::sqrt(1.0 - rho * rho);
        double acc = 0.0;
        for (int a = 0; a < m; ++a) {
            const double ua = rule.nodes[static_cast<size_t>(a)];
            double inner_acc = 0.0;
            for (int b = 0; b < m; ++b) {
                const double arg = rho * ua + slope * rule.nodes[static_cast<size_t>(b)];
                inner_acc += rule.weights[static_cast<size_t>(b)] * mj.transform(arg);
            }
            acc += rule.weights[static_cast<size_t>(a)] * outer[static_cast<size_t>(a)] * inner_acc;
        }
        if (counted) c.quantile_calls += static_cast<long>(m) * m;
        return (acc - offset) / scale;
    };

    result.rho_z = bisect_monotone(
        rho_x, eps, [&](double r) { return g_impl(r, true); },
        [&](double r) { return g_impl(r, false); });
    return result;
}

BisectionResult bisection_discrete(const Marginal& mi, const Marginal& mj, double rho_x,
                                   double eps) {
    check_target(rho_x);
    if (!mi.is_discrete() || !mj.is_discrete())
        throw ConfigError("bisection_discrete: both marginals must be discrete");

    BisectionResult result;
    if (rho_x == 0.0) return result;

    const std::vector<double> zi = discrete_thresholds(mi).z_cuts;
    const std::vector<double> zj = discrete_thresholds(mj).z_cuts;
    const std::vector<double>& xi = mi.support();
    const std::vector<double>& xj = mj.support();
    EvalCounters& c = result.counters;

    const double scale = mi.stddev() * mj.stddev();
    const double offset = mi.mean() * mj.mean();
    const auto g_impl = [&](double rho, bool counted) {
        // Corners with an infinite coordinate reduce to univariate values.
        const auto corner = [&](double a, double b) {
            if (std::isinf(a) || std::isinf(b)) {
                if (a < 0.0 && std::isinf(a)) return 0.0;
                if (b < 0.0 && std::isinf(b)) return 0.0;
                if (std::isinf(a) && std::isinf(b)) return 1.0;
                return std::isinf(a) ? std_normal_cdf(b) : std_normal_cdf(a);
            }
            if (counted) ++c.bivariate_cdf_calls;
            return bivariate_normal_cdf(a, b, rho);
        };
        double acc = 0.0;
        for (size_t k = 0; k < xi.size(); ++k) {
            for (size_t l = 0; l < xj.size(); ++l) {
                const double mass = corner(zi[k + 1], zj[l + 1]) + corner(zi[k], zj[l]) -
                                    corner(zi[k], zj[l + 1]) - corner(zi[k + 1], zj[l]);
                acc += xi[k] * xj[l] * mass;
            }
        }
        return (acc - offset) / scale;
    };

    result.rho_z = bisect_monotone(
        rho_x, eps, [&](double r) { return g_impl(r, true); },
        [&](double r) { return g_impl(r, false); });
    return result;
}

BisectionResult bisection_mixed(const Marginal& mi, const Marginal& mj, double rho_x, int m1,
                                int m2, double eps) {
    check_target(rho_x);
    if (mi.is_continuous() && mj.is_discrete())
        return bisection_mixed(mj, mi, rho_x, m1, m2, eps);
    if (!mi.is_discrete() || !mj.is_continuous())
        throw ConfigError("bisection_mixed: need one discrete and one continuous marginal");

    BisectionResult result;
    if (rho_x == 0.0) return result;

    const std::vector<double> zi = discrete_thresholds(mi).z_cuts;
    const std::vector<double>& xi = mi.support();
    const QuadratureRule outer = gauss_hermite_rule(m1);
    EvalCounters& c = result.counters;

    // Per-segment Gauss-Legendre rules with the phi(u_i) factor folded into
    // the weights; unbounded end segments truncate where phi vanishes.
    struct Segment {
        double value;                 // X_{i,k}
        std::vector<double> nodes;
        std::vector<double> weights;  // w * phi(node)
    };
    std::vector<Segment> segments;
    for (size_t k = 0; k < xi.size(); ++k) {
        const double lo = std::max(zi[k], -kTailTruncation);
        const double hi = std::min(zi[k + 1], kTailTruncation);
        if (!(lo < hi)) continue;
        QuadratureRule gl = gauss_legendre_rule(m2, lo, hi);
        Segment seg;
        seg.value = xi[k];
        seg.nodes = gl.nodes;
        seg.weights.resize(gl.weights.size());
        for (size_t q = 0; q < gl.weights.size(); ++q)
            seg.weights[q] = gl.weights[q] * std_normal_pdf(gl.nodes[q]);
        segments.push_back(std::move(seg));
    }

    const double scale = mi.stddev() * mj.stddev();
    const double offset = mi.mean() * mj.mean();
    const auto g_impl = [&](double rho, bool counted) {
        const double slope = std::sqrt(1.0 - rho * rho);
        double acc = 0.0;
        for (int b = 0; b < m1; ++b) {
            const double uj = outer.nodes[static_cast<size_t>(b)];
            double outer_acc = 0.0;
            for (const Segment& seg : segments) {
                double seg_acc = 0.0;
                for (size_t q = 0; q < seg.nodes.size(); ++q)
                    seg_acc += seg.weights[q] * mj.transform(rho * seg.nodes[q] + slope * uj);
                outer_acc += seg.value * seg_acc;
            }
            acc += outer.weights[static_cast<size_t>(b)] * outer_acc;
        }
        if (counted)
            c.quantile_calls += static_cast<long>(m1) * static_cast<long>(segments.size()) * m2;
        return (acc - offset) / scale;
    };

    result.rho_z = bisect_monotone(
        rho_x, eps, [&](double r) { return g_impl(r, true); },
        [&](double r) { return g_impl(r, false); });
    return result;
}

McEstimate mc_estimate(const Marginal& mi, const Marginal& mj, double rho_z, long n_samples,
                       std::uint64_t seed) {
    if (std::isnan(rho_z) || std::fabs(rho_z) >= 1.0)
        throw DomainError("mc_estimate: |rho_z| must be < 1");
    if (n_samples < 1) throw DomainError("mc_estimate: need at least one sample");

    // Fixed shard layout: the estimate is a pure function of the seed, not of
    // how many threads happen to run.
    constexpr int kShards = 8;
    long base = n_samples / kShards;
    long extra = n_samples % kShards;

    std::vector<std::future<MomentSums>> futures;
    futures.reserve(kShards);
    for (int s = 0; s < kShards; ++s) {
        const long count = base + (s < extra ? 1 : 0);
        const std::uint64_t shard_seed = splitmix64(seed + 0x51ed2701ULL * (s + 1));
        futures.push_back(std::async(n_samples >= 100000 ? std::launch::async
                                                         : std::launch::deferred,
                                     [&, count, shard_seed] {
                                         return mc_shard(mi, mj, rho_z, count, shard_seed);
                                     }));
    }

    MomentSums total;
    for (auto& f : futures) {  // pooled in shard order
        const MomentSums s = f.get();
        total.n += s.n;
        total.sx += s.sx;
        total.sy += s.sy;
        total.sxx += s.sxx;
        total.syy += s.syy;
        total.sxy += s.sxy;
    }

    const double n = total.n;
    const double cov = total.sxy - total.sx * total.sy / n;
    const double vx = total.sxx - total.sx * total.sx / n;
    const double vy = total.syy - total.sy * total.sy / n;

    McEstimate est;
    est.sample_count = n_samples;
    est.rho_hat = cov / std::sqrt(vx * vy);
    est.std_error = (1.0 - est.rho_hat * est.rho_hat) / std::sqrt(n);
    return est;
}

}  // namespace rhoz
