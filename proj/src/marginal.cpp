#include "rhoz/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rhoz/errors.hpp"
#include "rhoz/quadrature.hpp"
#include "rhoz/special_functions.hpp"

namespace rhoz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Continued fraction for the regularized incomplete beta (modified Lentz).
double beta_cf(double x, double a, double b) {
    constexpr int max_iter = 300;
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 4.0 * std::numeric_limits<double>::epsilon()) break;
    }
    return h;
}

double reg_inc_beta(double x, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
    return 1.0 - front * beta_cf(1.0 - x, b, a) / b;
}

double beta_pdf(double x, double a, double b) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b));
}

// Abramowitz & Stegun 26.5.22 starting point for the inverse.
double inv_beta_guess(double p, double a, double b) {
    const double y = std_normal_quantile(p);
    const double al = 1.0 / (2.0 * a - 1.0);
    const double be = 1.0 / (2.0 * b - 1.0);
    if (a > 1.0 && b > 1.0) {
        const double lambda = (y * y - 3.0) / 6.0;
        const double h = 2.0 / (al + be);
        const double w = y * std::sqrt(h + lambda) / h -
                         (be - al) * (lambda + 5.0 / 6.0 - 2.0 / (3.0 * h));
        return a / (a + b * std::exp(2.0 * w));
    }
    // Small-parameter fallback from the same section.
    const double lna = std::log(a / (a + b));
    const double lnb = std::log(b / (a + b));
    const double t = std::exp(a * lna) / a;
    const double u = std::exp(b * lnb) / b;
    const double w = t + u;
    if (p < t / w) return std::pow(a * w * p, 1.0 / a);
    return 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
}

// Bracketed Newton with bisection fallback; converges to |F(q) - p| <= 1e-12.
double inv_reg_inc_beta(double p, double a, double b) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;

    double lo = 0.0, hi = 1.0;
    double x = inv_beta_guess(p, a, b);
    if (!(x > 0.0 && x < 1.0)) x = 0.5;

    for (int iter = 0; iter < 100; ++iter) {
        const double f = reg_inc_beta(x, a, b) - p;
        if (std::fabs(f) <= 1e-13) return x;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        const double dfdx = beta_pdf(x, a, b);
        double next = dfdx > 0.0 ? x - f / dfdx : x;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) break;
        x = next;
    }
    // Residual polish by pure bisection.
    for (int iter = 0; iter < 200 && std::fabs(reg_inc_beta(x, a, b) - p) > 1e-12; ++iter) {
        if (reg_inc_beta(x, a, b) > p)
            hi = x;
        else
            lo = x;
        x = 0.5 * (lo + hi);
        if (hi - lo < 1e-17) break;
    }
    return x;
}

// Cumulative sums at or beyond 1 - 1e-15 map to +inf; floating-point dust in
// the tail would otherwise blow up the quantile.
double cut_from_cumulative(double cum) {
    if (cum >= 1.0 - 1e-15) return kInf;
    return std_normal_quantile(cum);
}

std::string compact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

Marginal Marginal::continuous(std::string name, std::function<double(double)> quantile,
                              double mean, double stddev) {
    if (!(stddev > 0.0)) throw DomainError("marginal '" + name + "': std must be positive");
    if (!quantile) throw DomainError("marginal '" + name + "': missing quantile");

    // Spot-check monotonicity on a probability grid.
    double prev = quantile(0.01);
    for (int i = 1; i <= 24; ++i) {
        const double q = quantile(0.01 + i * (0.98 / 24.0));
        if (q < prev) throw DomainError("marginal '" + name + "': quantile not nondecreasing");
        prev = q;
    }

    Marginal m;
    m.kind_ = MarginalKind::Continuous;
    m.family_ = MarginalFamily::Custom;
    m.name_ = std::move(name);
    m.mean_ = mean;
    m.std_ = stddev;
    m.quantile_ = std::move(quantile);
    return m;
}

Marginal Marginal::discrete(std::string name, std::vector<double> support,
                            std::vector<double> probs) {
    const size_t n = support.size();
    if (n < 2) throw DomainError("marginal '" + name + "': discrete support needs >= 2 points");
    if (probs.size() != n)
        throw DomainError("marginal '" + name + "': support/probs length mismatch");
    double sum = 0.0;
    for (size_t k = 0; k < n; ++k) {
        if (!(probs[k] > 0.0)) throw DomainError("marginal '" + name + "': probs must be positive");
        if (k > 0 && !(support[k] > support[k - 1]))
            throw DomainError("marginal '" + name + "': support must be strictly increasing");
        sum += probs[k];
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw DomainError("marginal '" + name + "': probs must sum to 1");

    double mean = 0.0;
    for (size_t k = 0; k < n; ++k) mean += support[k] * probs[k];
    double var = 0.0;
    for (size_t k = 0; k < n; ++k) var += (support[k] - mean) * (support[k] - mean) * probs[k];
    if (!(var > 0.0)) throw DomainError("marginal '" + name + "': zero variance");

    Marginal m;
    m.kind_ = MarginalKind::Discrete;
    m.family_ = MarginalFamily::DiscreteTable;
    m.name_ = std::move(name);
    m.mean_ = mean;
    m.std_ = std::sqrt(var);
    m.support_ = std::move(support);
    m.probs_ = std::move(probs);

    m.z_cuts_.resize(n + 1);
    m.z_cuts_[0] = -kInf;
    double cum = 0.0;
    for (size_t k = 0; k + 1 < n; ++k) {
        cum += m.probs_[k];
        m.z_cuts_[k + 1] = cut_from_cumulative(cum);
        if (!(m.z_cuts_[k + 1] > m.z_cuts_[k]))
            throw DomainError("marginal '" + m.name_ +
                              "': support point with negligible tail probability");
    }
    m.z_cuts_[n] = kInf;
    return m;
}

Marginal Marginal::uniform01() {
    Marginal m = continuous("uniform01", [](double p) { return p; }, 0.5,
                            0.28867513459481288225457439025098);  // 1/(2 sqrt 3)
    m.family_ = MarginalFamily::Uniform01;
    return m;
}

Marginal Marginal::normal01() {
    Marginal m = continuous("normal01", [](double p) { return std_normal_quantile(p); }, 0.0, 1.0);
    m.family_ = MarginalFamily::Normal01;
    return m;
}

Marginal Marginal::lognormal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("lognormal: sigma must be positive");
    const double scale = std::exp(mu + 0.5 * sigma * sigma);
    Marginal m = continuous(
        "lognormal(" + compact(mu) + "," + compact(sigma) + ")",
        [mu, sigma](double p) { return std::exp(mu + sigma * std_normal_quantile(p)); }, scale,
        scale * std::sqrt(std::expm1(sigma * sigma)));
    m.family_ = MarginalFamily::Lognormal;
    m.param1_ = mu;
    m.param2_ = sigma;
    return m;
}

Marginal Marginal::beta(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("beta: parameters must be positive");
    const double s = alpha + beta;
    Marginal m = continuous(
        "beta(" + compact(alpha) + "," + compact(beta) + ")",
        [alpha, beta](double p) { return inv_reg_inc_beta(p, alpha, beta); }, alpha / s,
        std::sqrt(alpha * beta / (s * s * (s + 1.0))));
    m.family_ = MarginalFamily::Beta;
    m.param1_ = alpha;
    m.param2_ = beta;
    return m;
}

Marginal Marginal::bernoulli_half() {
    Marginal m = discrete("bernoulli_half", {0.0, 1.0}, {0.5, 0.5});
    m.family_ = MarginalFamily::BernoulliHalf;
    m.mean_ = 0.5;
    m.std_ = 0.5;
    return m;
}

Marginal Marginal::binomial(int n, double p) {
    if (n < 1) throw DomainError("binomial: n must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("binomial: p must lie in (0, 1)");

    std::vector<double> support(static_cast<size_t>(n) + 1);
    std::vector<double> probs(static_cast<size_t>(n) + 1);
    double pmf = std::pow(1.0 - p, n);
    const double odds = p / (1.0 - p);
    for (int k = 0; k <= n; ++k) {
        support[static_cast<size_t>(k)] = k;
        probs[static_cast<size_t>(k)] = pmf;
        pmf *= odds * (n - k) / (k + 1.0);
    }
    Marginal m = discrete("binomial(" + std::to_string(n) + "," + compact(p) + ")",
                          std::move(support), std::move(probs));
    m.family_ = MarginalFamily::Binomial;
    m.param1_ = n;
    m.param2_ = p;
    m.mean_ = n * p;
    m.std_ = std::sqrt(n * p * (1.0 - p));
    return m;
}

Marginal Marginal::poisson(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("poisson: lambda must be positive");

    std::vector<double> support;
    std::vector<double> probs;
    double pmf = std::exp(-lambda);
    double cum = 0.0;
    for (int k = 0; k < 2000; ++k) {
        support.push_back(k);
        probs.push_back(pmf);
        cum += pmf;
        if (cum >= 1.0 - 1e-10 && k >= 1) break;
        pmf *= lambda / (k + 1.0);
    }
    for (double& q : probs) q /= cum;  // renormalize the truncated tail away

    Marginal m = discrete("poisson(" + compact(lambda) + ")", std::move(support),
                          std::move(probs));
    m.family_ = MarginalFamily::Poisson;
    m.param1_ = lambda;
    return m;
}

double Marginal::quantile(double p) const {
    if (kind_ != MarginalKind::Continuous)
        throw ConfigError("Marginal::quantile: not a continuous marginal");
    return quantile_(p);
}

const std::vector<double>& Marginal::support() const {
    if (kind_ != MarginalKind::Discrete)
        throw ConfigError("Marginal::support: not a discrete marginal");
    return support_;
}

const std::vector<double>& Marginal::probs() const {
    if (kind_ != MarginalKind::Discrete)
        throw ConfigError("Marginal::probs: not a discrete marginal");
    return probs_;
}

double Marginal::transform(double z) const {
    if (kind_ == MarginalKind::Continuous) {
        double p = std_normal_cdf(z);
        if (p >= 1.0) p = std::nextafter(1.0, 0.0);
        if (p <= 0.0) p = std::numeric_limits<double>::min();
        return quantile_(p);
    }
    // X_k on the band Z_{k-1} < z <= Z_k.
    const auto it = std::lower_bound(z_cuts_.begin() + 1, z_cuts_.end(), z);
    const size_t k = static_cast<size_t>(it - z_cuts_.begin());
    return support_[std::min(k - 1, support_.size() - 1)];
}

ThresholdSet discrete_thresholds(const Marginal& m) {
    if (!m.is_discrete())
        throw ConfigError("discrete_thresholds: not a discrete marginal");
    return ThresholdSet{m.z_cuts_};
}

HermiteCoefficients hermite_coefficients(const Marginal& m, int n, int rule_points,
                                         CoefficientMode mode) {
    if (!m.is_continuous())
        throw ConfigError("hermite_coefficients: not a continuous marginal");
    if (n < 0 || n > kHermiteDegreeCap)
        throw ConfigError("hermite_coefficients: degree out of range");
    if (rule_points <= n)
        throw ConfigError("hermite_coefficients: rule_points must exceed the degree");

    HermiteCoefficients hc;
    hc.a.assign(static_cast<size_t>(n) + 1, 0.0);
    hc.raw_sum.assign(static_cast<size_t>(n) + 1, 0.0);
    hc.quadrature_points = rule_points;

    if (mode == CoefficientMode::AnalyticWhenKnown) {
        switch (m.family()) {
            case MarginalFamily::Normal01: {
                if (n >= 1) hc.a[1] = 1.0;
                double kf = 1.0;
                for (int k = 0; k <= n; ++k) {
                    if (k > 0) kf *= k;
                    hc.raw_sum[static_cast<size_t>(k)] = kf * hc.a[static_cast<size_t>(k)];
                }
                return hc;
            }
            case MarginalFamily::Uniform01: {
                // Hermite series of Phi(z): a_0 = 1/2 and
                // a_{2i+1} = (-1)^i / (sqrt(4 pi) (2i+1) 4^i i!), even terms vanish.
                hc.a[0] = 0.5;
                double odd = 1.0 / std::sqrt(4.0 * 3.14159265358979323846);
                int i = 0;
                for (int k = 1; k <= n; k += 2) {
                    hc.a[static_cast<size_t>(k)] = odd;
                    ++i;
                    odd *= -(2.0 * i - 1.0) / (4.0 * i * (2.0 * i + 1.0));
                }
                double kf = 1.0;
                for (int k = 0; k <= n; ++k) {
                    if (k > 0) kf *= k;
                    hc.raw_sum[static_cast<size_t>(k)] = kf * hc.a[static_cast<size_t>(k)];
                }
                return hc;
            }
            case MarginalFamily::Lognormal: {
                // e^{mu + sigma z} expands with a_k = e^{mu + sigma^2/2} sigma^k / k!.
                const double sigma = m.param2();
                double ak = std::exp(m.param1() + 0.5 * sigma * sigma);
                double kf = 1.0;
                for (int k = 0; k <= n; ++k) {
                    if (k > 0) {
                        ak *= sigma / k;
                        kf *= k;
                    }
                    hc.a[static_cast<size_t>(k)] = ak;
                    hc.raw_sum[static_cast<size_t>(k)] = kf * ak;
                }
                return hc;
            }
            default:
                break;
        }
    }

    const QuadratureRule rule = gauss_hermite_rule(rule_points);
    for (int j = 0; j < rule_points; ++j) {
        const double z = rule.nodes[static_cast<size_t>(j)];
        const double q = m.transform(z);
        if (!std::isfinite(q))
            throw MarginalError("hermite_coefficients: quantile not finite at node z = " +
                                std::to_string(z) + " for marginal '" + m.name() + "'");
        const double wq = rule.weights[static_cast<size_t>(j)] * q;
        const HermiteSequence he = hermite_sequence(z, n);
        for (int k = 0; k <= n; ++k) hc.raw_sum[static_cast<size_t>(k)] += wq * he[k];
    }
    double kf = 1.0;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) kf *= k;
        hc.a[static_cast<size_t>(k)] = hc.raw_sum[static_cast<size_t>(k)] / kf;
    }
    return hc;
}

}  // namespace rhoz
