#pragma once

#include <functional>
#include <string>
#include <vector>

namespace rhoz {

enum class MarginalKind { Continuous, Discrete };

class Marginal;
struct ThresholdSet;
ThresholdSet discrete_thresholds(const Marginal& m);

/// Distribution family tag. Built-in families enable analytic fast paths
/// and closed-form pair matching; user-supplied marginals are Custom.
enum class MarginalFamily {
    Custom,
    Uniform01,
    Normal01,
    Lognormal,
    Beta,
    BernoulliHalf,
    Binomial,
    Poisson,
    DiscreteTable,
};

/// A one-dimensional marginal distribution: either continuous (quantile
/// function plus mean and standard deviation) or discrete (finite support
/// with probabilities). Immutable after construction; values are freely
/// copyable and safe to share across threads.
class Marginal {
public:
    static Marginal continuous(std::string name, std::function<double(double)> quantile,
                               double mean, double stddev);
    static Marginal discrete(std::string name, std::vector<double> support,
                             std::vector<double> probs);

    static Marginal uniform01();
    static Marginal normal01();
    static Marginal lognormal(double mu, double sigma);
    static Marginal beta(double alpha, double beta);
    static Marginal bernoulli_half();
    static Marginal binomial(int n, double p);
    /// Infinite support truncated at cumulative probability 1 - 1e-10 and
    /// renormalized; the truncation error sits below every solve tolerance.
    static Marginal poisson(double lambda);

    MarginalKind kind() const { return kind_; }
    MarginalFamily family() const { return family_; }
    const std::string& name() const { return name_; }
    double mean() const { return mean_; }
    double stddev() const { return std_; }
    double param1() const { return param1_; }
    double param2() const { return param2_; }

    bool is_continuous() const { return kind_ == MarginalKind::Continuous; }
    bool is_discrete() const { return kind_ == MarginalKind::Discrete; }

    /// Continuous marginals only.
    double quantile(double p) const;

    /// Discrete marginals only.
    const std::vector<double>& support() const;
    const std::vector<double>& probs() const;

    /// F^{-1}(Phi(z)): quantile composition for continuous marginals,
    /// threshold lookup for discrete ones. Probabilities indistinguishable
    /// from 1 in double precision are nudged to the largest value below 1 so
    /// unbounded quantiles stay finite at extreme quadrature nodes.
    double transform(double z) const;

private:
    Marginal() = default;

    friend Marginal with_counted_quantile(const Marginal& m, long* counter);

    MarginalKind kind_ = MarginalKind::Continuous;
    MarginalFamily family_ = MarginalFamily::Custom;
    std::string name_;
    double mean_ = 0.0;
    double std_ = 1.0;
    double param1_ = 0.0;
    double param2_ = 0.0;
    std::function<double(double)> quantile_;
    std::vector<double> support_;
    std::vector<double> probs_;
    std::vector<double> z_cuts_;  // discrete: normal-space thresholds, eager

    friend ThresholdSet discrete_thresholds(const Marginal& m);
};

/// Normal-space cut points of a discrete marginal with N support points:
/// z_cuts[0] = -inf, z_cuts[1..N-1] finite increasing, z_cuts[N] = +inf.
struct ThresholdSet {
    std::vector<double> z_cuts;
};

/// Projection coefficients of F^{-1} o Phi onto He_0..He_n.
/// a[k] is the coefficient; raw_sum[k] = k! * a[k] is the plain quadrature
/// sum, kept so downstream products can divide by k! once instead of
/// multiplying large factorials back in.
struct HermiteCoefficients {
    std::vector<double> a;
    std::vector<double> raw_sum;
    int quadrature_points = 0;
};

enum class CoefficientMode {
    AnalyticWhenKnown,  // closed-form coefficients for uniform01/normal01/lognormal
    QuadratureOnly,
};

/// rule_points must exceed n. Quadrature path: a_k = (1/k!) sum w He_k(z) F^{-1}(Phi(z)).
HermiteCoefficients hermite_coefficients(const Marginal& m, int n, int rule_points,
                                         CoefficientMode mode = CoefficientMode::AnalyticWhenKnown);

/// Default quadrature size for coefficient integrals: n+1 points make the
/// rule exact for polynomial integrands, the floor of 40 controls truncation
/// error for real quantiles.
inline int default_rule_points(int n) { return n + 1 > 40 ? n + 1 : 40; }

}  // namespace rhoz
