#pragma once

#include <vector>

namespace rhoz {

/// Hermite recurrences above this degree are rejected; factorials and
/// polynomial values grow too fast for double precision to stay honest.
inline constexpr int kHermiteDegreeCap = 60;

/// Standard normal density. Returns 0 at +-infinity.
double std_normal_pdf(double z) noexcept;

/// Standard normal CDF, absolute error below 1e-15 over the full range.
double std_normal_cdf(double z) noexcept;

/// Inverse standard normal CDF. Accepts p in [0,1]; p = 0 and p = 1 map to
/// -inf and +inf. Rational approximation refined by Halley steps against
/// std_normal_cdf, so |Phi(result) - p| stays within a few ulp of p.
double std_normal_quantile(double p);

/// CDF of two standard normals with correlation rho, |rho| < 1.
/// Infinite arguments short-circuit to the univariate CDF. The finite case
/// uses the Genz (2004) hybrid scheme; absolute error is below 1e-14.
double bivariate_normal_cdf(double z1, double z2, double rho);

/// He_0(z)..He_n(z) at a single point (probabilists' convention:
/// He_{k+1} = z He_k - k He_{k-1}).
struct HermiteSequence {
    std::vector<double> values;

    double operator[](int k) const { return values[static_cast<size_t>(k)]; }
    int degree() const { return static_cast<int>(values.size()) - 1; }
};

HermiteSequence hermite_sequence(double z, int n);

/// He_k(z) * phi(z). Defined as 0 at z = +-infinity for every k; the
/// Gaussian factor dominates any polynomial growth.
double hermite_phi(double z, int k);

}  // namespace rhoz
