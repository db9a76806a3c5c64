#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "rhoz/errors.hpp"
#include "rhoz/special_functions.hpp"

using namespace rhoz;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;
}  // namespace

TEST_CASE("standard normal pdf") {
    CHECK(std_normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
    CHECK(std_normal_pdf(kInf) == 0.0);
    CHECK(std_normal_pdf(-kInf) == 0.0);
    CHECK(std_normal_pdf(1.0) == doctest::Approx(0.24197072451914337).epsilon(1e-15));
}

TEST_CASE("standard normal cdf") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_cdf(-kInf) == 0.0);
    CHECK(std_normal_cdf(kInf) == 1.0);
    CHECK(std::fabs(std_normal_cdf(1.959963984540054) - 0.975) <= 1e-15);
}

TEST_CASE("standard normal quantile") {
    CHECK(std_normal_quantile(0.5) == 0.0);
    CHECK(std_normal_quantile(0.0) == -kInf);
    CHECK(std_normal_quantile(1.0) == kInf);
    CHECK(std_normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
    CHECK_THROWS_AS(std_normal_quantile(-0.1), DomainError);
    CHECK_THROWS_AS(std_normal_quantile(1.1), DomainError);

    // |Phi(q(p)) - p| stays within 1e-14 across the full representable range.
    for (double lp = -300.0; lp <= -1.0; lp += 0.5) {
        const double p = std::pow(10.0, lp);
        CHECK(std::fabs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-14);
    }
    for (double p = 0.0005; p < 1.0; p += 0.0005)
        CHECK(std::fabs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-14);
}

TEST_CASE("quantile/cdf round trip") {
    // Below z ~ 4.9 the round trip is limited only by the refinement.
    for (double z = -8.0; z <= 4.75; z += 0.01)
        CHECK(std::fabs(std_normal_quantile(std_normal_cdf(z)) - z) <= 1e-10);
    // Above that, Phi(z) loses tail information to the spacing of doubles
    // near 1; the achievable error is ulp(p)/phi(z).
    for (double z = 4.75; z <= 8.0; z += 0.01) {
        const double p = std_normal_cdf(z);
        const double quantization = (std::nextafter(p, 1.0) - p) / std_normal_pdf(z);
        CHECK(std::fabs(std_normal_quantile(p) - z) <= quantization + 1e-10);
    }
}

TEST_CASE("bivariate normal cdf basics") {
    CHECK(bivariate_normal_cdf(0.0, 0.0, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(bivariate_normal_cdf(kInf, kInf, 0.3) == 1.0);
    CHECK(bivariate_normal_cdf(-kInf, 2.0, 0.3) == 0.0);
    CHECK(bivariate_normal_cdf(kInf, 0.7, -0.5) == doctest::Approx(std_normal_cdf(0.7)));
    CHECK(std::fabs(bivariate_normal_cdf(0.0, 0.0, 0.5) - (0.25 + std::asin(0.5) / (2.0 * kPi))) <=
          1e-14);
    CHECK_THROWS_AS(bivariate_normal_cdf(0.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(bivariate_normal_cdf(0.0, 0.0, -1.2), DomainError);
}

TEST_CASE("bivariate normal cdf against the arcsin identity at the origin") {
    for (double rho : {-0.9999, -0.99, -0.9, -0.6, -0.3, -0.05, 0.05, 0.3, 0.75, 0.925, 0.99,
                       0.9999}) {
        const double expect = 0.25 + std::asin(rho) / (2.0 * kPi);
        CHECK(std::fabs(bivariate_normal_cdf(0.0, 0.0, rho) - expect) <= 1e-14);
    }
}

TEST_CASE("bivariate normal cdf against the tetrachoric series") {
    // Independent oracle: Phi2 = Phi Phi + sum_k rho^k/k! He_{k-1} phi x2,
    // convergent well inside |rho| < 1.
    for (double rho : {-0.6, -0.35, 0.2, 0.5, 0.65}) {
        for (double z1 : {-1.7, -0.4, 0.0, 0.8, 2.2}) {
            for (double z2 : {-2.1, -0.6, 0.3, 1.4}) {
                double series = std_normal_cdf(z1) * std_normal_cdf(z2);
                double rk = 1.0, kf = 1.0;
                for (int k = 1; k <= 60; ++k) {
                    rk *= rho;
                    kf *= k;
                    series += rk / kf * hermite_phi(z1, k - 1) * hermite_phi(z2, k - 1);
                }
                CHECK(std::fabs(bivariate_normal_cdf(z1, z2, rho) - series) <= 1e-14);
            }
        }
    }
}

TEST_CASE("bivariate normal cdf factorizes at rho = 0") {
    for (double z1 = -3.0; z1 <= 3.0; z1 += 0.5)
        for (double z2 = -3.0; z2 <= 3.0; z2 += 0.5)
            CHECK(std::fabs(bivariate_normal_cdf(z1, z2, 1e-300) -
                            std_normal_cdf(z1) * std_normal_cdf(z2)) <= 1e-13);
}

TEST_CASE("bivariate normal cdf is monotone in all three arguments") {
    for (double rho : {-0.95, -0.5, 0.0 + 1e-12, 0.5, 0.95}) {
        double prev = 0.0;
        for (double z = -4.0; z <= 4.0; z += 0.25) {
            const double v = bivariate_normal_cdf(z, 0.7, rho);
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
    }
    double prev = 0.0;
    for (double rho = -0.999; rho <= 0.999; rho += 0.037) {
        const double v = bivariate_normal_cdf(0.8, -0.4, rho);
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
}

TEST_CASE("hermite sequence values and recurrence") {
    const HermiteSequence a = hermite_sequence(2.0, 3);
    CHECK(a[0] == 1.0);
    CHECK(a[1] == 2.0);
    CHECK(a[2] == 3.0);
    CHECK(a[3] == 2.0);

    const HermiteSequence b = hermite_sequence(0.0, 4);
    CHECK(b[0] == 1.0);
    CHECK(b[1] == 0.0);
    CHECK(b[2] == -1.0);
    CHECK(b[3] == 0.0);
    CHECK(b[4] == 3.0);

    const HermiteSequence c = hermite_sequence(1.0, 2);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == 1.0);
    CHECK(c[2] == 0.0);

    // The three-term recurrence holds exactly as computed.
    for (double z : {-3.7, -0.9, 0.3, 1.9, 6.1}) {
        const HermiteSequence h = hermite_sequence(z, 25);
        for (int k = 1; k < 25; ++k) CHECK(h[k + 1] == z * h[k] - k * h[k - 1]);
    }

    CHECK_THROWS_AS(hermite_sequence(0.0, kHermiteDegreeCap + 1), ConfigError);
    CHECK_THROWS_AS(hermite_sequence(kInf, 3), DomainError);
}

TEST_CASE("hermite_phi vanishes at infinity and matches the sequence") {
    CHECK(hermite_phi(kInf, 7) == 0.0);
    CHECK(hermite_phi(-kInf, 12) == 0.0);
    for (double z : {-2.0, 0.0, 1.3}) {
        const HermiteSequence h = hermite_sequence(z, 9);
        for (int k = 0; k <= 9; ++k)
            CHECK(hermite_phi(z, k) == doctest::Approx(h[k] * std_normal_pdf(z)).epsilon(1e-15));
    }
}
