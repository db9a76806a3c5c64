#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rhoz/baselines.hpp"
#include "rhoz/errors.hpp"
#include "rhoz/link.hpp"
#include "rhoz/solve.hpp"

using namespace rhoz;

TEST_CASE("identity link") {
    LinkPolynomial identity;
    identity.b = {0.0, 1.0};
    const SolveReport rep = solve_rho_z(identity, 0.3);
    CHECK(rep.rho_z == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(rep.residual <= 1e-12);
    CHECK(rep.method == SolveMethod::PolynomialInvert);

    const auto range = feasible_range(identity);
    CHECK(range.first == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(range.second == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("zero target resolves to zero") {
    const LinkPolynomial p = build_continuous(Marginal::beta(2, 3), Marginal::beta(2, 3), 9);
    const SolveReport rep = solve_rho_z(p, 0.0);
    CHECK(rep.rho_z == 0.0);
    CHECK(rep.residual <= 1e-8);
}

TEST_CASE("published solve targets") {
    const DegreeSelection beta = select_degree(Marginal::beta(2, 3), Marginal::beta(2, 3));
    CHECK(solve_rho_z(beta.poly, 0.6).rho_z == doctest::Approx(0.606).epsilon(0.004));

    const LinkPolynomial b20 = build_discrete(Marginal::binomial(20, 0.2),
                                              Marginal::binomial(20, 0.2), 3);
    CHECK(solve_rho_z(b20, -0.9).rho_z == doctest::Approx(-0.938).epsilon(0.003));
}

TEST_CASE("round trip through every route") {
    const LinkPolynomial links[] = {
        build_continuous(Marginal::beta(2, 3), Marginal::beta(2, 3), 11),
        build_continuous(Marginal::lognormal(0, 1), Marginal::lognormal(0, 1), 11),
        build_discrete(Marginal::binomial(20, 0.2), Marginal::binomial(20, 0.2), 5),
        build_mixed(Marginal::binomial(2, 0.2), Marginal::beta(2, 3), 7),
    };
    for (const LinkPolynomial& p : links) {
        const auto range = feasible_range(p);
        for (double rz : {-0.9, -0.6, -0.3, 0.3, 0.6, 0.9}) {
            const double rx = evaluate(p, rz);
            if (rx <= range.first || rx >= range.second) continue;
            const SolveReport rep = solve_rho_z(p, rx);
            CHECK(std::fabs(rep.rho_z - rz) <= 1e-9);
        }
    }
}

TEST_CASE("sign constraint and monotone consistency") {
    const LinkPolynomial p = build_mixed(Marginal::binomial(2, 0.2), Marginal::beta(2, 3), 7);
    double prev = -2.0;
    for (double rx : {-0.7, -0.4, -0.2, -0.05, 0.05, 0.3, 0.55, 0.8}) {
        const SolveReport rep = solve_rho_z(p, rx);
        CHECK(rep.rho_z * rx >= 0.0);
        CHECK(rep.rho_z >= prev);
        CHECK(rep.rho_z > -1.0);
        CHECK(rep.rho_z < 1.0);
        prev = rep.rho_z;
    }
}

TEST_CASE("infeasible targets carry the attainable range") {
    const LinkPolynomial p = build_discrete(Marginal::binomial(2, 0.2),
                                            Marginal::binomial(2, 0.2), 23);
    // The pair's product-moment correlation bottoms out at -0.5; the degree-23
    // link puts the negative bracket end a hair past it.
    const auto range = feasible_range(p);
    CHECK(range.first == doctest::Approx(-0.5028).epsilon(2e-3));
    CHECK(range.first > -1.0);
    CHECK(range.second < 1.0);
    try {
        solve_rho_z(p, -0.8);
        FAIL("expected InfeasibleTargetError");
    } catch (const InfeasibleTargetError& e) {
        CHECK(e.feasible_lo == doctest::Approx(range.first));
        CHECK(e.feasible_hi == doctest::Approx(range.second));
    }

    // Monte Carlo confirms the attainable floor: even at rho_z = -0.999 the
    // sample correlation sits at the -0.5 boundary.
    const McEstimate mc = mc_estimate(Marginal::binomial(2, 0.2), Marginal::binomial(2, 0.2),
                                      -0.999, 200000, 7);
    CHECK(mc.rho_hat == doctest::Approx(-0.5).epsilon(0.02));
}

TEST_CASE("closed-form feasibility at the corners") {
    // The bernoulli pair's analytic link attains the full interval.
    CHECK(closed_form(ClosedFormCase::BernoulliBernoulli, LinkDirection::ZToX, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(closed_form(ClosedFormCase::BernoulliBernoulli, LinkDirection::ZToX, -1.0) ==
          doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("targets outside [-1, 1] are rejected") {
    LinkPolynomial identity;
    identity.b = {0.0, 1.0};
    CHECK_THROWS_AS(solve_rho_z(identity, 1.5), DomainError);
    CHECK_THROWS_AS(solve_rho_z(identity, -2.0), DomainError);
}
