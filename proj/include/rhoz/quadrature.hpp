#pragma once

#include <vector>

namespace rhoz {

enum class QuadratureKind {
    GaussHermiteProbabilist,  // weight phi(z) on (-inf, inf), weights sum to 1
    GaussLegendre,            // weight 1 on [a, b], weights sum to b - a
};

struct QuadratureRule {
    QuadratureKind kind;
    std::vector<double> nodes;    // strictly increasing
    std::vector<double> weights;  // all positive

    int point_count() const { return static_cast<int>(nodes.size()); }
};

inline constexpr int kMaxQuadraturePoints = 200;

/// m-point rule integrating against the standard normal density, exact for
/// polynomials up to degree 2m-1. Nodes and weights come from the
/// Golub-Welsch eigen-decomposition of the Jacobi matrix (off-diagonals
/// sqrt(k)); nothing is tabulated. Nodes are symmetric about 0.
QuadratureRule gauss_hermite_rule(int m);

/// m-point Gauss-Legendre rule on [a, b], exact for polynomials up to
/// degree 2m-1.
QuadratureRule gauss_legendre_rule(int m, double a, double b);

}  // namespace rhoz
