#include "rhoz/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rhoz/errors.hpp"

namespace rhoz {

namespace {

// Implicit-shift QL iteration on a symmetric tridiagonal matrix, carrying
// only the first row of the eigenvector matrix. d holds the diagonal, e the
// subdiagonal (e[0..n-2]), z starts as the first unit vector. On return d
// holds the eigenvalues and z[j]^2 * mu0 is the quadrature weight of node j.
void tridiagonal_golub_welsch(std::vector<double>& d, std::vector<double>& e,
                              std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    if (n == 1) return;
    e.push_back(0.0);  // sentinel

    const double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::fabs(d[static_cast<size_t>(m)]) +
                                  std::fabs(d[static_cast<size_t>(m) + 1]);
                if (std::fabs(e[static_cast<size_t>(m)]) <= eps * dd) break;
            }
            if (m == l) break;
            if (++iter > 50) throw Error("quadrature: tridiagonal QL failed to converge");

            double g = (d[static_cast<size_t>(l) + 1] - d[static_cast<size_t>(l)]) /
                       (2.0 * e[static_cast<size_t>(l)]);
            double r = std::hypot(g, 1.0);
            g = d[static_cast<size_t>(m)] - d[static_cast<size_t>(l)] +
                e[static_cast<size_t>(l)] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (int i = m - 1; i >= l; --i) {
                double f = s * e[static_cast<size_t>(i)];
                const double b = c * e[static_cast<size_t>(i)];
                r = std::hypot(f, g);
                e[static_cast<size_t>(i) + 1] = r;
                if (r == 0.0) {
                    d[static_cast<size_t>(i) + 1] -= p;
                    e[static_cast<size_t>(m)] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[static_cast<size_t>(i) + 1] - p;
                r = (d[static_cast<size_t>(i)] - g) * s + 2.0 * c * b;
                p = s * r;
                d[static_cast<size_t>(i) + 1] = g + p;
                g = c * r - b;

                f = z[static_cast<size_t>(i) + 1];
                z[static_cast<size_t>(i) + 1] = s * z[static_cast<size_t>(i)] + c * f;
                z[static_cast<size_t>(i)] = c * z[static_cast<size_t>(i)] - s * f;
            }
            if (underflow) continue;
            d[static_cast<size_t>(l)] -= p;
            e[static_cast<size_t>(l)] = g;
            e[static_cast<size_t>(m)] = 0.0;
        } while (true);
    }
}

QuadratureRule from_recurrence(QuadratureKind kind, int m, const std::vector<double>& offdiag,
                               double mu0) {
    std::vector<double> d(static_cast<size_t>(m), 0.0);
    std::vector<double> e = offdiag;
    std::vector<double> z(static_cast<size_t>(m), 0.0);
    z[0] = 1.0;

    tridiagonal_golub_welsch(d, e, z);

    std::vector<int> order(static_cast<size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return d[static_cast<size_t>(a)] < d[static_cast<size_t>(b)]; });

    QuadratureRule rule;
    rule.kind = kind;
    rule.nodes.resize(static_cast<size_t>(m));
    rule.weights.resize(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        rule.nodes[static_cast<size_t>(j)] = d[static_cast<size_t>(order[static_cast<size_t>(j)])];
        const double zj = z[static_cast<size_t>(order[static_cast<size_t>(j)])];
        rule.weights[static_cast<size_t>(j)] = mu0 * zj * zj;
    }

    // Both families here are symmetric; force the +-pairing exactly.
    for (int j = 0; j < m / 2; ++j) {
        const size_t lo = static_cast<size_t>(j);
        const size_t hi = static_cast<size_t>(m - 1 - j);
        const double v = 0.5 * (rule.nodes[hi] - rule.nodes[lo]);
        rule.nodes[lo] = -v;
        rule.nodes[hi] = v;
        const double w = 0.5 * (rule.weights[lo] + rule.weights[hi]);
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (m % 2 == 1) rule.nodes[static_cast<size_t>(m / 2)] = 0.0;
    return rule;
}

void check_point_count(int m, const char* who) {
    if (m < 1 || m > kMaxQuadraturePoints)
        throw ConfigError(std::string(who) + ": point count must lie in [1, " +
                          std::to_string(kMaxQuadraturePoints) + "]");
}

}  // namespace

QuadratureRule gauss_hermite_rule(int m) {
    check_point_count(m, "gauss_hermite_rule");
    std::vector<double> offdiag(static_cast<size_t>(m > 1 ? m - 1 : 0));
    for (int k = 1; k < m; ++k) offdiag[static_cast<size_t>(k) - 1] = std::sqrt(double(k));
    return from_recurrence(QuadratureKind::GaussHermiteProbabilist, m, offdiag, 1.0);
}

QuadratureRule gauss_legendre_rule(int m, double a, double b) {
    check_point_count(m, "gauss_legendre_rule");
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("gauss_legendre_rule: need finite a < b");

    std::vector<double> offdiag(static_cast<size_t>(m > 1 ? m - 1 : 0));
    for (int k = 1; k < m; ++k)
        offdiag[static_cast<size_t>(k) - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    QuadratureRule rule = from_recurrence(QuadratureKind::GaussLegendre, m, offdiag, 2.0);

    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (size_t j = 0; j < rule.nodes.size(); ++j) {
        rule.nodes[j] = mid + half * rule.nodes[j];
        rule.weights[j] *= half;
    }
    return rule;
}

}  // namespace rhoz
