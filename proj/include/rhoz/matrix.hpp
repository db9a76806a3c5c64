#pragma once

#include <string>
#include <vector>

#include "rhoz/link.hpp"
#include "rhoz/marginal.hpp"

namespace rhoz {

using Matrix = std::vector<std::vector<double>>;

/// Throws DomainError unless m is square, symmetric within 1e-12, has unit
/// diagonal and off-diagonal entries in [-1, 1].
void validate_correlation_matrix(const Matrix& m);

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> symmetric_eigenvalues(const Matrix& m);

/// Cholesky feasibility probe.
bool is_positive_definite(const Matrix& m);

struct RepairResult {
    Matrix matrix;
    double max_perturbation = 0.0;  // max |repaired - original| entry
    bool changed = false;
};

/// Eigenvalue clipping at eig_floor followed by rescaling back to unit
/// diagonal. Clipping makes the matrix positive definite and the congruence
/// rescale preserves that, so one pass suffices.
RepairResult clip_to_correlation(const Matrix& m, double eig_floor = 1e-8);

struct MatrixMapOptions {
    bool use_closed_form = true;  // analytic links for recognized pairs
    bool repair = true;
    double eig_floor = 1e-8;
    SelectOptions select;
    int threads = 0;  // 0 = hardware concurrency
};

struct MatrixEntryReport {
    int i = 0;
    int j = 0;
    double rho_x = 0.0;
    double rho_z = 0.0;
    int degree = 0;  // 0 for closed-form entries
    std::string method;
    std::vector<std::string> warnings;
};

struct MatrixMapResult {
    Matrix rho_z;                  // final (possibly repaired) matrix
    bool repaired = false;
    double max_perturbation = 0.0;
    double min_eigenvalue = 0.0;   // of the final matrix
    std::vector<MatrixEntryReport> entries;
};

/// Maps a target correlation matrix entrywise into normal space. Entries are
/// independent and solved concurrently; assembly is by index, so the result
/// does not depend on completion order. Pairwise infeasibility throws
/// InfeasibleTargetError naming the offending entry.
MatrixMapResult map_correlation_matrix(const std::vector<Marginal>& marginals,
                                       const Matrix& target,
                                       const MatrixMapOptions& opts = {});

}  // namespace rhoz
