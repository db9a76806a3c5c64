#include "rhoz/matrix.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <mutex>
#include <sstream>
#include <thread>

#include "rhoz/errors.hpp"
#include "rhoz/solve.hpp"

namespace rhoz {

namespace {

// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Fine for the
// correlation-matrix sizes this tool handles; no external solver needed.
void jacobi_eigen(Matrix a, std::vector<double>& eigenvalues, Matrix& eigenvectors) {
    const size_t n = a.size();
    eigenvectors.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-26) break;

        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = std::copysign(1.0, theta) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double vkp = eigenvectors[k][p], vkq = eigenvectors[k][q];
                    eigenvectors[k][p] = c * vkp - s * vkq;
                    eigenvectors[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    eigenvalues.resize(n);
    for (size_t i = 0; i < n; ++i) eigenvalues[i] = a[i][i];
}

}  // namespace

void validate_correlation_matrix(const Matrix& m) {
    const size_t n = m.size();
    if (n == 0) throw DomainError("correlation matrix: empty");
    for (size_t i = 0; i < n; ++i) {
        if (m[i].size() != n) throw DomainError("correlation matrix: not square");
        if (m[i][i] != 1.0) throw DomainError("correlation matrix: diagonal must be exactly 1");
        for (size_t j = 0; j < n; ++j) {
            if (std::isnan(m[i][j]) || std::fabs(m[i][j]) > 1.0)
                throw DomainError("correlation matrix: entries must lie in [-1, 1]");
            if (std::fabs(m[i][j] - m[j][i]) > 1e-12)
                throw DomainError("correlation matrix: not symmetric");
        }
    }
}

std::vector<double> symmetric_eigenvalues(const Matrix& m) {
    std::vector<double> vals;
    Matrix vecs;
    jacobi_eigen(m, vals, vecs);
    std::sort(vals.begin(), vals.end());
    return vals;
}

bool is_positive_definite(const Matrix& m) {
    const size_t n = m.size();
    Matrix l(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j <= i; ++j) {
            double sum = m[i][j];
            for (size_t k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
            if (i == j) {
                if (sum <= 0.0) return false;
                l[i][i] = std::sqrt(sum);
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    return true;
}

RepairResult clip_to_correlation(const Matrix& m, double eig_floor) {
    const size_t n = m.size();
    std::vector<double> vals;
    Matrix vecs;
    jacobi_eigen(m, vals, vecs);

    bool clipped = false;
    for (double& v : vals)
        if (v < eig_floor) {
            v = eig_floor;
            clipped = true;
        }

    RepairResult out;
    if (!clipped) {
        out.matrix = m;
        return out;
    }

    Matrix rebuilt(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j <= i; ++j) {
            double sum = 0.0;
            for (size_t k = 0; k < n; ++k) sum += vecs[i][k] * vals[k] * vecs[j][k];
            rebuilt[i][j] = rebuilt[j][i] = sum;
        }

    // Rescale to unit diagonal; the congruence keeps the matrix positive
    // definite.
    std::vector<double> d(n);
    for (size_t i = 0; i < n; ++i) d[i] = 1.0 / std::sqrt(rebuilt[i][i]);
    out.matrix.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j)
            out.matrix[i][j] = i == j ? 1.0 : std::clamp(rebuilt[i][j] * d[i] * d[j], -1.0, 1.0);
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            const double sym = 0.5 * (out.matrix[i][j] + out.matrix[j][i]);
            out.matrix[i][j] = out.matrix[j][i] = sym;
        }

    out.changed = true;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            out.max_perturbation = std::max(out.max_perturbation,
                                            std::fabs(out.matrix[i][j] - m[i][j]));
    return out;
}

MatrixMapResult map_correlation_matrix(const std::vector<Marginal>& marginals,
                                       const Matrix& target, const MatrixMapOptions& opts) {
    validate_correlation_matrix(target);
    const size_t n = marginals.size();
    if (target.size() != n)
        throw DomainError("map_correlation_matrix: matrix size does not match marginal count");

    struct Task {
        size_t i, j;
    };
    std::vector<Task> tasks;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) tasks.push_back({i, j});

    const auto solve_entry = [&](const Task& t) {
        MatrixEntryReport entry;
        entry.i = static_cast<int>(t.i);
        entry.j = static_cast<int>(t.j);
        entry.rho_x = target[t.i][t.j];
        try {
            if (opts.use_closed_form) {
                if (const auto match = match_closed_form(marginals[t.i], marginals[t.j])) {
                    entry.rho_z = closed_form(match->case_id, LinkDirection::XToZ, entry.rho_x,
                                              match->sigma1, match->sigma2);
                    entry.method = "closed_form";
                    return entry;
                }
                if (marginals[t.i].family() == MarginalFamily::Normal01 &&
                    marginals[t.j].family() == MarginalFamily::Normal01) {
                    entry.rho_z = entry.rho_x;
                    entry.method = "identity";
                    return entry;
                }
            }
            DegreeSelection sel = select_degree(marginals[t.i], marginals[t.j], opts.select);
            SolveReport rep = solve_rho_z(sel.poly, entry.rho_x);
            entry.rho_z = rep.rho_z;
            entry.degree = sel.poly.degree();
            entry.method = "polynomial";
            entry.warnings = rep.warnings;
            return entry;
        } catch (const InfeasibleTargetError& e) {
            std::ostringstream os;
            os << "entry (" << t.i << ", " << t.j << "): " << e.what();
            throw InfeasibleTargetError(os.str(), e.feasible_lo, e.feasible_hi);
        }
    };

    // Independent pairs; shard across a bounded worker pool and assemble by
    // index so output never depends on completion order.
    std::vector<MatrixEntryReport> entries(tasks.size());
    const unsigned workers =
        std::max(1u, opts.threads > 0 ? static_cast<unsigned>(opts.threads)
                                      : std::thread::hardware_concurrency());
    if (workers <= 1 || tasks.size() <= 1) {
        for (size_t k = 0; k < tasks.size(); ++k) entries[k] = solve_entry(tasks[k]);
    } else {
        std::vector<std::future<void>> slots;
        std::exception_ptr first_error;
        std::mutex error_mutex;
        std::atomic<size_t> next{0};
        for (unsigned w = 0; w < std::min<size_t>(workers, tasks.size()); ++w) {
            slots.push_back(std::async(std::launch::async, [&] {
                for (size_t k = next.fetch_add(1); k < tasks.size(); k = next.fetch_add(1)) {
                    try {
                        entries[k] = solve_entry(tasks[k]);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                    }
                }
            }));
        }
        for (auto& s : slots) s.get();
        if (first_error) std::rethrow_exception(first_error);
    }

    MatrixMapResult result;
    result.rho_z.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) result.rho_z[i][i] = 1.0;
    for (size_t k = 0; k < tasks.size(); ++k) {
        result.rho_z[tasks[k].i][tasks[k].j] = entries[k].rho_z;
        result.rho_z[tasks[k].j][tasks[k].i] = entries[k].rho_z;
    }
    result.entries = std::move(entries);

    if (opts.repair && !is_positive_definite(result.rho_z)) {
        RepairResult rep = clip_to_correlation(result.rho_z, opts.eig_floor);
        result.rho_z = std::move(rep.matrix);
        result.repaired = rep.changed;
        result.max_perturbation = rep.max_perturbation;
    }
    result.min_eigenvalue = symmetric_eigenvalues(result.rho_z).front();
    return result;
}

}  // namespace rhoz
