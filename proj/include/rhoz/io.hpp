#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rhoz/link.hpp"
#include "rhoz/marginal.hpp"
#include "rhoz/matrix.hpp"
#include "rhoz/solve.hpp"

namespace rhoz {

/// A marginal pair plus one or more target correlations: the unit of CLI work.
struct PairSpec {
    Marginal marginal_i;
    Marginal marginal_j;
    std::vector<double> rho_x;  // may be empty when targets come from the command line
};

struct MatrixSpec {
    std::vector<Marginal> marginals;
    Matrix target;
};

/// Marginal spec objects look like
///   {"dist": "beta", "params": {"alpha": 2, "beta": 3}}
///   {"dist": "binomial", "params": {"n": 20, "p": 0.2}}
///   {"dist": "discrete", "support": [...], "probs": [...]}
///   {"dist": "uniform01" | "normal01" | "bernoulli_half"}
///   {"dist": "lognormal", "params": {"mu": 0, "sigma": 1}}
///   {"dist": "poisson", "params": {"lambda": 3}}
/// Parse failures throw DomainError with the offending field named.
Marginal parse_marginal(const nlohmann::json& j);

/// {"marginal_i": {...}, "marginal_j": {...}, "rho_x": 0.6 | [..]}
PairSpec parse_pair(const nlohmann::json& j);

/// {"marginals": [...], "R_X": [[...], ...]}
MatrixSpec parse_matrix(const nlohmann::json& j);

nlohmann::json link_to_json(const LinkPolynomial& p);
LinkPolynomial link_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const SolveReport& r);
nlohmann::json matrix_result_to_json(const MatrixMapResult& r);

/// Decimal with 10 significant digits, for CSV output.
std::string format_csv_value(double v);

}  // namespace rhoz
