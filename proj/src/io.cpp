#include "rhoz/io.hpp"

#include <cmath>
#include <cstdio>

#include "rhoz/errors.hpp"

namespace rhoz {

namespace {

using nlohmann::json;

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw DomainError(std::string("marginal spec: missing numeric field '") + key + "'");
    return j[key].get<double>();
}

}  // namespace

Marginal parse_marginal(const json& j) {
    if (!j.is_object() || !j.contains("dist") || !j["dist"].is_string())
        throw DomainError("marginal spec: expected an object with a 'dist' string");
    const std::string dist = j["dist"].get<std::string>();
    const json params = j.value("params", json::object());

    if (dist == "uniform01") return Marginal::uniform01();
    if (dist == "normal01") return Marginal::normal01();
    if (dist == "bernoulli_half") return Marginal::bernoulli_half();
    if (dist == "lognormal")
        return Marginal::lognormal(params.value("mu", 0.0), params.value("sigma", 1.0));
    if (dist == "beta")
        return Marginal::beta(require_number(params, "alpha"), require_number(params, "beta"));
    if (dist == "binomial")
        return Marginal::binomial(static_cast<int>(require_number(params, "n")),
                                  require_number(params, "p"));
    if (dist == "poisson") return Marginal::poisson(require_number(params, "lambda"));
    if (dist == "discrete") {
        if (!j.contains("support") || !j.contains("probs"))
            throw DomainError("marginal spec: discrete needs 'support' and 'probs' arrays");
        return Marginal::discrete(j.value("name", std::string("discrete")),
                                  j["support"].get<std::vector<double>>(),
                                  j["probs"].get<std::vector<double>>());
    }
    throw DomainError("marginal spec: unknown dist '" + dist + "'");
}

PairSpec parse_pair(const json& j) {
    if (!j.is_object() || !j.contains("marginal_i") || !j.contains("marginal_j"))
        throw DomainError("pair spec: need 'marginal_i' and 'marginal_j'");
    PairSpec spec{parse_marginal(j["marginal_i"]), parse_marginal(j["marginal_j"]), {}};
    if (j.contains("rho_x")) {
        if (j["rho_x"].is_array())
            spec.rho_x = j["rho_x"].get<std::vector<double>>();
        else if (j["rho_x"].is_number())
            spec.rho_x.push_back(j["rho_x"].get<double>());
        else
            throw DomainError("pair spec: 'rho_x' must be a number or an array");
    }
    for (double r : spec.rho_x)
        if (std::isnan(r) || std::fabs(r) > 1.0)
            throw DomainError("pair spec: rho_x entries must lie in [-1, 1]");
    return spec;
}

MatrixSpec parse_matrix(const json& j) {
    if (!j.is_object() || !j.contains("marginals") || !j.contains("R_X"))
        throw DomainError("matrix spec: need 'marginals' and 'R_X'");
    MatrixSpec spec;
    for (const json& m : j["marginals"]) spec.marginals.push_back(parse_marginal(m));
    spec.target = j["R_X"].get<Matrix>();
    validate_correlation_matrix(spec.target);
    if (spec.target.size() != spec.marginals.size())
        throw DomainError("matrix spec: R_X size does not match the marginal count");
    return spec;
}

json link_to_json(const LinkPolynomial& p) {
    json j;
    j["coefficients"] = p.b;  // ascending power order
    j["degree"] = p.degree();
    switch (p.route) {
        case LinkRoute::ContinuousContinuous: j["route"] = "continuous"; break;
        case LinkRoute::DiscreteDiscrete: j["route"] = "discrete"; break;
        case LinkRoute::Mixed: j["route"] = "mixed"; break;
        case LinkRoute::ClosedForm: j["route"] = "closed_form"; break;
    }
    j["marginals"] = {p.meta.label_i, p.meta.label_j};
    j["warnings"] = p.meta.warnings;
    return j;
}

LinkPolynomial link_from_json(const json& j) {
    LinkPolynomial p;
    p.b = j.at("coefficients").get<std::vector<double>>();
    if (p.b.empty()) throw DomainError("link: empty coefficient list");
    const std::string route = j.value("route", "continuous");
    if (route == "discrete")
        p.route = LinkRoute::DiscreteDiscrete;
    else if (route == "mixed")
        p.route = LinkRoute::Mixed;
    else if (route == "closed_form")
        p.route = LinkRoute::ClosedForm;
    if (j.contains("marginals") && j["marginals"].is_array() && j["marginals"].size() == 2) {
        p.meta.label_i = j["marginals"][0].get<std::string>();
        p.meta.label_j = j["marginals"][1].get<std::string>();
    }
    if (j.contains("warnings")) p.meta.warnings = j["warnings"].get<std::vector<std::string>>();
    return p;
}

json report_to_json(const SolveReport& r) {
    json j;
    j["rho_z"] = r.rho_z;
    j["residual"] = r.residual;
    j["feasible_range"] = {r.feasible_range.first, r.feasible_range.second};
    j["method"] = r.method == SolveMethod::ClosedForm ? "closed_form" : "polynomial";
    j["warnings"] = r.warnings;
    return j;
}

json matrix_result_to_json(const MatrixMapResult& r) {
    json j;
    j["R_Z"] = r.rho_z;
    j["repaired"] = r.repaired;
    j["max_perturbation"] = r.max_perturbation;
    j["min_eigenvalue"] = r.min_eigenvalue;
    json entries = json::array();
    for (const MatrixEntryReport& e : r.entries) {
        json je;
        je["i"] = e.i;
        je["j"] = e.j;
        je["rho_x"] = e.rho_x;
        je["rho_z"] = e.rho_z;
        je["method"] = e.method;
        if (e.degree > 0) je["degree"] = e.degree;
        if (!e.warnings.empty()) je["warnings"] = e.warnings;
        entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    return j;
}

std::string format_csv_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace rhoz
