#pragma once
// Machine-readable reports. JSON documents use the vendored nlohmann parser;
// doubles serialize at full round-trip precision and infinities become the
// strings "inf"/"-inf", so repeated runs with one seed emit identical bytes.

#include <string>

#include "json.hpp"

#include "recede/asymptotics.hpp"
#include "recede/conditions.hpp"
#include "recede/cones.hpp"
#include "recede/ext_real.hpp"
#include "recede/infinity_variational.hpp"
#include "recede/solver.hpp"
#include "recede/stability.hpp"

namespace recede {

nlohmann::json json_of(double v);
nlohmann::json json_of(const ExtReal& v);
nlohmann::json json_of(const Eigen::VectorXd& v);
nlohmann::json json_of(const Eigen::MatrixXd& m);  // array of row arrays
nlohmann::json json_of(const ConeRep& c);
nlohmann::json json_of(const Estimate& e);
nlohmann::json json_of(const CheckResult& r);
nlohmann::json json_of(const CoercivityReport& r);
nlohmann::json json_of(const InfNormalCone& n);
nlohmann::json json_of(const InfSubdiff& s);
nlohmann::json json_of(const SonCqReport& r);
nlohmann::json json_of(const SolCloud& s);
nlohmann::json json_of(const SolverResult& r);
nlohmann::json json_of(const PerturbRecord& r);
nlohmann::json json_of(const StabilityReport& r);
nlohmann::json json_of(const SemiDiag& d);
nlohmann::json json_of(const SharpReport& r);

// 2-space indent, trailing newline.
std::string dump_json(const nlohmann::json& j);

// Full-precision decimal text for CSV cells ("inf"/"-inf" for infinities).
std::string csv_num(double v);
std::string csv_num(const ExtReal& v);

// One row per grid record: u_1..u_n, norm_u, status, mu, sol_points,
// excess, deficiency.
std::string stability_csv(const StabilityReport& rep, const SemiDiag& diag);

// Window table: lo, hi, count, min_ratio — plot-ready ratio vs norm.
std::string sharp_csv(const SharpReport& rep);

}  // namespace recede
