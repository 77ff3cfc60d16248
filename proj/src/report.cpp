#include "recede/report.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace recede {
namespace {

nlohmann::json points_json(const std::vector<Eigen::VectorXd>& pts) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& p : pts) a.push_back(json_of(p));
  return a;
}

}  // namespace

nlohmann::json json_of(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

nlohmann::json json_of(const ExtReal& v) {
  if (v.is_plus_inf()) return "inf";
  if (v.is_minus_inf()) return "-inf";
  return json_of(v.raw());
}

nlohmann::json json_of(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(json_of(v[i]));
  return a;
}

nlohmann::json json_of(const Eigen::MatrixXd& m) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(json_of(Eigen::VectorXd(m.row(i))));
  return a;
}

nlohmann::json json_of(const ConeRep& c) {
  nlohmann::json j;
  j["kind"] = cone_kind_name(c.kind);
  j["dim"] = c.dim;
  switch (c.kind) {
    case ConeKind::polyhedral:
      j["halfspace_rows"] = json_of(c.A);
      break;
    case ConeKind::ray_union: {
      nlohmann::json pieces = nlohmann::json::array();
      for (const auto& piece : c.pieces) pieces.push_back(json_of(piece));
      j["pieces"] = pieces;
      break;
    }
    case ConeKind::sampled:
      j["dirs"] = points_json(c.dirs);
      j["resolution"] = json_of(c.resolution);
      break;
    default:
      break;
  }
  return j;
}

nlohmann::json json_of(const Estimate& e) {
  nlohmann::json j;
  j["value"] = json_of(e.value);
  j["method"] = e.method == EstimateMethod::closed ? "closed" : "sampled";
  switch (e.bound) {
    case BoundKind::exact: j["bound"] = "exact"; break;
    case BoundKind::lower: j["bound"] = "lower"; break;
    case BoundKind::upper: j["bound"] = "upper"; break;
    case BoundKind::interval: j["bound"] = "interval"; break;
  }
  j["lo"] = json_of(e.lo);
  j["hi"] = json_of(e.hi);
  nlohmann::json lv = nlohmann::json::array();
  for (double l : e.levels) lv.push_back(json_of(l));
  j["levels"] = lv;
  j["monotone"] = e.monotone;
  j["divergence_flag"] = e.divergence_flag;
  return j;
}

nlohmann::json json_of(const CheckResult& r) {
  nlohmann::json j;
  j["verdict"] = verdict_name(r.verdict);
  j["exact_mode"] = r.exact_mode;
  j["witness_dir"] = r.witness_dir ? json_of(*r.witness_dir) : nlohmann::json();
  j["witness_value"] = r.witness_value ? json_of(*r.witness_value) : nlohmann::json();
  j["margin"] = r.margin ? json_of(*r.margin) : nlohmann::json();
  j["note"] = r.note;
  return j;
}

nlohmann::json json_of(const CoercivityReport& r) {
  nlohmann::json j;
  j["verdict"] = coercivity_verdict_name(r.verdict);
  j["vacuous"] = r.vacuous;
  j["reference_level"] = json_of(r.reference_level);
  nlohmann::json rays = nlohmann::json::array();
  for (const auto& ray : r.rays) {
    nlohmann::json rj;
    rj["anchor"] = json_of(ray.anchor);
    rj["dir"] = json_of(ray.dir);
    nlohmann::json vals = nlohmann::json::array();
    for (double v : ray.values) vals.push_back(json_of(v));
    rj["values"] = vals;
    rays.push_back(rj);
  }
  j["rays"] = rays;
  j["note"] = r.note;
  return j;
}

nlohmann::json json_of(const InfNormalCone& n) {
  nlohmann::json j;
  j["dim"] = n.dim;
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& piece : n.pieces) pieces.push_back(json_of(piece));
  j["pieces"] = pieces;
  return j;
}

nlohmann::json json_of(const InfSubdiff& s) {
  nlohmann::json j;
  j["dim"] = s.dim;
  j["points"] = points_json(s.points);
  j["unbounded_rays"] = points_json(s.unbounded_rays);
  j["cap_g"] = json_of(s.cap_g);
  j["exact"] = s.exact;
  return j;
}

nlohmann::json json_of(const SonCqReport& r) {
  nlohmann::json j;
  j["verdict"] = verdict_name(r.verdict);
  j["delta"] = json_of(r.delta);
  j["exact_mode"] = r.exact_mode;
  j["arg_g"] = json_of(r.arg_g);
  j["arg_nu"] = json_of(r.arg_nu);
  j["normal_cone"] = json_of(r.ncone);
  j["subdiff"] = json_of(r.subdiff);
  j["note"] = r.note;
  return j;
}

nlohmann::json json_of(const SolCloud& s) {
  nlohmann::json j;
  j["points"] = points_json(s.points);
  j["hull_flag"] = s.hull_flag;
  j["cluster_radius"] = json_of(s.cluster_radius);
  j["unbounded_dir"] = s.unbounded_dir ? json_of(*s.unbounded_dir) : nlohmann::json();
  return j;
}

nlohmann::json json_of(const SolverResult& r) {
  nlohmann::json j;
  j["status"] = solve_status_name(r.status);
  j["f_star"] = json_of(r.f_star);
  j["sol"] = json_of(r.sol);
  j["certificate"] = r.certificate ? json_of(*r.certificate) : nlohmann::json();
  j["exact_mode"] = r.exact_mode;
  j["note"] = r.note;
  return j;
}

nlohmann::json json_of(const PerturbRecord& r) {
  nlohmann::json j;
  j["ring"] = r.ring;
  j["ray"] = r.ray;
  j["u"] = json_of(r.u);
  j["norm_u"] = json_of(r.norm_u);
  j["status"] = solve_status_name(r.status);
  j["mu"] = json_of(r.mu);
  j["sol"] = json_of(r.sol);
  return j;
}

nlohmann::json json_of(const StabilityReport& r) {
  nlohmann::json j;
  j["epsilon"] = json_of(r.epsilon);
  j["rings"] = r.rings;
  j["rays"] = r.rays;
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& rec : r.records) recs.push_back(json_of(rec));
  j["records"] = recs;
  return j;
}

nlohmann::json json_of(const SemiDiag& d) {
  nlohmann::json j;
  j["solset_outer"] = d.solset_outer;
  j["solset_usc"] = d.solset_usc;
  j["solset_lsc"] = d.solset_lsc;
  j["value_usc"] = d.value_usc;
  j["value_lsc"] = d.value_lsc;
  j["inner_excess"] = json_of(d.inner_excess);
  j["inner_deficiency"] = json_of(d.inner_deficiency);
  j["value_gap_up"] = json_of(d.value_gap_up);
  j["value_gap_down"] = json_of(d.value_gap_down);
  nlohmann::json em = nlohmann::json::array();
  for (double v : d.excess_medians) em.push_back(json_of(v));
  j["excess_medians"] = em;
  nlohmann::json dm = nlohmann::json::array();
  for (double v : d.deficiency_medians) dm.push_back(json_of(v));
  j["deficiency_medians"] = dm;
  j["skipped_records"] = d.skipped_records;
  j["note"] = d.note;
  return j;
}

nlohmann::json json_of(const SharpReport& r) {
  nlohmann::json j;
  j["verdict"] = sharp_verdict_name(r.verdict);
  j["R"] = json_of(r.radius);
  j["r_max"] = json_of(r.r_max);
  j["c_emp"] = json_of(r.c_emp);
  j["accepted"] = r.accepted;
  j["witness"] = r.arg_x.size() ? json_of(r.arg_x) : nlohmann::json();
  nlohmann::json wins = nlohmann::json::array();
  for (const auto& w : r.windows) {
    nlohmann::json wj;
    wj["lo"] = json_of(w.lo);
    wj["hi"] = json_of(w.hi);
    wj["count"] = w.count;
    wj["min_ratio"] = w.count > 0 ? json_of(w.min_ratio) : nlohmann::json();
    wins.push_back(wj);
  }
  j["windows"] = wins;
  j["fit_exponent"] = json_of(r.fit_exponent);
  j["fit_scale"] = json_of(r.fit_scale);
  j["note"] = r.note;
  return j;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string csv_num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

std::string csv_num(const ExtReal& v) {
  if (v.is_plus_inf()) return "inf";
  if (v.is_minus_inf()) return "-inf";
  return csv_num(v.raw());
}

std::string stability_csv(const StabilityReport& rep, const SemiDiag& diag) {
  std::ostringstream os;
  const int n = rep.base.u.size() ? static_cast<int>(rep.base.u.size()) : 0;
  for (int i = 0; i < n; ++i) os << "u_" << (i + 1) << ",";
  os << "norm_u,status,mu,sol_points,excess,deficiency\n";
  for (std::size_t k = 0; k < rep.records.size(); ++k) {
    const PerturbRecord& r = rep.records[k];
    for (int i = 0; i < n; ++i) os << csv_num(r.u[i]) << ",";
    std::string pts = points_json(r.sol.points).dump();
    std::string quoted;
    for (char ch : pts) {  // CSV-escape embedded quotes
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    os << csv_num(r.norm_u) << "," << solve_status_name(r.status) << "," << csv_num(r.mu) << ","
       << "\"" << quoted << "\"";
    if (k < diag.rows.size() && !diag.rows[k].skipped)
      os << "," << csv_num(diag.rows[k].excess) << "," << csv_num(diag.rows[k].deficiency);
    else
      os << ",,";
    os << "\n";
  }
  return os.str();
}

std::string sharp_csv(const SharpReport& rep) {
  std::ostringstream os;
  os << "lo,hi,count,min_ratio\n";
  for (const auto& w : rep.windows) {
    os << csv_num(w.lo) << "," << csv_num(w.hi) << "," << w.count << ",";
    if (w.count > 0) os << csv_num(w.min_ratio);
    os << "\n";
  }
  return os.str();
}

}  // namespace recede
