#include "recede/parse.hpp"

#include <json.hpp>
#include <limits>
#include <set>

namespace recede {
namespace {

using nlohmann::json;
const double kInf = std::numeric_limits<double>::infinity();

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      fail(ErrorCode::parse_error, where + ": unknown key \"" + it.key() + "\"");
}

const json& require(const json& obj, const std::string& where, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorCode::parse_error, where + ": missing key \"" + key + "\"");
  return *it;
}

double parse_real(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  fail(ErrorCode::parse_error, where + ": expected number or \"inf\"/\"-inf\"");
}

Eigen::VectorXd parse_vector(const json& v, const std::string& where) {
  if (!v.is_array()) fail(ErrorCode::parse_error, where + ": expected array");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<int>(i)] = parse_real(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

Eigen::MatrixXd parse_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(ErrorCode::parse_error, where + ": expected nonempty 2d array");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  Eigen::MatrixXd out(v.size(), cols);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || v[i].size() != cols)
      fail(ErrorCode::parse_error, where + ": ragged rows");
    for (std::size_t j = 0; j < cols; ++j)
      out(static_cast<int>(i), static_cast<int>(j)) =
          parse_real(v[i][j], where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  return out;
}

int parse_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(ErrorCode::parse_error, where + ": expected integer");
  return v.get<int>();
}

FunctionModel parse_function(const json& obj, int dim, std::vector<std::string>* warnings,
                             const std::string& where) {
  if (!obj.is_object()) fail(ErrorCode::parse_error, where + ": expected object");
  std::string kind = require(obj, where, "kind").get<std::string>();
  if (kind == "affine") {
    require_keys(obj, where, {"kind", "c", "beta"});
    Eigen::VectorXd c = parse_vector(require(obj, where, "c"), where + ".c");
    double beta = obj.contains("beta") ? parse_real(obj["beta"], where + ".beta") : 0.0;
    return make_affine(c, beta);
  }
  if (kind == "quadratic") {
    require_keys(obj, where, {"kind", "Q", "c", "beta"});
    Eigen::MatrixXd q = parse_matrix(require(obj, where, "Q"), where + ".Q");
    Eigen::VectorXd c = obj.contains("c") ? parse_vector(obj["c"], where + ".c")
                                          : Eigen::VectorXd::Zero(q.rows()).eval();
    double beta = obj.contains("beta") ? parse_real(obj["beta"], where + ".beta") : 0.0;
    bool asym = false;
    FunctionModel f = make_quadratic(q, c, beta, &asym);
    if (asym && warnings) warnings->push_back(where + ".Q: asymmetric input symmetrized to (Q+Q')/2");
    return f;
  }
  if (kind == "pnorm") {
    require_keys(obj, where, {"kind", "p"});
    double p = obj.contains("p") ? parse_real(obj["p"], where + ".p") : 2.0;
    return make_pnorm(dim, p);
  }
  if (kind == "sqrt_abs") {
    require_keys(obj, where, {"kind"});
    return make_sqrt_abs(dim);
  }
  if (kind == "rational_squash") {
    require_keys(obj, where, {"kind"});
    return make_rational_squash(dim);
  }
  if (kind == "cap_abs") {
    require_keys(obj, where, {"kind"});
    return make_cap_abs(dim);
  }
  if (kind == "plus_sqrt") {
    require_keys(obj, where, {"kind"});
    return make_plus_sqrt(dim);
  }
  if (kind == "tilt") {
    require_keys(obj, where, {"kind", "base", "u"});
    FunctionModel base = parse_function(require(obj, where, "base"), dim, warnings, where + ".base");
    Eigen::VectorXd u = parse_vector(require(obj, where, "u"), where + ".u");
    return make_tilt(std::move(base), u);
  }
  if (kind == "blackbox")
    fail(ErrorCode::validation_error, where + ": blackbox has no document form");
  fail(ErrorCode::parse_error, where + ": unknown function kind \"" + kind + "\"");
}

SetModel parse_set(const json& obj, const std::string& where) {
  if (!obj.is_object()) fail(ErrorCode::parse_error, where + ": expected object");
  std::string kind = require(obj, where, "kind").get<std::string>();
  if (kind == "whole_space") {
    require_keys(obj, where, {"kind", "n"});
    return make_whole_space(obj.contains("n") ? parse_int(obj["n"], where + ".n") : 0);
  }
  if (kind == "box") {
    require_keys(obj, where, {"kind", "lo", "hi"});
    return make_box(parse_vector(require(obj, where, "lo"), where + ".lo"),
                    parse_vector(require(obj, where, "hi"), where + ".hi"));
  }
  if (kind == "ball") {
    require_keys(obj, where, {"kind", "center", "radius"});
    return make_ball(parse_vector(require(obj, where, "center"), where + ".center"),
                     parse_real(require(obj, where, "radius"), where + ".radius"));
  }
  if (kind == "polyhedron") {
    require_keys(obj, where, {"kind", "A", "b"});
    return make_polyhedron(parse_matrix(require(obj, where, "A"), where + ".A"),
                           parse_vector(require(obj, where, "b"), where + ".b"));
  }
  if (kind == "union") {
    require_keys(obj, where, {"kind", "members"});
    const json& members = require(obj, where, "members");
    if (!members.is_array()) fail(ErrorCode::parse_error, where + ".members: expected array");
    std::vector<SetModel> sets;
    for (std::size_t i = 0; i < members.size(); ++i)
      sets.push_back(parse_set(members[i], where + ".members[" + std::to_string(i) + "]"));
    return make_union(std::move(sets));
  }
  fail(ErrorCode::parse_error, where + ": unknown set kind \"" + kind + "\"");
}

json real_to_json(double v) {
  if (v == kInf) return json("inf");
  if (v == -kInf) return json("-inf");
  return json(v);
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(real_to_json(v[i]));
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(real_to_json(m(i, j)));
    out.push_back(row);
  }
  return out;
}

json function_to_json(const FunctionModel& f) {
  json out;
  out["kind"] = function_kind_name(f.kind);
  switch (f.kind) {
    case FunctionKind::affine:
      out["c"] = vector_to_json(f.c);
      out["beta"] = f.beta;
      break;
    case FunctionKind::quadratic:
      out["Q"] = matrix_to_json(f.Q);
      out["c"] = vector_to_json(f.c);
      out["beta"] = f.beta;
      break;
    case FunctionKind::pnorm:
      out["p"] = f.p;
      break;
    case FunctionKind::tilt:
      out["base"] = function_to_json(*f.base);
      out["u"] = vector_to_json(f.u);
      break;
    case FunctionKind::blackbox:
      fail(ErrorCode::validation_error, "serialize: blackbox has no document form");
    default:
      break;
  }
  return out;
}

json set_to_json(const SetModel& s) {
  json out;
  out["kind"] = set_kind_name(s.kind);
  switch (s.kind) {
    case SetKind::whole_space:
      out["n"] = s.dim;
      break;
    case SetKind::box:
      out["lo"] = vector_to_json(s.lo);
      out["hi"] = vector_to_json(s.hi);
      break;
    case SetKind::ball:
      out["center"] = vector_to_json(s.center);
      out["radius"] = s.radius;
      break;
    case SetKind::polyhedron:
      out["A"] = matrix_to_json(s.A);
      out["b"] = vector_to_json(s.b);
      break;
    case SetKind::union_of: {
      json members = json::array();
      for (const auto& m : s.members) members.push_back(set_to_json(m));
      out["members"] = members;
      break;
    }
  }
  return out;
}

}  // namespace

ProblemSpec parse_problem(const std::string& text, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse_error, std::string("document: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::parse_error, "document: expected JSON object");
  require_keys(doc, "document", {"dimension", "function", "set", "flags", "options"});

  ProblemSpec p;
  p.dimension = parse_int(require(doc, "document", "dimension"), "dimension");
  if (p.dimension < 1) fail(ErrorCode::validation_error, "dimension: must be >= 1");
  p.f = parse_function(require(doc, "document", "function"), p.dimension, warnings, "function");
  p.set = parse_set(require(doc, "document", "set"), "set");
  if (p.set.kind == SetKind::whole_space && p.set.dim == 0) p.set.dim = p.dimension;

  if (doc.contains("flags")) {
    const json& flags = doc["flags"];
    require_keys(flags, "flags", {"convex", "quasiconvex"});
    if (flags.contains("convex") && flags["convex"].get<bool>() != p.f.flags.convex)
      fail(ErrorCode::validation_error, "flags.convex contradicts the declared kind");
    if (flags.contains("quasiconvex") && flags["quasiconvex"].get<bool>() != p.f.flags.quasiconvex)
      fail(ErrorCode::validation_error, "flags.quasiconvex contradicts the declared kind");
  }
  if (doc.contains("options")) {
    const json& opt = doc["options"];
    require_keys(opt, "options", {"seed", "t_min", "t_max", "samples"});
    if (opt.contains("seed")) p.options.seed = static_cast<std::uint64_t>(parse_int(opt["seed"], "options.seed"));
    if (opt.contains("t_min")) p.options.t_min = parse_real(opt["t_min"], "options.t_min");
    if (opt.contains("t_max")) p.options.t_max = parse_real(opt["t_max"], "options.t_max");
    if (opt.contains("samples")) p.options.samples = parse_int(opt["samples"], "options.samples");
  }
  validate(p);
  return p;
}

std::string serialize_problem(const ProblemSpec& p) {
  json doc;
  doc["dimension"] = p.dimension;
  doc["function"] = function_to_json(p.f);
  doc["set"] = set_to_json(p.set);
  doc["options"] = {{"seed", p.options.seed},
                    {"t_min", p.options.t_min},
                    {"t_max", p.options.t_max},
                    {"samples", p.options.samples}};
  return doc.dump(2);
}

}  // namespace recede
