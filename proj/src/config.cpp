#include "lbdie/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace lbdie {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const char* where, std::initializer_list<const char*> known) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
  std::set<std::string> allowed(known.begin(), known.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
}

double as_number(const json& v, const char* what) {
  if (!v.is_number()) throw ConfigError(std::string(what) + ": expected a number");
  return v.get<double>();
}

int as_int(const json& v, const char* what, int lo, int hi) {
  if (!v.is_number_integer())
    throw ConfigError(std::string(what) + ": expected an integer");
  const int n = v.get<int>();
  if (n < lo || n > hi)
    throw ConfigError(std::string(what) + ": " + std::to_string(n) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return n;
}

std::string as_string(const json& v, const char* what) {
  if (!v.is_string()) throw ConfigError(std::string(what) + ": expected a string");
  return v.get<std::string>();
}

Eigen::Vector3d as_vec3(const json& v, const char* what) {
  if (!v.is_array() || v.size() != 3)
    throw ConfigError(std::string(what) + ": expected an array of 3 numbers");
  Eigen::Vector3d out;
  for (int i = 0; i < 3; ++i) out(i) = as_number(v[i], what);
  return out;
}

std::array<std::string, 3> as_expr3(const json& v, const char* what) {
  if (!v.is_array() || v.size() != 3)
    throw ConfigError(std::string(what) + ": expected an array of 3 expressions");
  std::array<std::string, 3> out;
  for (int i = 0; i < 3; ++i) out[i] = as_string(v[i], what);
  return out;
}

DomainSpec parse_domain(const json& j) {
  reject_unknown(j, "domain", {"kind", "lo", "hi"});
  DomainSpec d;
  if (j.contains("kind")) d.kind = as_string(j["kind"], "domain.kind");
  if (d.kind != "ball" && d.kind != "box")
    throw ConfigError("domain.kind: expected 'ball' or 'box', got '" + d.kind + "'");
  if (j.contains("lo")) d.lo = as_vec3(j["lo"], "domain.lo");
  if (j.contains("hi")) d.hi = as_vec3(j["hi"], "domain.hi");
  if (d.kind == "box" && !((d.hi - d.lo).array() > 0.0).all())
    throw ConfigError("domain: box requires hi > lo componentwise");
  return d;
}

CoefficientSpec parse_coefficient(const json& j) {
  reject_unknown(j, "coefficient", {"kind", "lambda", "mu", "c"});
  CoefficientSpec c;
  if (j.contains("kind")) c.kind = as_string(j["kind"], "coefficient.kind");
  if (c.kind != "laplace" && c.kind != "lame" && c.kind != "scalar")
    throw ConfigError("coefficient.kind: expected 'laplace', 'lame' or 'scalar', got '" +
                      c.kind + "'");
  if (j.contains("lambda")) c.lambda = as_number(j["lambda"], "coefficient.lambda");
  if (j.contains("mu")) {
    c.mu = as_number(j["mu"], "coefficient.mu");
    if (c.mu <= 0.0) throw ConfigError("coefficient.mu: must be positive");
  }
  if (j.contains("c")) c.c = as_string(j["c"], "coefficient.c");
  return c;
}

CutoffSpec parse_cutoff(const json& j) {
  reject_unknown(j, "cutoff", {"kind", "k", "eps"});
  CutoffSpec c;
  if (j.contains("kind")) c.kind = as_string(j["kind"], "cutoff.kind");
  if (c.kind != "chi1k" && c.kind != "chi2" && c.kind != "one")
    throw ConfigError("cutoff.kind: expected 'chi1k', 'chi2' or 'one', got '" + c.kind + "'");
  if (j.contains("k")) c.k = as_int(j["k"], "cutoff.k", 1, 12);
  if (j.contains("eps")) {
    c.eps = as_number(j["eps"], "cutoff.eps");
    if (c.eps <= 0.0) throw ConfigError("cutoff.eps: must be positive");
  }
  return c;
}

SolverSpec parse_solver(const json& j) {
  reject_unknown(j, "solver", {"tol", "restart", "max_iter"});
  SolverSpec s;
  if (j.contains("tol")) {
    s.tol = as_number(j["tol"], "solver.tol");
    if (s.tol <= 0.0 || s.tol >= 1.0) throw ConfigError("solver.tol: expected 0 < tol < 1");
  }
  if (j.contains("restart")) s.restart = as_int(j["restart"], "solver.restart", 1, 10000);
  if (j.contains("max_iter")) s.max_iter = as_int(j["max_iter"], "solver.max_iter", 1, 100000);
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, "config",
                 {"domain", "coefficient", "cutoff", "grid", "surface_level", "dirichlet",
                  "load", "solver", "output_dir", "seed"});
  RunConfig cfg;
  if (j.contains("domain")) cfg.domain = parse_domain(j["domain"]);
  if (j.contains("coefficient")) cfg.coefficient = parse_coefficient(j["coefficient"]);
  if (j.contains("cutoff")) cfg.cutoff = parse_cutoff(j["cutoff"]);
  if (j.contains("grid")) cfg.grid = as_int(j["grid"], "grid", 2, 128);
  if (j.contains("surface_level")) cfg.surface_level = as_int(j["surface_level"], "surface_level", 0, 6);
  if (j.contains("dirichlet")) cfg.dirichlet = as_expr3(j["dirichlet"], "dirichlet");
  if (j.contains("load")) cfg.load = as_expr3(j["load"], "load");
  if (j.contains("solver")) cfg.solver = parse_solver(j["solver"]);
  if (j.contains("output_dir")) cfg.output_dir = as_string(j["output_dir"], "output_dir");
  if (j.contains("seed")) cfg.seed = static_cast<unsigned>(as_int(j["seed"], "seed", 0, 1 << 30));
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

CoefficientPtr make_coefficient(const CoefficientSpec& spec) {
  if (spec.kind == "laplace") return make_laplace();
  if (spec.kind == "lame") return make_lame(spec.lambda, spec.mu);
  return make_scalar_coefficient(spec.c);
}

LocalizingFunction make_cutoff(const CutoffSpec& spec) {
  if (spec.kind == "chi1k") return make_chi1k(spec.k, spec.eps);
  if (spec.kind == "chi2") return make_chi2(spec.eps);
  return make_untruncated_one();
}

VolumeMesh make_volume_mesh(const RunConfig& cfg) {
  // Ball cells are clipped against the panel polyhedron, not the sphere, so
  // the volume and surface factories discretize the same domain.
  if (cfg.domain.kind == "ball")
    return build_ball_volume_matched(cfg.grid, build_ball_surface(cfg.surface_level));
  return build_box_volume(cfg.domain.lo, cfg.domain.hi, cfg.grid);
}

SurfaceMesh make_surface_mesh(const RunConfig& cfg) {
  if (cfg.domain.kind == "ball") return build_ball_surface(cfg.surface_level);
  // box surfaces triangulated at roughly the volume pitch, scaled by level
  const int n = std::max(1, cfg.grid >> std::max(0, 2 - cfg.surface_level));
  return build_box_surface(cfg.domain.lo, cfg.domain.hi, n);
}

}  // namespace lbdie
