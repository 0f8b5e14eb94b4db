#pragma once

// JSON run configuration. Every key is optional with the defaults below;
// unknown keys are rejected so typos fail loudly instead of silently running
// the default. Schema violations throw ConfigError, which the CLI maps to
// exit code 2.

#include <array>
#include <stdexcept>
#include <string>

#include "lbdie/coefficients.hpp"
#include "lbdie/geometry.hpp"
#include "lbdie/localizer.hpp"

namespace lbdie {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DomainSpec {
  std::string kind = "ball";  // "ball" | "box"
  Eigen::Vector3d lo = Eigen::Vector3d(-1, -1, -1);
  Eigen::Vector3d hi = Eigen::Vector3d(1, 1, 1);
};

struct CoefficientSpec {
  std::string kind = "laplace";  // "laplace" | "lame" | "scalar"
  double lambda = 2.0, mu = 1.0;
  std::string c = "1";
};

struct CutoffSpec {
  std::string kind = "chi1k";  // "chi1k" | "chi2" | "one"
  int k = 3;
  double eps = 1.0;
};

struct SolverSpec {
  double tol = 1e-8;
  int restart = 120;
  int max_iter = 500;
};

struct RunConfig {
  DomainSpec domain;
  CoefficientSpec coefficient;
  CutoffSpec cutoff;
  int grid = 8;
  int surface_level = 1;
  std::array<std::string, 3> dirichlet = {"0", "0", "0"};
  std::array<std::string, 3> load = {"0", "0", "0"};
  SolverSpec solver;
  std::string output_dir = ".";
  unsigned seed = 0;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// Spec-to-object factories shared by the CLI subcommands.
CoefficientPtr make_coefficient(const CoefficientSpec& spec);
LocalizingFunction make_cutoff(const CutoffSpec& spec);
VolumeMesh make_volume_mesh(const RunConfig& cfg);
SurfaceMesh make_surface_mesh(const RunConfig& cfg);

}  // namespace lbdie
