#pragma once

#include <array>
#include <functional>
#include <vector>

namespace lbdie::quad {

struct AdaptiveResult {
  double value = 0.0;
  bool converged = false;
  int max_depth_used = 0;
};

// Adaptive Simpson on [a, b] with absolute tolerance tol (plus a relative
// floor); converged=false if the depth cap was exhausted anywhere.
AdaptiveResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                double tol, int max_depth = 40);

// Gauss-Legendre nodes/weights on [-1, 1]; cached per n.
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int n);

// Nodes mapped to [a, b].
void gauss_on_interval(int n, double a, double b, std::vector<double>& x,
                       std::vector<double>& w);

// Product rule on the unit sphere: Gauss in cos(theta) x uniform in phi.
// Integrates spherical polynomials of low degree exactly; weights sum to 4 pi.
struct SphereRule {
  std::vector<std::array<double, 3>> dir;
  std::vector<double> w;
};
const SphereRule& sphere_rule(int n_theta, int n_phi);

}  // namespace lbdie::quad
