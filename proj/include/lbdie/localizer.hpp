#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace lbdie {

// Radial cut-off function chi(x) = profile(|x|), supported in |x| < eps.
// The profile and its first two derivatives are exposed for kernel assembly;
// outside the support all three are exactly zero.
struct LocalizingFunction {
  std::string name;
  double eps = 1.0;  // support radius, may be +infinity
  int smoothness_order = 1;
  bool nonneg = false;
  bool nonincreasing = false;
  bool one_at_zero = false;

  std::function<double(double)> profile;    // chi(rho)
  std::function<double(double)> dprofile;   // chi'(rho)
  std::function<double(double)> d2profile;  // chi''(rho)

  double chi(double r) const { return r < eps ? profile(r) : 0.0; }
  double dchi(double r) const { return r < eps ? dprofile(r) : 0.0; }
  double d2chi(double r) const { return r < eps ? d2profile(r) : 0.0; }
  bool truncated() const { return std::isfinite(eps); }
};

// (1 - rho/eps)^k on [0, eps).
LocalizingFunction make_chi1k(int k, double eps);

// exp(rho^2 / (rho^2 - eps^2)) on [0, eps).
LocalizingFunction make_chi2(double eps);

// chi == 1 everywhere (no truncation). Test harness for classical kernels.
LocalizingFunction make_untruncated_one();

// Profile given as an expression in r; derivatives are symbolic.
// Property flags are sampled on a dense grid of the support.
LocalizingFunction make_custom(const std::string& profile_expr, double eps, int k);

// sigma(omega) = (1/omega) * int_0^inf profile(rho) sin(rho omega) d rho,
// sigma(0) = int_0^inf rho profile(rho) d rho.
struct SigmaCertificate {
  std::vector<double> omega;
  std::vector<double> sigma;
  double sigma_at_zero = 0.0;
  double min_sigma = 0.0;
  bool positive = false;
  bool converged = false;  // all quadratures met tolerance
};

SigmaCertificate sigma_certificate(const LocalizingFunction& chi, double omega_max = 100.0,
                                   int n_samples = 1000, double tol = 1e-12);

// Falsifiable numeric membership check for the cut-off classes: weak
// derivatives up to order k integrable, rho * profile integrable; the plus
// class additionally requires profile(0) = 1 and a positive sigma sweep.
struct Classification {
  bool in_Xk = false;
  bool in_Xk_plus = false;
  int order_checked = 0;
  std::string diagnostics;
};

Classification classify(const LocalizingFunction& chi, int k, double omega_max = 100.0);

}  // namespace lbdie
