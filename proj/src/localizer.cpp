#include "lbdie/localizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lbdie/expr.hpp"
#include "lbdie/quadrature.hpp"

namespace lbdie {

namespace {

// Integration cap for profiles without compact support.
double truncation_radius(const LocalizingFunction& chi, bool& capped) {
  capped = false;
  if (chi.truncated()) return chi.eps;
  double R = 1.0;
  while (R < 1e6) {
    if (std::abs(chi.chi(R)) * R * R < 1e-14) return R;
    R *= 2.0;
  }
  capped = true;
  return R;
}

}  // namespace

LocalizingFunction make_chi1k(int k, double eps) {
  LocalizingFunction f;
  f.name = "chi1" + std::to_string(k);
  f.eps = eps;
  f.smoothness_order = k;
  f.nonneg = f.nonincreasing = f.one_at_zero = true;
  double kk = k;
  f.profile = [kk, eps](double r) { return std::pow(1.0 - r / eps, kk); };
  f.dprofile = [kk, eps](double r) { return -kk / eps * std::pow(1.0 - r / eps, kk - 1.0); };
  f.d2profile = [kk, eps](double r) {
    return kk * (kk - 1.0) / (eps * eps) * std::pow(1.0 - r / eps, kk - 2.0);
  };
  return f;
}

LocalizingFunction make_chi2(double eps) {
  LocalizingFunction f;
  f.name = "chi2";
  f.eps = eps;
  f.smoothness_order = 99;  // smooth with all derivatives vanishing at eps
  f.nonneg = f.nonincreasing = f.one_at_zero = true;
  double e2 = eps * eps;
  f.profile = [e2](double r) { return std::exp(r * r / (r * r - e2)); };
  // The exponential underflows to zero just inside the support edge while the
  // rational factors blow up; order the product so it stays zero there.
  f.dprofile = [e2](double r) {
    double d = r * r - e2;
    double e = std::exp(r * r / d);
    return e == 0.0 ? 0.0 : e * (-2.0 * r * e2 / (d * d));
  };
  f.d2profile = [e2](double r) {
    double d = r * r - e2;
    double e = std::exp(r * r / d);
    if (e == 0.0) return 0.0;
    double g1 = -2.0 * r * e2 / (d * d);
    double g2 = 2.0 * e2 * (3.0 * r * r + e2) / (d * d * d);
    return e * (g1 * g1 + g2);
  };
  return f;
}

LocalizingFunction make_untruncated_one() {
  LocalizingFunction f;
  f.name = "one";
  f.eps = std::numeric_limits<double>::infinity();
  f.smoothness_order = 99;
  f.nonneg = f.one_at_zero = true;
  f.nonincreasing = true;
  f.profile = [](double) { return 1.0; };
  f.dprofile = [](double) { return 0.0; };
  f.d2profile = [](double) { return 0.0; };
  return f;
}

LocalizingFunction make_custom(const std::string& profile_expr, double eps, int k) {
  LocalizingFunction f;
  f.name = "custom";
  f.eps = eps;
  f.smoothness_order = k;
  expr::Ast ast = expr::parse(profile_expr);
  expr::Ast d1 = expr::derivative(ast, expr::Var::R);
  expr::Ast d2 = expr::derivative(d1, expr::Var::R);
  f.profile = [ast](double r) { return expr::evaluate_radial(ast, r); };
  f.dprofile = [d1](double r) { return expr::evaluate_radial(d1, r); };
  f.d2profile = [d2](double r) { return expr::evaluate_radial(d2, r); };

  // Sample declared properties on a dense grid.
  double R = std::isfinite(eps) ? eps : 64.0;
  int n = 4096;
  bool nonneg = true, noninc = true;
  double prev = f.chi(0.0);
  for (int i = 1; i <= n; ++i) {
    double v = f.chi(R * i / n * (1.0 - 1e-12));
    if (v < -1e-14) nonneg = false;
    if (v > prev + 1e-12) noninc = false;
    prev = v;
  }
  f.nonneg = nonneg;
  f.nonincreasing = noninc;
  f.one_at_zero = std::abs(f.chi(0.0) - 1.0) < 1e-12;
  return f;
}

SigmaCertificate sigma_certificate(const LocalizingFunction& chi, double omega_max,
                                   int n_samples, double tol) {
  SigmaCertificate cert;
  bool capped = false;
  double R = truncation_radius(chi, capped);
  bool all_ok = !capped;

  {
    auto moment = [&](double rho) { return rho * chi.chi(rho); };
    auto res = quad::adaptive_simpson(moment, 0.0, R, tol);
    cert.sigma_at_zero = res.value;
    all_ok = all_ok && res.converged;
  }

  cert.omega.resize(n_samples);
  cert.sigma.resize(n_samples);
  cert.min_sigma = cert.sigma_at_zero;
  for (int i = 0; i < n_samples; ++i) {
    double w = omega_max * (i + 1) / n_samples;
    auto integrand = [&](double rho) { return chi.chi(rho) * std::sin(rho * w); };
    // integrate half-period chunks so the oscillation cannot alias the
    // adaptive error estimate
    int chunks = std::max(1, static_cast<int>(std::ceil(w * R / M_PI)));
    double value = 0.0;
    for (int c = 0; c < chunks; ++c) {
      auto res =
          quad::adaptive_simpson(integrand, R * c / chunks, R * (c + 1) / chunks, tol / chunks);
      all_ok = all_ok && res.converged;
      value += res.value;
    }
    cert.omega[i] = w;
    cert.sigma[i] = value / w;
    cert.min_sigma = std::min(cert.min_sigma, cert.sigma[i]);
  }
  cert.positive = cert.min_sigma > 0.0;
  cert.converged = all_ok;
  return cert;
}

Classification classify(const LocalizingFunction& chi, int k, double omega_max) {
  Classification cls;
  std::ostringstream diag;
  bool capped = false;
  double R = truncation_radius(chi, capped);

  // rho * profile and profile itself must be absolutely integrable. For
  // untruncated profiles, compare growing truncations of the integral.
  bool moment_ok = true;
  if (chi.truncated()) {
    auto m = quad::adaptive_simpson([&](double r) { return std::abs(r * chi.chi(r)); }, 0.0, R,
                                    1e-10);
    moment_ok = m.converged;
  } else {
    double prev = 0.0;
    double Rt = 1.0;
    for (int lvl = 0; lvl < 14 && Rt <= R; ++lvl, Rt *= 2.0) {
      auto m = quad::adaptive_simpson([&](double r) { return std::abs(r * chi.chi(r)); }, 0.0,
                                      Rt, 1e-10);
      if (lvl > 6 && std::abs(m.value - prev) > 1e-8 * std::max(1.0, std::abs(m.value)))
        moment_ok = false;
      prev = m.value;
    }
    if (capped) moment_ok = false;
  }
  if (!moment_ok) diag << "rho*chi not integrable on (0,inf); ";

  // Weak derivatives up to order k: iterated finite differences on three
  // dyadic grids. The mass m = h * sup |FD_j| tends to zero when chi^(j) is a
  // bounded function, but stays at the jump size of chi^(j-1) when chi^(j)
  // contains a delta. The grid extends past the support edge so a
  // discontinuity there is visible. Orders above 4 are not probed: the
  // stencils stop resolving the profiles' boundary layers.
  double Rgrid = chi.truncated() ? 1.25 * chi.eps : R;
  int order_cap = std::min(k, 4);
  cls.order_checked = order_cap;
  if (k > order_cap) diag << "orders above " << order_cap << " not probed; ";
  bool derivs_ok = true;
  for (int j = 1; j <= order_cap && derivs_ok; ++j) {
    double mass[3] = {0, 0, 0};
    for (int lvl = 0; lvl < 3; ++lvl) {
      int n = std::max(256, 4096 >> j) << lvl;
      double h = Rgrid / n;
      std::vector<double> v(n + 1);
      for (int i = 0; i <= n; ++i) v[i] = chi.chi(i * h);
      for (int d = 0; d < j; ++d)
        for (int i = 0; i + 1 < static_cast<int>(v.size()); ++i) v[i] = (v[i + 1] - v[i]) / h;
      v.resize(v.size() - j);
      double sup = 0.0;
      for (double t : v) sup = std::max(sup, std::abs(t));
      mass[lvl] = sup * h;
    }
    // bounded chi^(j): mass[2]/mass[0] ~ 1/4; delta: ratio in [1/2, 2]
    if (mass[2] > 0.35 * mass[0] + 1e-12) {
      derivs_ok = false;
      diag << "derivative order " << j << " looks distributional (mass " << mass[0] << " -> "
           << mass[2] << "); ";
    }
  }

  cls.in_Xk = moment_ok && derivs_ok;

  if (cls.in_Xk && chi.one_at_zero) {
    if (chi.nonneg && chi.nonincreasing) {
      // Non-negative non-increasing profiles with chi(0)=1 have positive sigma.
      diag << "monotonicity shortcut applies; ";
    }
    SigmaCertificate cert = sigma_certificate(chi, omega_max, 400, 1e-10);
    cls.in_Xk_plus = cert.positive;
    if (!cert.positive) diag << "sigma sweep found min " << cert.min_sigma << "; ";
  } else if (cls.in_Xk) {
    diag << "chi(0) != 1; ";
  }
  cls.diagnostics = diag.str();
  return cls;
}

}  // namespace lbdie
