#include "lbdie/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace lbdie::quad {

namespace {

struct SimpsonCtx {
  const std::function<double(double)>& f;
  int max_depth;
  bool converged = true;
  int depth_used = 0;
};

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(SimpsonCtx& ctx, double a, double b, double fa, double fm, double fb, double whole,
             double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = ctx.f(lm), frm = ctx.f(rm);
  double left = simpson(fa, flm, fm, a, m);
  double right = simpson(fm, frm, fb, m, b);
  double delta = left + right - whole;
  if (depth > ctx.depth_used) ctx.depth_used = depth;
  if (std::abs(delta) <= 15.0 * tol || depth >= ctx.max_depth) {
    if (std::abs(delta) > 15.0 * tol) ctx.converged = false;
    return left + right + delta / 15.0;
  }
  return adapt(ctx, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         adapt(ctx, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

AdaptiveResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                double tol, int max_depth) {
  SimpsonCtx ctx{f, max_depth};
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = simpson(fa, fm, fb, a, b);
  double v = adapt(ctx, a, b, fa, fm, fb, whole, tol, 0);
  return {v, ctx.converged, ctx.depth_used};
}

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  // Newton iteration on P_n, Chebyshev initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

void gauss_on_interval(int n, double a, double b, std::vector<double>& x,
                       std::vector<double>& w) {
  const GaussRule& g = gauss_legendre(n);
  x.resize(n);
  w.resize(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    x[i] = mid + half * g.x[i];
    w[i] = half * g.w[i];
  }
}

const SphereRule& sphere_rule(int n_theta, int n_phi) {
  static std::map<std::pair<int, int>, SphereRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n_theta, n_phi);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  SphereRule rule;
  const GaussRule& g = gauss_legendre(n_theta);
  rule.dir.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  rule.w.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  for (int i = 0; i < n_theta; ++i) {
    double ct = g.x[i];
    double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_phi; ++j) {
      double phi = 2.0 * M_PI * (j + 0.5) / n_phi;
      rule.dir.push_back({st * std::cos(phi), st * std::sin(phi), ct});
      rule.w.push_back(g.w[i] * 2.0 * M_PI / n_phi);
    }
  }
  return cache.emplace(key, std::move(rule)).first->second;
}

}  // namespace lbdie::quad
