#include "lbdie/wiener_hopf.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "lbdie/parallel.hpp"

namespace lbdie::wh {

namespace {

constexpr cplx kI{0.0, 1.0};

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os << what << " (" << value << ")";
  return os.str();
}

}  // namespace

Mat3c QuadSymbol::eval(cplx tau) const {
  return M0.cast<cplx>() + M1.cast<cplx>() * tau + M2.cast<cplx>() * (tau * tau);
}

Eigen::Matrix3d QuadSymbol::eval_real(double tau) const { return M0 + M1 * tau + M2 * (tau * tau); }

QuadSymbol quad_symbol(const Tensor4& a, const Eigen::Vector2d& xi_prime) {
  QuadSymbol s;
  s.xi_prime = xi_prime;
  s.M0.setZero();
  s.M1.setZero();
  s.M2.setZero();
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      s.M2(p, q) = a(p, q, 2, 2);
      for (int j = 0; j < 2; ++j) s.M1(p, q) += (a(p, q, 2, j) + a(p, q, j, 2)) * xi_prime[j];
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) s.M0(p, q) += a(p, q, k, l) * xi_prime[k] * xi_prime[l];
    }
  return s;
}

QuadSymbol FrozenSymbol::quad(const Eigen::Vector2d& xi_prime) const {
  return quad_symbol(a_local, xi_prime);
}

Eigen::Matrix3d FrozenSymbol::full(const Eigen::Vector3d& xi) const {
  return a_local.contract_symbol(xi);
}

FrozenSymbol freeze_symbol(const CoefficientField& field, const Eigen::Vector3d& y,
                           const Eigen::Vector3d& outward_normal) {
  if (std::abs(outward_normal.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("freeze_symbol: normal must be unit");
  Eigen::Vector3d m = -outward_normal;  // inward axis, so the interior maps to x3 > 0
  // deterministic tangent: project out the coordinate axis least aligned with m
  int least = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(m[i]) < std::abs(m[least])) least = i;
  Eigen::Vector3d t1 = Eigen::Vector3d::Unit(least) - m[least] * m;
  t1.normalize();
  Eigen::Vector3d t2 = m.cross(t1);

  FrozenSymbol fs;
  fs.frame.col(0) = t1;
  fs.frame.col(1) = t2;
  fs.frame.col(2) = m;
  fs.a_local = rotate(field.tensor(y), fs.frame);
  fs.beta_local = fs.a_local.trace_mean();
  return fs;
}

namespace {

using Mat6c = Eigen::Matrix<cplx, 6, 6>;

lapack_logical select_lower_half(const lapack_complex_double* w) {
  return std::imag(*w) < 0.0 ? 1 : 0;
}

// Scalar polynomial in tau, coefficient index = power. Degree-1 entries of a
// factor produce degree-2 cofactors and a degree-3 determinant.
using Poly = std::array<cplx, 4>;

Poly mul11(cplx a0, cplx a1, cplx b0, cplx b1) {
  return {a0 * b0, a0 * b1 + a1 * b0, a1 * b1, cplx{}};
}

// Cofactor polynomial of the (i,j) entry of lead*tau + shift.
Poly cofactor_poly(const Mat3c& lead, const Mat3c& shift, int i, int j) {
  const int r0 = (i + 1) % 3, r1 = (i + 2) % 3;
  const int c0 = (j + 1) % 3, c1 = (j + 2) % 3;
  // rows/cols taken cyclically keep the permutation even, so no extra sign
  Poly m0 = mul11(shift(r0, c0), lead(r0, c0), shift(r1, c1), lead(r1, c1));
  Poly m1 = mul11(shift(r0, c1), lead(r0, c1), shift(r1, c0), lead(r1, c0));
  Poly out;
  for (int d = 0; d < 4; ++d) out[d] = m0[d] - m1[d];
  return out;
}

struct CofactorData {
  Mat3c C_plus;  // tau^2 coefficients of adj(A_plus)
  Poly det;      // det A_plus(tau)
};

CofactorData cofactors_of_plus(const LinearFactor& plus) {
  CofactorData out;
  out.det = {cplx{}, cplx{}, cplx{}, cplx{}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Poly c = cofactor_poly(plus.lead, plus.shift, i, j);
      out.C_plus(j, i) = c[2];  // adj = transposed cofactors
      if (i == 0) {
        // Laplace expansion along the first row: det = sum_j e_{0j} cof_{0j}
        cplx e0 = plus.shift(0, j), e1 = plus.lead(0, j);
        for (int d = 0; d < 3; ++d) {
          out.det[d] += e0 * c[d];
          out.det[d + 1] += e1 * c[d];
        }
      }
    }
  return out;
}

struct Circle {
  cplx center;
  double radius = 0.0;
};

// Circle around a pole cluster: centered at the mean, radius 1.5x the spread
// with a scale-aware floor (a numerically split multiple root must not shrink
// the contour onto itself), clamped to keep a 30% clearance from every
// excluded point.
Circle choose_circle(const std::vector<cplx>& enclosed, const std::vector<cplx>& excluded) {
  cplx c{};
  for (cplx p : enclosed) c += p;
  c /= static_cast<double>(enclosed.size());
  double spread = 0.0;
  for (cplx p : enclosed) spread = std::max(spread, std::abs(p - c));
  double cap = std::numeric_limits<double>::infinity();
  for (cplx q : excluded) cap = std::min(cap, 0.7 * std::abs(q - c));
  double r = std::max(1.5 * spread, 0.25 * (1.0 + std::abs(c)));
  if (r > cap) {
    if (cap <= 1.01 * spread)
      throw FactorizationFailure("contour cannot separate the pole clusters");
    r = std::max(0.5 * (spread + cap), 1.01 * spread);
  }
  if (!(r > 0.0)) throw FactorizationFailure("degenerate contour radius");
  return {c, r};
}

// (1/2 pi i) * integral of f over the circle, anticlockwise trapezoid rule.
template <class F>
Mat3c cauchy_circle(const Circle& g, int nodes, F&& f) {
  Mat3c acc = Mat3c::Zero();
  for (int k = 0; k < nodes; ++k) {
    const double th = 2.0 * M_PI * k / nodes;
    const cplx dir = std::polar(1.0, th);
    acc += f(g.center + g.radius * dir) * dir;
  }
  return acc * (g.radius / nodes);
}

void check_real_poles(const RationalSymbol& h) {
  auto bad = [](cplx p) { return std::abs(p.imag()) <= 1e-12 * (1.0 + std::abs(p)); };
  for (cplx p : h.poles_lower)
    if (bad(p)) throw PoleOnRealAxis("rational symbol has a pole on the real axis");
  for (cplx p : h.poles_upper)
    if (bad(p)) throw PoleOnRealAxis("rational symbol has a pole on the real axis");
}

}  // namespace

Factorization factorize(const QuadSymbol& sym) {
  Eigen::LLT<Eigen::Matrix3d> llt(sym.M2);
  if (llt.info() != Eigen::Success)
    throw FactorizationFailure("leading coefficient is not positive definite");
  const Eigen::Matrix3d L = llt.matrixL();

  Mat6c comp = Mat6c::Zero();
  comp.block<3, 3>(0, 3).setIdentity();
  comp.block<3, 3>(3, 0) = -llt.solve(sym.M0).cast<cplx>();
  comp.block<3, 3>(3, 3) = -llt.solve(sym.M1).cast<cplx>();

  Mat6c vs;
  Eigen::Matrix<cplx, 6, 1> w;
  lapack_int sdim = 0;
  lapack_int info = LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'S', select_lower_half, 6, comp.data(),
                                  6, &sdim, w.data(), vs.data(), 6);
  if (info != 0) throw FactorizationFailure(describe("Schur decomposition failed, info", info));
  for (int i = 0; i < 6; ++i)
    if (std::abs(w(i).imag()) <= 1e-9 * (1.0 + std::abs(w(i))))
      throw EllipticityViolation("symbol determinant has a real root in the conormal frequency");
  if (sdim != 3)
    throw FactorizationFailure(describe("root split is not three per half-plane, sdim", sdim));

  const Mat3c X = vs.block<3, 3>(0, 0);
  const Mat3c Y = vs.block<3, 3>(3, 0);
  Eigen::JacobiSVD<Mat3c> svd(X);
  const double smin = svd.singularValues()(2);
  if (!(smin > 0.0) || svd.singularValues()(0) > 1e8 * smin)
    throw FactorizationFailure("invariant subspace basis is ill conditioned");

  Factorization f;
  f.solvent = Y * X.inverse();

  const Mat3c Lc = L.cast<cplx>();
  const Eigen::Matrix3d Li =
      L.triangularView<Eigen::Lower>().solve(Eigen::Matrix3d::Identity());
  f.plus.lead = Lc;
  f.plus.shift = -Lc * f.solvent;
  f.minus.lead = (sym.M2 * Li).cast<cplx>();
  f.minus.shift = (sym.M1.cast<cplx>() + sym.M2.cast<cplx>() * f.solvent) * Li.cast<cplx>();

  for (int i = 0; i < 3; ++i) {
    f.roots_lower[i] = w(i);
    f.roots_upper[i] = w(i + 3);
  }

  const Mat3c quad_res = sym.M0.cast<cplx>() + sym.M1.cast<cplx>() * f.solvent +
                         sym.M2.cast<cplx>() * f.solvent * f.solvent;
  const double sn = f.solvent.norm();
  const double scale = sym.M0.norm() + sym.M1.norm() * sn + sym.M2.norm() * sn * sn;
  f.solvent_residual = quad_res.norm() / std::max(scale, 1e-300);
  if (f.solvent_residual > 1e-6)
    throw FactorizationFailure(describe("solvent residual too large", f.solvent_residual));

  CofactorData cof = cofactors_of_plus(f.plus);
  f.C_plus = cof.C_plus;
  f.a_plus = cof.det[3];
  f.a_minus = f.minus.lead.determinant();

  const double span = 3.0 * (1.0 + sym.xi_prime.norm());
  for (int k = 0; k < 64; ++k) {
    const double tau = -span + 2.0 * span * k / 63.0;
    const Mat3c ref = sym.eval(tau);
    const double rel =
        (ref - f.minus.eval(tau) * f.plus.eval(tau)).norm() / std::max(1.0, ref.norm());
    f.reconstruction_error = std::max(f.reconstruction_error, rel);
  }
  return f;
}

Mat3c contour_cofactor_integral(const Factorization& f, int nodes) {
  std::vector<cplx> enclosed(f.roots_lower.begin(), f.roots_lower.end());
  Circle g = choose_circle(enclosed, {});
  return cauchy_circle(g, nodes, [&](cplx tau) -> Mat3c { return f.plus.eval(tau).inverse(); });
}

Mat3c pi_plus(const RationalSymbol& h, cplx xi3, int nodes) {
  check_real_poles(h);
  if (h.poles_lower.empty()) return Mat3c::Zero();
  std::vector<cplx> excl = h.poles_upper;
  excl.push_back(xi3);
  Circle g = choose_circle(h.poles_lower, excl);
  return cauchy_circle(g, nodes, [&](cplx w) -> Mat3c { return h.eval(w) / (xi3 - w); });
}

Mat3c pi_minus(const RationalSymbol& h, cplx xi3, int nodes) {
  check_real_poles(h);
  if (h.poles_upper.empty()) return Mat3c::Zero();
  std::vector<cplx> excl = h.poles_lower;
  excl.push_back(xi3);
  Circle g = choose_circle(h.poles_upper, excl);
  return cauchy_circle(g, nodes, [&](cplx w) -> Mat3c { return h.eval(w) / (xi3 - w); });
}

Mat3c pi_prime(const RationalSymbol& h, int nodes) {
  check_real_poles(h);
  if (h.poles_lower.empty()) return Mat3c::Zero();
  Circle g = choose_circle(h.poles_lower, h.poles_upper);
  return -kI * cauchy_circle(g, nodes, [&](cplx w) -> Mat3c { return h.eval(w); });
}

EMatrix compute_e(const QuadSymbol& sym, const Factorization& f,
                  const Eigen::Matrix3d& beta_local, const Eigen::Vector2d& xi_prime,
                  int nodes) {
  const double rho = xi_prime.norm();
  if (!(rho > 0.0)) throw std::invalid_argument("compute_e requires xi' != 0");

  EMatrix out;
  const Mat3c sv = Mat3c::Identity() / (2.0 * rho);
  out.e1_closed = sv;
  out.e2 = (kI / f.a_plus) * beta_local.cast<cplx>() * f.C_plus *
           f.minus.eval(cplx(0.0, -rho)).inverse();
  out.e1_contour = out.e1_closed;

  if (nodes > 0) {
    // e1 by the literal projection composition. The inner circle realizes the
    // plus projection of M(w) = inv(S_minus) S(P); its only pole below the
    // axis is -i|xi'|. The outer circle realizes the prime projection of
    //   G(z) = S(B) inv(S_plus) (pi_plus M)(z);
    // the evaluation crosses the removable roots of det A_plus, so the circle
    // encloses them too, and keeps clear of everything above the axis.
    const cplx pole(0.0, -rho);
    std::vector<cplx> upper(f.roots_upper.begin(), f.roots_upper.end());
    upper.push_back(cplx(0.0, rho));
    std::vector<cplx> lower(f.roots_lower.begin(), f.roots_lower.end());
    lower.push_back(pole);
    const Circle outer = choose_circle(lower, upper);

    double cap = 0.6 * (outer.radius - std::abs(pole - outer.center));
    for (cplx q : upper) cap = std::min(cap, 0.7 * std::abs(q - pole));
    if (!(cap > 0.0)) throw FactorizationFailure("nested contours impossible");
    const Circle inner{pole, 0.5 * cap};

    std::vector<cplx> wk(nodes);
    std::vector<Mat3c> mk(nodes);
    for (int k = 0; k < nodes; ++k) {
      const cplx dir = std::polar(1.0, 2.0 * M_PI * k / nodes);
      const cplx w = inner.center + inner.radius * dir;
      wk[k] = w;
      const Mat3c sm_inv = (w - kI * rho) * f.minus.eval(w).inverse();
      mk[k] = sm_inv * (-1.0 / (rho * rho + w * w)) * (inner.radius / nodes) * dir;
    }
    auto pi_plus_m = [&](cplx z) {
      Mat3c acc = Mat3c::Zero();
      for (int k = 0; k < nodes; ++k) acc += mk[k] / (z - wk[k]);
      return acc;
    };
    Mat3c acc = Mat3c::Zero();
    for (int m = 0; m < nodes; ++m) {
      const cplx dir = std::polar(1.0, 2.0 * M_PI * m / nodes);
      const cplx z = outer.center + outer.radius * dir;
      const Mat3c sb = sym.eval(z) / (rho * rho + z * z);
      const Mat3c sp_inv = (z + kI * rho) * f.plus.eval(z).inverse();
      acc += sb * sp_inv * pi_plus_m(z) * dir;
    }
    // e1 = -Pi'(G) = i * (1/2 pi i) * integral of G
    out.e1_contour = kI * acc * (outer.radius / nodes);
    out.e1_route_gap = (out.e1_contour - out.e1_closed).cwiseAbs().maxCoeff();
  }

  out.e = out.e1_closed + out.e2 - sv;
  out.det_e = out.e.determinant();
  return out;
}

EMatrix compute_e(const FrozenSymbol& fs, const Eigen::Vector2d& xi_prime, int nodes) {
  QuadSymbol q = fs.quad(xi_prime);
  Factorization f = factorize(q);
  return compute_e(q, f, fs.beta_local, xi_prime, nodes);
}

QuadSymbol homotopy_symbol(const QuadSymbol& sym, const Eigen::Matrix3d& beta_local, double t) {
  const double rho2 = sym.xi_prime.squaredNorm();
  QuadSymbol h;
  h.xi_prime = sym.xi_prime;
  h.M2 = (1.0 - t) * beta_local + t * sym.M2;
  h.M1 = t * sym.M1;
  h.M0 = (1.0 - t) * rho2 * beta_local + t * sym.M0;
  return h;
}

namespace {

// Shared sweep body: fills one direction slot of the report.
struct DirectionSweep {
  const FrozenSymbol* fs;
  const SLOptions* opt;
  SLReport* rep;
  std::exception_ptr error;
  std::mutex mu;

  void run_direction(std::int64_t j) {
    try {
      const double phi = 2.0 * M_PI * static_cast<double>(j) / rep->xi_prime_grid.size();
      const Eigen::Vector2d xp(std::cos(phi), std::sin(phi));
      rep->xi_prime_grid[j] = xp;
      QuadSymbol q = fs->quad(xp);
      Factorization f = factorize(q);
      EMatrix em =
          compute_e(q, f, fs->beta_local, xp, opt->check_e1_route ? opt->nodes : 0);
      rep->e_values[j] = em.e;
      rep->det_e[j] = em.det_e;
      if (!rep->t_grid.empty()) {
        const std::size_t nd = rep->xi_prime_grid.size();
        for (std::size_t k = 0; k < rep->t_grid.size(); ++k) {
          QuadSymbol qt = homotopy_symbol(q, fs->beta_local, rep->t_grid[k]);
          Factorization ft = factorize(qt);
          EMatrix emt = compute_e(qt, ft, fs->beta_local, xp, 0);
          rep->det_e_t[k * nd + j] = emt.det_e;
        }
      }
      if (em.e1_route_gap > 0.0) {
        std::lock_guard<std::mutex> lk(mu);
        rep->max_e1_route_gap = std::max(rep->max_e1_route_gap, em.e1_route_gap);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lk(mu);
      if (!error) error = std::current_exception();
    }
  }
};

SLReport sweep(const CoefficientField& field, const Eigen::Vector3d& y,
               const Eigen::Vector3d& outward_normal, const std::vector<double>& t_grid,
               const SLOptions& opt) {
  FrozenSymbol fs = freeze_symbol(field, y, outward_normal);
  SLReport rep;
  rep.floor = opt.floor;
  rep.t_grid = t_grid;
  rep.xi_prime_grid.resize(opt.n_directions);
  rep.e_values.resize(opt.n_directions);
  rep.det_e.resize(opt.n_directions);
  rep.det_e_t.assign(t_grid.size() * opt.n_directions, cplx{});

  DirectionSweep body{&fs, &opt, &rep, nullptr, {}};
  parallel_for(opt.n_directions, [&](std::int64_t j) { body.run_direction(j); });
  if (body.error) std::rethrow_exception(body.error);

  rep.min_abs_det = std::numeric_limits<double>::infinity();
  for (cplx d : rep.det_e) rep.min_abs_det = std::min(rep.min_abs_det, std::abs(d));
  rep.min_abs_det_t = std::numeric_limits<double>::infinity();
  for (cplx d : rep.det_e_t) rep.min_abs_det_t = std::min(rep.min_abs_det_t, std::abs(d));
  if (rep.det_e_t.empty()) rep.min_abs_det_t = rep.min_abs_det;
  rep.passed = rep.min_abs_det > rep.floor && rep.min_abs_det_t > rep.floor;
  return rep;
}

}  // namespace

SLReport sl_check(const CoefficientField& field, const Eigen::Vector3d& y,
                  const Eigen::Vector3d& outward_normal, const SLOptions& opt) {
  return sweep(field, y, outward_normal, {}, opt);
}

SLReport sl_homotopy(const CoefficientField& field, const Eigen::Vector3d& y,
                     const Eigen::Vector3d& outward_normal, const std::vector<double>& t_grid,
                     const SLOptions& opt) {
  for (double t : t_grid)
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("homotopy parameter outside [0,1]");
  return sweep(field, y, outward_normal, t_grid, opt);
}

namespace {

struct Grid3 {
  int n;
  double L;

  double coord(int i) const { return -0.5 * L + L * static_cast<double>(i) / n; }
  double freq(int i) const {
    const int m = (i < n / 2) ? i : i - n;
    return 2.0 * M_PI * static_cast<double>(m) / L;
  }
  std::size_t idx(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(ix) * n + iy) * n + iz;
  }
};

// Analysis is the e^{+i xi.x} transform (FFTW's BACKWARD sign), so functions
// supported on x3 > 0 have spectra extending holomorphically upward and the
// plus factors act causally. Synthesis is the opposite sign, normalized.
void fft3(std::vector<cplx>& a, int n, bool analysis) {
  fftw_plan plan = fftw_plan_dft_3d(n, n, n, reinterpret_cast<fftw_complex*>(a.data()),
                                    reinterpret_cast<fftw_complex*>(a.data()),
                                    analysis ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  if (!analysis) {
    const double inv = 1.0 / (static_cast<double>(n) * n * n);
    for (cplx& v : a) v *= inv;
  }
}

}  // namespace

HalfspaceSolution halfspace_solve(const FrozenSymbol& fs, const HalfspaceProblem& p) {
  const int n = p.n;
  if (n < 16) throw std::invalid_argument("halfspace grid too small (n < 16)");
  if ((n & (n - 1)) != 0) throw std::invalid_argument("halfspace grid size must be a power of two");
  if (!p.f) throw std::invalid_argument("halfspace problem has no source term");
  const Grid3 g{n, p.L};
  const std::size_t n3 = static_cast<std::size_t>(n) * n * n;

  // source, extended by zero below (and on) the interface
  std::array<std::vector<cplx>, 3> field;
  for (auto& v : field) v.assign(n3, cplx{});
  double f_norm2 = 0.0;
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const double x3 = g.coord(iz);
        if (x3 <= 0.0) continue;
        const Eigen::Vector3d fv =
            p.f(Eigen::Vector3d(g.coord(ix), g.coord(iy), x3));
        const std::size_t id = g.idx(ix, iy, iz);
        for (int c = 0; c < 3; ++c) field[c][id] = fv[c];
        f_norm2 += fv.squaredNorm();
      }

  HalfspaceSolution sol;
  sol.n = n;
  sol.L = p.L;
  sol.f_norm = std::sqrt(f_norm2);
  sol.u.assign(n3, Eigen::Vector3d::Zero());
  if (f_norm2 == 0.0) return sol;

  // one factorization per tangential frequency, at the regularized argument
  std::vector<LinearFactor> plus(static_cast<std::size_t>(n) * n),
      minus(static_cast<std::size_t>(n) * n);
  std::vector<double> rho_reg(static_cast<std::size_t>(n) * n, 0.0);
  {
    std::exception_ptr err;
    std::mutex mu;
    parallel_for(static_cast<std::int64_t>(n) * n, [&](std::int64_t t) {
      try {
        const int ix = static_cast<int>(t / n), iy = static_cast<int>(t % n);
        const Eigen::Vector2d xp(g.freq(ix), g.freq(iy));
        const double r = xp.norm();
        const Eigen::Vector2d omega = r > 0.0 ? Eigen::Vector2d(xp / r) : Eigen::Vector2d(1.0, 0.0);
        const double rr = 1.0 + r;
        Factorization f = factorize(fs.quad(rr * omega));
        plus[t] = f.plus;
        minus[t] = f.minus;
        rho_reg[t] = rr;
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err) err = std::current_exception();
      }
    });
    if (err) std::rethrow_exception(err);
  }

  auto apply_multiplier = [&](bool plus_factor, bool invert) {
    parallel_for(static_cast<std::int64_t>(n) * n, [&](std::int64_t t) {
      const int ix = static_cast<int>(t / n), iy = static_cast<int>(t % n);
      const LinearFactor& lf = plus_factor ? plus[t] : minus[t];
      const double rr = rho_reg[t];
      for (int iz = 0; iz < n; ++iz) {
        const double xi3 = g.freq(iz);
        const cplx theta = plus_factor ? cplx(xi3, rr) : cplx(xi3, -rr);
        const Mat3c s = lf.eval(xi3) / theta;
        const std::size_t id = g.idx(ix, iy, iz);
        Eigen::Vector3cd v(field[0][id], field[1][id], field[2][id]);
        v = invert ? s.partialPivLu().solve(v).eval() : (s * v).eval();
        for (int c = 0; c < 3; ++c) field[c][id] = v[c];
      }
    });
  };
  auto heaviside = [&]() {
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy)
        for (int iz = 0; iz < n; ++iz)
          if (g.coord(iz) <= 0.0) {
            const std::size_t id = g.idx(ix, iy, iz);
            for (int c = 0; c < 3; ++c) field[c][id] = cplx{};
          }
  };

  for (int c = 0; c < 3; ++c) fft3(field[c], n, true);
  apply_multiplier(false, true);  // inv(S_minus)
  for (int c = 0; c < 3; ++c) fft3(field[c], n, false);
  heaviside();
  for (int c = 0; c < 3; ++c) fft3(field[c], n, true);
  apply_multiplier(true, true);  // inv(S_plus)
  for (int c = 0; c < 3; ++c) fft3(field[c], n, false);

  for (std::size_t id = 0; id < n3; ++id)
    sol.u[id] = Eigen::Vector3d(field[0][id].real(), field[1][id].real(), field[2][id].real());

  // recompose: residual of r_plus S_minus S_plus (theta_plus u) against f
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const std::size_t id = g.idx(ix, iy, iz);
        const bool up = g.coord(iz) > 0.0;
        for (int c = 0; c < 3; ++c) field[c][id] = up ? cplx(sol.u[id][c]) : cplx{};
      }
  for (int c = 0; c < 3; ++c) fft3(field[c], n, true);
  apply_multiplier(true, false);   // S_plus
  apply_multiplier(false, false);  // S_minus
  for (int c = 0; c < 3; ++c) fft3(field[c], n, false);

  double res2 = 0.0;
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const double x3 = g.coord(iz);
        if (x3 <= 0.0) continue;
        const std::size_t id = g.idx(ix, iy, iz);
        const Eigen::Vector3d fv = p.f(Eigen::Vector3d(g.coord(ix), g.coord(iy), x3));
        for (int c = 0; c < 3; ++c) res2 += std::norm(field[c][id] - fv[c]);
      }
  sol.residual = std::sqrt(res2 / f_norm2);
  return sol;
}

}  // namespace lbdie::wh
