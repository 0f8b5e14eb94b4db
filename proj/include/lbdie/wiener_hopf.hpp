#pragma once

// Factorization of frozen boundary symbols with respect to the conormal
// frequency, and everything built on top of it: the contour-integral cofactor
// identity, Cauchy projections for rational symbols, the Sapiro-Lopatinskii
// matrix e(xi') with its homotopy sweep, and the half-space model operator
// inverted spectrally on a periodic grid.
//
// Conventions, fixed once and used everywhere:
//   A(xi', tau) = M0(xi') + M1(xi') tau + M2 tau^2,
//   A = A_minus * A_plus with det A_plus root-free for Im tau > 0 (its three
//   roots lie strictly below the real axis) and det A_minus root-free for
//   Im tau < 0. The gauge is fixed by lead(A_plus) = L, the lower Cholesky
//   factor of M2.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lbdie/coefficients.hpp"

namespace lbdie::wh {

using cplx = std::complex<double>;
using Mat3c = Eigen::Matrix3cd;

struct FactorizationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The symbol has a real root in the conormal frequency; the underlying tensor
// cannot be strongly elliptic at this xi'.
struct EllipticityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A pole sits on (or hugs) the real axis, so the Cauchy projections are
// undefined for the given symbol.
struct PoleOnRealAxis : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quadratic matrix pencil in the conormal frequency at a fixed tangential
// frequency xi'.
struct QuadSymbol {
  Eigen::Matrix3d M0, M1, M2;
  Eigen::Vector2d xi_prime{0.0, 0.0};

  Mat3c eval(cplx tau) const;
  Eigen::Matrix3d eval_real(double tau) const;
};

// M2 = a^{pq}_{33}, M1 = sum_{j<3} (a^{pq}_{3j} + a^{pq}_{j3}) xi'_j,
// M0 = sum_{k,l<3} a^{pq}_{kl} xi'_k xi'_l.
QuadSymbol quad_symbol(const Tensor4& a, const Eigen::Vector2d& xi_prime);

// Coefficient tensor frozen at a boundary point and rotated into a local
// frame whose third axis is the inward normal, so the flattened model problem
// lives in the half-space x3 > 0.
struct FrozenSymbol {
  Tensor4 a_local;
  Eigen::Matrix3d beta_local;
  Eigen::Matrix3d frame;  // columns: tangent1, tangent2, inward normal

  QuadSymbol quad(const Eigen::Vector2d& xi_prime) const;
  Eigen::Matrix3d full(const Eigen::Vector3d& xi) const;  // A(xi) in the local frame
};

// outward_normal must be unit; the tangent pair is chosen deterministically.
FrozenSymbol freeze_symbol(const CoefficientField& field, const Eigen::Vector3d& y,
                           const Eigen::Vector3d& outward_normal);

// One linear factor lead * tau + shift.
struct LinearFactor {
  Mat3c lead, shift;
  Mat3c eval(cplx tau) const { return lead * tau + shift; }
};

struct Factorization {
  LinearFactor plus, minus;  // A(tau) = minus.eval(tau) * plus.eval(tau)
  cplx a_plus{}, a_minus{};  // leading coefficients of det A_plus, det A_minus
  Mat3c C_plus;              // tau^2 coefficient of adj(A_plus(tau))
  Mat3c solvent;             // S with M0 + M1 S + M2 S^2 = 0, spec(S) below the axis
  std::array<cplx, 3> roots_lower{}, roots_upper{};
  double solvent_residual = 0.0;
  double reconstruction_error = 0.0;  // max rel error over a real tau sample grid
};

// Companion linearization + ordered complex Schur form; the invariant subspace
// of the lower-half-plane eigenvalues yields the right solvent.
Factorization factorize(const QuadSymbol& sym);

// (1/2 pi i) * integral of inverse(A_plus) over a circle enclosing exactly the
// roots of det A_plus; equals C_plus / a_plus.
Mat3c contour_cofactor_integral(const Factorization& f, int nodes = 512);

// Matrix-valued rational function of the conormal frequency with its poles
// listed by half-plane. Scalar symbols are passed as multiples of the identity.
struct RationalSymbol {
  std::function<Mat3c(cplx)> eval;
  std::vector<cplx> poles_lower, poles_upper;
};

// Cauchy projections: pi_plus keeps the part analytic in the upper half-plane
// (lower-pole partial fractions), pi_minus the complementary part; on strictly
// proper symbols pi_plus + pi_minus = identity. xi3 must not be a pole.
Mat3c pi_plus(const RationalSymbol& h, cplx xi3, int nodes = 512);
Mat3c pi_minus(const RationalSymbol& h, cplx xi3, int nodes = 512);

// -(1/2 pi) * integral over an anticlockwise contour in the lower half-plane
// enclosing the lower poles; vanishes when h is holomorphic below the axis.
Mat3c pi_prime(const RationalSymbol& h, int nodes = 512);

// Sapiro-Lopatinskii matrix at one tangential frequency. e = e1 + e2 - SV with
// SV = I/(2|xi'|); e1 is computed both from its closed form I/(2|xi'|) and by
// the literal Cauchy-projection composition so the two routes can be compared.
struct EMatrix {
  Mat3c e;
  cplx det_e{};
  Mat3c e1_closed, e1_contour, e2;
  double e1_route_gap = 0.0;  // max abs entry difference between the e1 routes
};

EMatrix compute_e(const QuadSymbol& sym, const Factorization& f,
                  const Eigen::Matrix3d& beta_local, const Eigen::Vector2d& xi_prime,
                  int nodes = 512);
EMatrix compute_e(const FrozenSymbol& fs, const Eigen::Vector2d& xi_prime, int nodes = 512);

struct SLOptions {
  int n_directions = 64;   // unit xi' directions, equally spaced
  double floor = 1e-6;     // pass threshold on min |det e|
  int nodes = 512;         // contour nodes for the e1 cross-check
  bool check_e1_route = true;
};

// Direction sweep of det e, with an optional homotopy sweep
//   A_t = (1-t) |xi|^2 beta + t A,   t in t_grid,
// whose determinants are stored t-major: det_e_t[k * n_directions + j] is
// t_grid[k], direction j.
struct SLReport {
  std::vector<Eigen::Vector2d> xi_prime_grid;
  std::vector<Mat3c> e_values;
  std::vector<cplx> det_e;
  double min_abs_det = 0.0;
  double max_e1_route_gap = 0.0;
  std::vector<double> t_grid;
  std::vector<cplx> det_e_t;
  double min_abs_det_t = 0.0;
  double floor = 0.0;
  bool passed = false;
};

SLReport sl_check(const CoefficientField& field, const Eigen::Vector3d& y,
                  const Eigen::Vector3d& outward_normal, const SLOptions& opt = {});
SLReport sl_homotopy(const CoefficientField& field, const Eigen::Vector3d& y,
                     const Eigen::Vector3d& outward_normal, const std::vector<double>& t_grid,
                     const SLOptions& opt = {});

// Homotopy pencil between |xi|^2 beta (t=0) and the frozen symbol (t=1).
QuadSymbol homotopy_symbol(const QuadSymbol& sym, const Eigen::Matrix3d& beta_local, double t);

// Half-space model problem on the discrete torus [-L/2, L/2)^3: solves
//   u = F^{-1} [S_plus]^{-1} F theta_plus F^{-1} [S_minus]^{-1} F (theta_plus f)
// with the hatted symbols S_pm(xi', xi3) built from the factorization at the
// regularized argument (1+|xi'|) omega, and reports the relative residual of
// the recomposed operator against f on the open upper half-grid x3 > 0.
struct HalfspaceProblem {
  int n = 64;      // grid points per axis, power of two, >= 16
  double L = 8.0;  // box edge length
  std::function<Eigen::Vector3d(const Eigen::Vector3d&)> f;
};

struct HalfspaceSolution {
  int n = 0;
  double L = 0.0;
  std::vector<Eigen::Vector3d> u;  // index (ix * n + iy) * n + iz
  double residual = 0.0;
  double f_norm = 0.0;  // discrete L2 norm of f on the upper half-grid
};

HalfspaceSolution halfspace_solve(const FrozenSymbol& fs, const HalfspaceProblem& p);

}  // namespace lbdie::wh
