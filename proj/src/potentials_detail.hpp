#pragma once

// Row engine shared by the assembled and matrix-free potentials and by their
// serial reference twins. One "row" is all source blocks for a fixed target;
// the public entry points only decide how rows are scheduled and where the
// 3x3 blocks go.
//
// Volume rows have three paths: the cell containing the target is integrated
// in polar coordinates (the strong frozen kernel is dropped on an exclusion
// ball where its spherical mean vanishes), cells closer than
// near_factor * diameter are split into octants until the leaf looks far,
// and everything else is midpoint rule. Surface rows mirror this with a
// sector-polar rule on the self panel and 4-way triangle splits nearby.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "lbdie/geometry.hpp"
#include "lbdie/kernels.hpp"
#include "lbdie/parallel.hpp"
#include "lbdie/potentials.hpp"
#include "lbdie/quadrature.hpp"

namespace lbdie::detail {

using Eigen::Matrix3d;
using Eigen::Vector3d;

// M_pq = a^{pq}_{kj} n_k w_j
inline Matrix3d mixed_contract(const Tensor4& a, const Vector3d& n, const Vector3d& w) {
  Matrix3d m;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) s += a(p, q, k, j) * n[k] * w[j];
      m(p, q) = s;
    }
  return m;
}

// ---------------------------------------------------------------------------
// Volume kernels. Each exposes:
//   weak(x, z)       integrable part, z = x - y
//   full(x, z)       weak + frozen strong part, usable away from z = 0
//   vp_active()      whether a strong v.p. part exists
//   vp_angular(w)    |z|^3 K(a_y; z) for z = |z| w, constant along rays
// ---------------------------------------------------------------------------

struct PvolKernel {
  const KernelSet& ks;

  explicit PvolKernel(const KernelSet& k, const Vector3d&) : ks(k) {}
  Matrix3d weak(const Vector3d&, const Vector3d& z) const {
    return ks.P_Delta(z) * Matrix3d::Identity();
  }
  Matrix3d full(const Vector3d& x, const Vector3d& z) const { return weak(x, z); }
  bool vp_active() const { return false; }
  Matrix3d vp_angular(const Vector3d&) const { return Matrix3d::Zero(); }
};

// One Cartesian component of grad Pvol_Delta acting on a vector density:
// d_{y_k} P_Delta(x - y) = -(d_k P_Delta)(z).
struct GradPvolKernel {
  const KernelSet& ks;
  int k;

  GradPvolKernel(const KernelSet& kset, int comp) : ks(kset), k(comp) {}
  Matrix3d weak(const Vector3d&, const Vector3d& z) const {
    return -ks.grad_P_Delta(z)[k] * Matrix3d::Identity();
  }
  Matrix3d full(const Vector3d& x, const Vector3d& z) const { return weak(x, z); }
  bool vp_active() const { return false; }
  Matrix3d vp_angular(const Vector3d&) const { return Matrix3d::Zero(); }
};

struct NKernel {
  const KernelSet& ks;
  Tensor4 ay;
  bool scalar;
  bool constant;
  Tensor3 diva0;  // hoisted divergence (zero for constant fields)

  NKernel(const KernelSet& k, const Vector3d& y)
      : ks(k), ay(k.a->tensor(y)), scalar(k.a->scalar()), constant(k.a->constant()) {
    if (constant) diva0 = k.a->divergence(y);
  }
  Matrix3d weak(const Vector3d& x, const Vector3d& z) const {
    if (scalar)
      return ks.R_hat_scalar(ks.a->scalar_value(x), ks.a->scalar_gradient(x), z) *
             Matrix3d::Identity();
    if (constant) return ks.R_hat(ay, diva0, ay, z);
    return ks.R_hat(ks.a->tensor(x), ks.a->divergence(x), ay, z);
  }
  Matrix3d full(const Vector3d& x, const Vector3d& z) const {
    Matrix3d b = weak(x, z);
    if (!scalar) b += ks.chi.chi(z.norm()) * KernelSet::K_frozen(ay, z);
    return b;
  }
  // For scalar fields the frozen kernel contracts to zero, so only the weak
  // remainder survives and no exclusion ball is needed.
  bool vp_active() const { return !scalar; }
  Matrix3d vp_angular(const Vector3d& w) const { return KernelSet::K_frozen_angular(ay, w); }
};

// ---------------------------------------------------------------------------
// Surface kernels. Each exposes:
//   surf(x, n, z)        kernel times nothing (density applied by the caller)
//   odd_vp()             whether the self panel needs the v.p. treatment
//   odd_strength(n, w)   S(w) = lim r^2 K(r w); odd in w, so its angular mean
//                        on the panel plane vanishes
// ---------------------------------------------------------------------------

struct VKernel {
  const KernelSet& ks;

  explicit VKernel(const KernelSet& k) : ks(k) {}
  Matrix3d surf(const Vector3d&, const Vector3d&, const Vector3d& z) const {
    return -ks.P_Delta(z) * Matrix3d::Identity();
  }
  bool odd_vp() const { return false; }
  Matrix3d odd_strength(const Vector3d&, const Vector3d&) const { return Matrix3d::Zero(); }
};

struct WKernel {
  const KernelSet& ks;
  Tensor4 ay;  // coefficient frozen at the target for the singular strength

  WKernel(const KernelSet& k, const Vector3d& y) : ks(k), ay(k.a->tensor(y)) {}
  Matrix3d surf(const Vector3d& x, const Vector3d& n, const Vector3d& z) const {
    return -ks.traction_at_source_T(x, n, z);
  }
  bool odd_vp() const { return true; }
  Matrix3d odd_strength(const Vector3d& n, const Vector3d& w) const {
    return -mixed_contract(ay, n, w).transpose() / (4.0 * M_PI);
  }
};

// Conormal derivative of the single layer, coefficient and direction at the
// target. Shared by the boundary operator W' and by apply_V_traction.
struct WpKernel {
  const KernelSet& ks;
  Vector3d y, ny;
  Tensor4 ay;

  WpKernel(const KernelSet& k, const Vector3d& target, const Vector3d& target_normal)
      : ks(k), y(target), ny(target_normal), ay(k.a->tensor(target)) {}
  Matrix3d surf(const Vector3d&, const Vector3d&, const Vector3d& z) const {
    return -ks.traction_at_target(y, ny, z);
  }
  bool odd_vp() const { return true; }
  Matrix3d odd_strength(const Vector3d&, const Vector3d& w) const {
    return mixed_contract(ay, ny, w) / (4.0 * M_PI);
  }
};

// ---------------------------------------------------------------------------
// Volume row
// ---------------------------------------------------------------------------

inline Eigen::AlignedBox3d cell_box(const VolumeMesh& vm, const VolumeCell& c) {
  const Vector3d lo = vm.origin + c.idx.cast<double>() * vm.h;
  return {lo, lo + Vector3d::Constant(vm.h)};
}

// Exit distance from y along unit direction w out of the box (slab test).
inline double box_exit(const Eigen::AlignedBox3d& b, const Vector3d& y, const Vector3d& w) {
  double t = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (w[k] > 1e-14)
      t = std::min(t, (b.max()[k] - y[k]) / w[k]);
    else if (w[k] < -1e-14)
      t = std::min(t, (b.min()[k] - y[k]) / w[k]);
  }
  return std::max(t, 0.0);
}

// Polar integration over (cell cap domain) around an interior target. The
// strong part is dropped on [0, delta] where delta keeps the exclusion ball
// inside the integration region, so the omitted v.p. contribution is exactly
// zero by the vanishing spherical mean.
template <class K>
Matrix3d polar_cell_block(const K& kern, const VolumeMesh& vm, const Eigen::AlignedBox3d& box,
                          bool cut, const Vector3d& y, const QuadratureBudget& q) {
  const auto& ang = quad::sphere_rule(q.angular_theta, q.angular_phi);
  const std::size_t nd = ang.dir.size();
  const double eps = kern.ks.chi.eps;

  std::vector<double> rmax(nd);
  double ball = vm.h / 4.0;
  for (std::size_t m = 0; m < nd; ++m) {
    const Vector3d w(ang.dir[m][0], ang.dir[m][1], ang.dir[m][2]);
    double r = box_exit(box, y, w);
    if (cut) r = std::min(r, vm.domain.exit_distance(y, w, r));
    if (std::isfinite(eps)) r = std::min(r, eps);
    rmax[m] = r;
    ball = std::min(ball, r);
  }
  ball = std::max(ball, 1e-9 * vm.h);

  const bool vp = kern.vp_active();
  Matrix3d B = Matrix3d::Zero();
  std::vector<double> xr, wr;
  for (std::size_t m = 0; m < nd; ++m) {
    if (rmax[m] <= 1e-14) continue;
    const Vector3d w(ang.dir[m][0], ang.dir[m][1], ang.dir[m][2]);
    const double split = std::min(ball, rmax[m]);
    const Matrix3d kang = vp ? kern.vp_angular(w) : Matrix3d::Zero();

    quad::gauss_on_interval(q.radial, 0.0, split, xr, wr);
    for (int i = 0; i < q.radial; ++i) {
      const double r = xr[i];
      B += (ang.w[m] * wr[i] * r * r) * kern.weak(y + r * w, r * w);
    }
    if (rmax[m] > split * (1.0 + 1e-12)) {
      quad::gauss_on_interval(q.radial, split, rmax[m], xr, wr);
      for (int i = 0; i < q.radial; ++i) {
        const double r = xr[i];
        Matrix3d f = (r * r) * kern.weak(y + r * w, r * w);
        if (vp) f += (kern.ks.chi.chi(r) / r) * kang;
        B += (ang.w[m] * wr[i]) * f;
      }
    }
  }
  return B;
}

template <class K>
void subdivide_cube(const K& kern, const DomainShape& dom, const Vector3d& lo, double edge,
                    bool cut, const Vector3d& y, int depth, int max_depth, Matrix3d& B) {
  const Vector3d c = lo + Vector3d::Constant(0.5 * edge);
  const double diam = edge * std::sqrt(3.0);
  const double dist = (c - y).norm();
  if (depth >= max_depth || diam <= 0.5 * dist) {
    if (cut && !dom.inside(c)) return;
    B += (edge * edge * edge) * kern.full(c, c - y);
    return;
  }
  const double half = 0.5 * edge;
  for (int o = 0; o < 8; ++o) {
    const Vector3d lo2 = lo + half * Vector3d(o & 1, (o >> 1) & 1, (o >> 2) & 1);
    subdivide_cube(kern, dom, lo2, half, cut, y, depth + 1, max_depth, B);
  }
}

// sink(j, block) is called at most once per source cell; blocks outside the
// cutoff support are skipped entirely.
template <class K, class Sink>
void volume_row(const K& kern, const VolumeMesh& vm, const Vector3d& y,
                const QuadratureBudget& q, Sink&& sink) {
  const double eps = kern.ks.chi.eps;
  const double diam = vm.h * std::sqrt(3.0);
  for (std::size_t j = 0; j < vm.cells.size(); ++j) {
    const VolumeCell& cell = vm.cells[j];
    const Vector3d z = cell.centroid - y;
    const double d = z.norm();
    if (d >= eps + diam) continue;
    const Eigen::AlignedBox3d box = cell_box(vm, cell);
    const bool cut = cell.fill < 1.0 - 1e-12;
    // The polar path needs the target strictly inside the cube; targets on a
    // cell face (possible for synthetic probe points) fall through to the
    // subdivision path, which only ever evaluates away from the target.
    const double margin = 1e-9 * vm.h;
    const bool strictly_inside =
        (y - box.min()).minCoeff() > margin && (box.max() - y).minCoeff() > margin;
    if (strictly_inside) {
      sink(j, polar_cell_block(kern, vm, box, cut, y, q));
    } else if (d < q.near_factor * diam) {
      Matrix3d B = Matrix3d::Zero();
      subdivide_cube(kern, vm.domain, box.min(), vm.h, cut, y, 0, q.volume_subdiv, B);
      sink(j, B);
    } else {
      sink(j, cell.volume * kern.full(cell.centroid, z));
    }
  }
}

// ---------------------------------------------------------------------------
// Surface row
// ---------------------------------------------------------------------------

// Sector-polar rule on the self panel. In polar coordinates around the
// centroid the kernel times the Jacobian is K(r w) r; for v.p. kernels the
// odd strength S(w) is subtracted pointwise and its exactly-cancelling
// angular mean leaves only S(w) ln R(theta):
//   v.p. int_panel K dS = int dtheta [ int_0^R (K r - S/r) dr + S ln R ].
template <class K>
Matrix3d polar_panel_block(const K& kern, const SurfacePanel& pan, const QuadratureBudget& q) {
  const Vector3d y = pan.centroid;
  const Vector3d n = pan.normal;
  const Vector3d e1 = (pan.v[0] - y).normalized();
  const Vector3d e2 = n.cross(e1);

  Eigen::Vector2d v2[3];
  double ang[3];
  int ord[3] = {0, 1, 2};
  for (int i = 0; i < 3; ++i) {
    const Vector3d d = pan.v[i] - y;
    v2[i] = {d.dot(e1), d.dot(e2)};
    ang[i] = std::atan2(v2[i].y(), v2[i].x());
  }
  std::sort(ord, ord + 3, [&](int a, int b) { return ang[a] < ang[b]; });

  const bool vp = kern.odd_vp();
  Matrix3d B = Matrix3d::Zero();
  std::vector<double> xt, wt, xr, wr;
  for (int s = 0; s < 3; ++s) {
    const int i0 = ord[s], i1 = ord[(s + 1) % 3];
    const double th0 = ang[i0];
    const double th1 = (s == 2) ? ang[ord[0]] + 2.0 * M_PI : ang[i1];
    const Eigen::Vector2d P = v2[i0], E = v2[i1] - v2[i0];
    quad::gauss_on_interval(q.panel_theta, th0, th1, xt, wt);
    for (int t = 0; t < q.panel_theta; ++t) {
      const double ct = std::cos(xt[t]), st = std::sin(xt[t]);
      const double R = (P.x() * E.y() - P.y() * E.x()) / (ct * E.y() - st * E.x());
      const Vector3d w = ct * e1 + st * e2;
      const Matrix3d S = vp ? kern.odd_strength(n, w) : Matrix3d::Zero();
      Matrix3d acc = vp ? Matrix3d(std::log(R) * S) : Matrix3d(Matrix3d::Zero());
      quad::gauss_on_interval(q.panel_radial, 0.0, R, xr, wr);
      for (int i = 0; i < q.panel_radial; ++i) {
        const double r = xr[i];
        Matrix3d f = r * kern.surf(y + r * w, n, r * w);
        if (vp) f -= S / r;
        acc += wr[i] * f;
      }
      B += wt[t] * acc;
    }
  }
  return B;
}

// Midpoint rule once the piece is smaller than ratio * its distance to the
// target; the ratio is 1 / near_factor so deepening the near budget actually
// tightens the whole band, not just the branch threshold.
template <class K>
void subdivide_triangle(const K& kern, const Vector3d& v0, const Vector3d& v1, const Vector3d& v2,
                        const Vector3d& n, const Vector3d& y, double ratio, int depth,
                        int max_depth, Matrix3d& B) {
  const Vector3d c = (v0 + v1 + v2) / 3.0;
  const double diam =
      std::max({(v1 - v0).norm(), (v2 - v1).norm(), (v0 - v2).norm()});
  if (depth >= max_depth || diam <= ratio * (c - y).norm()) {
    const double area = 0.5 * (v1 - v0).cross(v2 - v0).norm();
    B += area * kern.surf(c, n, c - y);
    return;
  }
  const Vector3d m01 = 0.5 * (v0 + v1), m12 = 0.5 * (v1 + v2), m02 = 0.5 * (v0 + v2);
  subdivide_triangle(kern, v0, m01, m02, n, y, ratio, depth + 1, max_depth, B);
  subdivide_triangle(kern, m01, v1, m12, n, y, ratio, depth + 1, max_depth, B);
  subdivide_triangle(kern, m02, m12, v2, n, y, ratio, depth + 1, max_depth, B);
  subdivide_triangle(kern, m01, m12, m02, n, y, ratio, depth + 1, max_depth, B);
}

// self >= 0 marks the panel whose centroid is the target.
template <class K, class Sink>
void surface_row(const K& kern, const SurfaceMesh& sm, const Vector3d& y, int self,
                 const QuadratureBudget& q, Sink&& sink) {
  const double eps = kern.ks.chi.eps;
  const double nf = std::max(q.near_factor, 1.0);
  for (std::size_t j = 0; j < sm.panels.size(); ++j) {
    const SurfacePanel& pan = sm.panels[j];
    const Vector3d z = pan.centroid - y;
    const double d = z.norm();
    if (d >= eps + pan.diameter) continue;
    if (static_cast<int>(j) == self) {
      sink(j, polar_panel_block(kern, pan, q));
    } else if (d < nf * pan.diameter) {
      Matrix3d B = Matrix3d::Zero();
      subdivide_triangle(kern, pan.v[0], pan.v[1], pan.v[2], pan.normal, y, 1.0 / nf, 0,
                         q.panel_subdiv, B);
      sink(j, B);
    } else {
      sink(j, pan.area * kern.surf(pan.centroid, pan.normal, z));
    }
  }
}

// ---------------------------------------------------------------------------
// Row scheduling shared by the parallel entry points and the serial twins
// ---------------------------------------------------------------------------

template <class Body>
void for_each_target(bool parallel, std::int64_t n, Body&& body) {
  if (parallel)
    parallel_for(n, body);
  else
    serial_for(n, body);
}

template <class MakeKernel>
Eigen::MatrixXd assemble_volume_op(const VolumeMesh& vm, const std::vector<Vector3d>& targets,
                                   const QuadratureBudget& q, bool parallel, MakeKernel&& make) {
  Eigen::MatrixXd M =
      Eigen::MatrixXd::Zero(3 * static_cast<int>(targets.size()), 3 * static_cast<int>(vm.cells.size()));
  for_each_target(parallel, static_cast<std::int64_t>(targets.size()), [&](std::int64_t i) {
    const auto kern = make(targets[i]);
    volume_row(kern, vm, targets[i], q, [&](std::size_t j, const Matrix3d& B) {
      M.block<3, 3>(3 * i, 3 * static_cast<int>(j)) = B;
    });
  });
  return M;
}

template <class MakeKernel>
VecField apply_volume_op(const VolumeMesh& vm, const VecField& density,
                         const std::vector<Vector3d>& targets, const QuadratureBudget& q,
                         bool parallel, MakeKernel&& make) {
  VecField out(targets.size());
  for_each_target(parallel, static_cast<std::int64_t>(targets.size()), [&](std::int64_t i) {
    const auto kern = make(targets[i]);
    Vector3d acc = Vector3d::Zero();
    volume_row(kern, vm, targets[i], q,
               [&](std::size_t j, const Matrix3d& B) { acc += B * density[j]; });
    out[i] = acc;
  });
  return out;
}

// Boundary trace of a volume operator by quadratic Richardson extrapolation
// along -n with offsets {d, d/2, d/4}, d the panel diameter:
//   row = (8 row(y - d/4 n) - 6 row(y - d/2 n) + row(y - d n)) / 3.
template <class MakeKernel>
Eigen::MatrixXd assemble_volume_trace(const VolumeMesh& vm, const SurfaceMesh& sm,
                                      const QuadratureBudget& q, bool parallel,
                                      MakeKernel&& make) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3 * static_cast<int>(sm.panels.size()),
                                            3 * static_cast<int>(vm.cells.size()));
  constexpr double shift[3] = {1.0, 0.5, 0.25};
  constexpr double wgt[3] = {1.0 / 3.0, -2.0, 8.0 / 3.0};
  for_each_target(parallel, static_cast<std::int64_t>(sm.panels.size()), [&](std::int64_t i) {
    const SurfacePanel& pan = sm.panels[i];
    for (int s = 0; s < 3; ++s) {
      const Vector3d y = pan.centroid - shift[s] * pan.diameter * pan.normal;
      const auto kern = make(y);
      volume_row(kern, vm, y, q, [&](std::size_t j, const Matrix3d& B) {
        M.block<3, 3>(3 * i, 3 * static_cast<int>(j)) += wgt[s] * B;
      });
    }
  });
  return M;
}

template <class MakeKernel>
Eigen::MatrixXd assemble_surface_op(const SurfaceMesh& sm, const std::vector<Vector3d>& targets,
                                    const std::vector<int>& self, const QuadratureBudget& q,
                                    bool parallel, MakeKernel&& make) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3 * static_cast<int>(targets.size()),
                                            3 * static_cast<int>(sm.panels.size()));
  for_each_target(parallel, static_cast<std::int64_t>(targets.size()), [&](std::int64_t i) {
    const auto kern = make(static_cast<std::size_t>(i), targets[i]);
    surface_row(kern, sm, targets[i], self.empty() ? -1 : self[i], q,
                [&](std::size_t j, const Matrix3d& B) {
                  M.block<3, 3>(3 * i, 3 * static_cast<int>(j)) = B;
                });
  });
  return M;
}

template <class MakeKernel>
VecField apply_surface_op(const SurfaceMesh& sm, const VecField& density,
                          const std::vector<Vector3d>& targets, const std::vector<int>& self,
                          const QuadratureBudget& q, bool parallel, MakeKernel&& make) {
  VecField out(targets.size());
  for_each_target(parallel, static_cast<std::int64_t>(targets.size()), [&](std::int64_t i) {
    const auto kern = make(static_cast<std::size_t>(i), targets[i]);
    Vector3d acc = Vector3d::Zero();
    surface_row(kern, sm, targets[i], self.empty() ? -1 : self[i], q,
                [&](std::size_t j, const Matrix3d& B) { acc += B * density[j]; });
    out[i] = acc;
  });
  return out;
}

}  // namespace lbdie::detail
