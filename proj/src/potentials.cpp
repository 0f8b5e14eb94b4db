#include "lbdie/potentials.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "potentials_detail.hpp"

namespace lbdie {

using detail::Matrix3d;
using detail::Vector3d;

namespace {

std::vector<int> iota_ids(std::size_t n) {
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

std::vector<Vector3d> panel_centroids(const SurfaceMesh& sm) {
  std::vector<Vector3d> c(sm.panels.size());
  for (std::size_t i = 0; i < sm.panels.size(); ++i) c[i] = sm.panels[i].centroid;
  return c;
}

JumpReport compare_fields(const VecField& lhs, const VecField& rhs) {
  double num_max = 0.0, den_max = 0.0, num_sq = 0.0, den_sq = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    num_max = std::max(num_max, (lhs[i] - rhs[i]).norm());
    den_max = std::max(den_max, rhs[i].norm());
    num_sq += (lhs[i] - rhs[i]).squaredNorm();
    den_sq += rhs[i].squaredNorm();
  }
  JumpReport r;
  r.max_rel = num_max / std::max(den_max, 1e-300);
  r.l2_rel = std::sqrt(num_sq / std::max(den_sq, 1e-300));
  return r;
}

}  // namespace

Eigen::MatrixXd assemble_Pvol(const KernelSet& ks, const VolumeMesh& vm,
                              const std::vector<Vector3d>& targets, const QuadratureBudget& q) {
  return detail::assemble_volume_op(vm, targets, q, true,
                                    [&](const Vector3d& y) { return detail::PvolKernel(ks, y); });
}

Eigen::MatrixXd assemble_N(const KernelSet& ks, const VolumeMesh& vm,
                           const std::vector<Vector3d>& targets, const QuadratureBudget& q) {
  return detail::assemble_volume_op(vm, targets, q, true,
                                    [&](const Vector3d& y) { return detail::NKernel(ks, y); });
}

Eigen::MatrixXd assemble_V(const KernelSet& ks, const SurfaceMesh& sm,
                           const std::vector<Vector3d>& targets, const QuadratureBudget& q) {
  return detail::assemble_surface_op(
      sm, targets, {}, q, true, [&](std::size_t, const Vector3d&) { return detail::VKernel(ks); });
}

Eigen::MatrixXd assemble_W(const KernelSet& ks, const SurfaceMesh& sm,
                           const std::vector<Vector3d>& targets, const QuadratureBudget& q) {
  return detail::assemble_surface_op(
      sm, targets, {}, q, true,
      [&](std::size_t, const Vector3d& y) { return detail::WKernel(ks, y); });
}

Eigen::MatrixXd assemble_N_trace(const KernelSet& ks, const VolumeMesh& vm, const SurfaceMesh& sm,
                                 const QuadratureBudget& q) {
  return detail::assemble_volume_trace(vm, sm, q, true,
                                       [&](const Vector3d& y) { return detail::NKernel(ks, y); });
}

Eigen::MatrixXd assemble_Pvol_trace(const KernelSet& ks, const VolumeMesh& vm,
                                    const SurfaceMesh& sm, const QuadratureBudget& q) {
  return detail::assemble_volume_trace(
      vm, sm, q, true, [&](const Vector3d& y) { return detail::PvolKernel(ks, y); });
}

BoundaryOps assemble_boundary_ops(const KernelSet& ks, const SurfaceMesh& sm,
                                  const QuadratureBudget& q) {
  const auto targets = panel_centroids(sm);
  const auto self = iota_ids(sm.panels.size());
  BoundaryOps ops;
  ops.V = detail::assemble_surface_op(
      sm, targets, self, q, true,
      [&](std::size_t, const Vector3d&) { return detail::VKernel(ks); });
  ops.W = detail::assemble_surface_op(
      sm, targets, self, q, true,
      [&](std::size_t, const Vector3d& y) { return detail::WKernel(ks, y); });
  ops.Wp = detail::assemble_surface_op(
      sm, targets, self, q, true, [&](std::size_t i, const Vector3d& y) {
        return detail::WpKernel(ks, y, sm.panels[i].normal);
      });
  return ops;
}

VecField apply_Pvol(const KernelSet& ks, const VolumeMesh& vm, const VecField& density,
                    const std::vector<Vector3d>& targets, const QuadratureBudget& q) {
  return detail::apply_volume_op(vm, density, targets, q, true,
                                 [&](const Vector3d& y) { return detail::PvolKernel(ks, y); });
}

VecField apply_N(const KernelSet& ks, const VolumeMesh& vm, const VecField& density,
                 const std::vector<Vector3d>& targets, const QuadratureBudget& q) {
  return detail::apply_volume_op(vm, density, targets, q, true,
                                 [&](const Vector3d& y) { return detail::NKernel(ks, y); });
}

VecField apply_V(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                 const std::vector<Vector3d>& targets, const QuadratureBudget& q) {
  return detail::apply_surface_op(
      sm, density, targets, {}, q, true,
      [&](std::size_t, const Vector3d&) { return detail::VKernel(ks); });
}

VecField apply_W(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                 const std::vector<Vector3d>& targets, const QuadratureBudget& q) {
  return detail::apply_surface_op(
      sm, density, targets, {}, q, true,
      [&](std::size_t, const Vector3d& y) { return detail::WKernel(ks, y); });
}

VecField apply_V_traction(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                          const std::vector<Vector3d>& targets,
                          const std::vector<Vector3d>& target_normals, const QuadratureBudget& q) {
  if (target_normals.size() != targets.size())
    throw std::invalid_argument("apply_V_traction: one normal per target required");
  return detail::apply_surface_op(
      sm, density, targets, {}, q, true, [&](std::size_t i, const Vector3d& y) {
        return detail::WpKernel(ks, y, target_normals[i]);
      });
}

VecField apply_Q(const KernelSet& ks, const VolumeMesh& vm,
                 const std::vector<Matrix3d>& grad_u, const std::vector<Vector3d>& targets,
                 const QuadratureBudget& q) {
  const std::size_t nc = vm.cells.size();
  if (grad_u.size() != nc) throw std::invalid_argument("apply_Q: one gradient per cell required");

  // G_pk(c_j) = a^{pq}_{kl}(c_j) d_l u_q, then Q u = sum_k grad-Pvol pass k
  // against the k-th column of G.
  std::vector<Matrix3d> G(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    const Tensor4 a = ks.a->tensor(vm.cells[j].centroid);
    Matrix3d g = Matrix3d::Zero();
    for (int p = 0; p < 3; ++p)
      for (int k = 0; k < 3; ++k) {
        double s = 0.0;
        for (int qq = 0; qq < 3; ++qq)
          for (int l = 0; l < 3; ++l) s += a(p, qq, k, l) * grad_u[j](qq, l);
        g(p, k) = s;
      }
    G[j] = g;
  }

  VecField out(targets.size(), Vector3d::Zero());
  VecField col(nc);
  for (int k = 0; k < 3; ++k) {
    for (std::size_t j = 0; j < nc; ++j) col[j] = G[j].col(k);
    const VecField part = detail::apply_volume_op(
        vm, col, targets, q, true,
        [&](const Vector3d&) { return detail::GradPvolKernel(ks, k); });
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += part[i];
  }
  return out;
}

namespace {

// Quadratic Richardson toward the surface: offsets {d, d/2, d/4} along the
// normal (d the panel diameter), limit (8 v(d/4) - 6 v(d/2) + v(d)) / 3.
// The layer fields are one-sidedly smooth, so this removes the O(delta) and
// O(delta^2) terms of the approach. The near quadrature is deepened to keep
// the closest offset resolved.
template <class Apply>
VecField extrapolate_to_surface(const SurfaceMesh& sm, double side, const QuadratureBudget& q,
                                Apply&& apply) {
  const std::size_t np = sm.panels.size();
  QuadratureBudget qn = q;
  qn.panel_subdiv = std::max(q.panel_subdiv, 6);
  std::vector<Vector3d> y(np);
  VecField vals[3];
  const double scale[3] = {1.0, 0.5, 0.25};
  for (int s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < np; ++i)
      y[i] = sm.panels[i].centroid + side * scale[s] * sm.panels[i].diameter * sm.panels[i].normal;
    vals[s] = apply(y, qn);
  }
  VecField out(np);
  for (std::size_t i = 0; i < np; ++i)
    out[i] = (8.0 * vals[2][i] - 6.0 * vals[1][i] + vals[0][i]) / 3.0;
  return out;
}

}  // namespace

JumpReport jump_test_V(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                       bool interior, const QuadratureBudget& q) {
  const std::size_t np = sm.panels.size();
  const VecField lhs = extrapolate_to_surface(
      sm, interior ? -1.0 : 1.0, q,
      [&](const std::vector<Vector3d>& y, const QuadratureBudget& qn) {
        return apply_V(ks, sm, density, y, qn);
      });
  const VecField rhs = detail::apply_surface_op(
      sm, density, panel_centroids(sm), iota_ids(np), q, true,
      [&](std::size_t, const Vector3d&) { return detail::VKernel(ks); });
  return compare_fields(lhs, rhs);
}

JumpReport jump_test_W(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                       const QuadratureBudget& q) {
  const std::size_t np = sm.panels.size();
  VecField lhs = extrapolate_to_surface(
      sm, -1.0, q, [&](const std::vector<Vector3d>& y, const QuadratureBudget& qn) {
        return apply_W(ks, sm, density, y, qn);
      });
  for (std::size_t i = 0; i < np; ++i) {
    const SurfacePanel& pan = sm.panels[i];
    lhs[i] += ks.a->mu(pan.centroid, pan.normal) * density[i];
  }
  const VecField rhs = detail::apply_surface_op(
      sm, density, panel_centroids(sm), iota_ids(np), q, true,
      [&](std::size_t, const Vector3d& y) { return detail::WKernel(ks, y); });
  return compare_fields(lhs, rhs);
}

JumpReport jump_test_TV(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                        const QuadratureBudget& q) {
  const std::size_t np = sm.panels.size();
  std::vector<Vector3d> normals(np);
  for (std::size_t i = 0; i < np; ++i) normals[i] = sm.panels[i].normal;
  auto traction = [&](const std::vector<Vector3d>& y, const QuadratureBudget& qn) {
    return apply_V_traction(ks, sm, density, y, normals, qn);
  };
  // Two-sided difference: the common W' part cancels along with most of its
  // quadrature error, leaving the pure traction jump 2 mu g.
  const VecField tin = extrapolate_to_surface(sm, -1.0, q, traction);
  const VecField tout = extrapolate_to_surface(sm, 1.0, q, traction);
  VecField lhs(np), rhs(np);
  for (std::size_t i = 0; i < np; ++i) {
    const SurfacePanel& pan = sm.panels[i];
    lhs[i] = tin[i] - tout[i];
    rhs[i] = 2.0 * ks.a->mu(pan.centroid, pan.normal) * density[i];
  }
  return compare_fields(lhs, rhs);
}

void dump_block_operator(const std::string& path, const Eigen::MatrixXd& m) {
  if (m.rows() % 3 != 0 || m.cols() % 3 != 0)
    throw std::invalid_argument("dump_block_operator: dimensions must be multiples of 3");
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("dump_block_operator: cannot open " + path);
  std::fprintf(f, "# block rows %lld block cols %lld\n",
               static_cast<long long>(m.rows() / 3), static_cast<long long>(m.cols() / 3));
  for (Eigen::Index bi = 0; bi < m.rows() / 3; ++bi)
    for (Eigen::Index bj = 0; bj < m.cols() / 3; ++bj) {
      std::fprintf(f, "%lld %lld", static_cast<long long>(bi), static_cast<long long>(bj));
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) std::fprintf(f, " %.17g", m(3 * bi + r, 3 * bj + c));
      std::fputc('\n', f);
    }
  std::fclose(f);
}

}  // namespace lbdie
