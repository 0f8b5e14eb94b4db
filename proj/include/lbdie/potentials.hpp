#pragma once

// Discrete localized potentials: collocation with piecewise-constant densities
// at centroids. Far blocks are midpoint rule, near blocks are recursively
// subdivided, and singular blocks go through polar coordinates around the
// target. The principal-value blocks use the vanishing spherical mean of the
// frozen kernel: the exclusion ball drops out analytically, and on flat panels
// the odd angular strength S(theta) leaves only a ln R(theta) correction.
//
// Sign conventions follow the parametrix P(z) = -chi/(4 pi |z|) I:
//   [V g](y)  = -int_S  P(x-y) g dS,          [W g](y) = -int_S [T_x P]^T g dS,
//   [Pvol f](y) = int_O P(x-y) f dx,          [N u](y) = v.p. int_O (A_x P) u dx,
// so for the untruncated cutoff on the unit sphere V(c) = c inside and the
// third Green identity reads beta u + N u - V(T+ u) + W(g+ u) = Pvol(A u).

#include <Eigen/Dense>
#include <vector>

#include "lbdie/geometry.hpp"
#include "lbdie/kernels.hpp"

namespace lbdie {

using VecField = std::vector<Eigen::Vector3d>;

struct QuadratureBudget {
  int angular_theta = 16;    // polar nodes over cos(theta) for volume cells
  int angular_phi = 16;      // azimuthal nodes
  int radial = 8;            // radial Gauss nodes per segment
  int panel_theta = 12;      // angular Gauss nodes per triangle sector
  int panel_radial = 8;
  int volume_subdiv = 3;     // octant recursion depth for near cells
  int panel_subdiv = 4;      // 4-split recursion depth for near panels
  double near_factor = 2.0;  // near iff distance < near_factor * diameter
};

// Dense block matrices, rows 3*targets by cols 3*sources.
Eigen::MatrixXd assemble_Pvol(const KernelSet& ks, const VolumeMesh& vm,
                              const std::vector<Eigen::Vector3d>& targets,
                              const QuadratureBudget& q = {});
Eigen::MatrixXd assemble_N(const KernelSet& ks, const VolumeMesh& vm,
                           const std::vector<Eigen::Vector3d>& targets,
                           const QuadratureBudget& q = {});
Eigen::MatrixXd assemble_V(const KernelSet& ks, const SurfaceMesh& sm,
                           const std::vector<Eigen::Vector3d>& targets,
                           const QuadratureBudget& q = {});
Eigen::MatrixXd assemble_W(const KernelSet& ks, const SurfaceMesh& sm,
                           const std::vector<Eigen::Vector3d>& targets,
                           const QuadratureBudget& q = {});

// Traces of the volume potentials on the boundary, collocated at panel
// centroids by quadratic Richardson extrapolation along -n with offsets
// {d, d/2, d/4}, d = panel diameter.
Eigen::MatrixXd assemble_N_trace(const KernelSet& ks, const VolumeMesh& vm,
                                 const SurfaceMesh& sm, const QuadratureBudget& q = {});
Eigen::MatrixXd assemble_Pvol_trace(const KernelSet& ks, const VolumeMesh& vm,
                                    const SurfaceMesh& sm, const QuadratureBudget& q = {});

struct BoundaryOps {
  Eigen::MatrixXd V;   // single layer on S, weakly singular
  Eigen::MatrixXd W;   // direct value of the double layer, principal value
  Eigen::MatrixXd Wp;  // traction of the single layer at the target, principal value
};
BoundaryOps assemble_boundary_ops(const KernelSet& ks, const SurfaceMesh& sm,
                                  const QuadratureBudget& q = {});

// Matrix-free applications sharing the assembly row engine; density holds one
// 3-vector per source cell or panel.
VecField apply_Pvol(const KernelSet& ks, const VolumeMesh& vm, const VecField& density,
                    const std::vector<Eigen::Vector3d>& targets, const QuadratureBudget& q = {});
VecField apply_N(const KernelSet& ks, const VolumeMesh& vm, const VecField& density,
                 const std::vector<Eigen::Vector3d>& targets, const QuadratureBudget& q = {});
VecField apply_V(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                 const std::vector<Eigen::Vector3d>& targets, const QuadratureBudget& q = {});
VecField apply_W(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                 const std::vector<Eigen::Vector3d>& targets, const QuadratureBudget& q = {});

// Conormal derivative of the single layer at off-surface targets, with the
// coefficient and the direction taken at the target:
//   [T V g]_p(y) = -int_S a^{pq}_{kj}(y) n_k dP/dy_j g_q dS.
VecField apply_V_traction(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                          const std::vector<Eigen::Vector3d>& targets,
                          const std::vector<Eigen::Vector3d>& target_normals,
                          const QuadratureBudget& q = {});

// Gradient potential Q u = d_k Pvol_Delta(a^{pq}_{kl} d_l u_q); grad_u holds
// (d_j u_q) as grad(q, j) per cell.
VecField apply_Q(const KernelSet& ks, const VolumeMesh& vm,
                 const std::vector<Eigen::Matrix3d>& grad_u,
                 const std::vector<Eigen::Vector3d>& targets, const QuadratureBudget& q = {});

// Serial reference twins. Row work is identical, only the target loop differs,
// so results match the parallel versions bit for bit.
VecField apply_Pvol_serial(const KernelSet& ks, const VolumeMesh& vm, const VecField& density,
                           const std::vector<Eigen::Vector3d>& targets,
                           const QuadratureBudget& q = {});
VecField apply_N_serial(const KernelSet& ks, const VolumeMesh& vm, const VecField& density,
                        const std::vector<Eigen::Vector3d>& targets,
                        const QuadratureBudget& q = {});
VecField apply_V_serial(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                        const std::vector<Eigen::Vector3d>& targets,
                        const QuadratureBudget& q = {});
VecField apply_W_serial(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                        const std::vector<Eigen::Vector3d>& targets,
                        const QuadratureBudget& q = {});

// Jump-relation probes (Theorem-style checks): evaluate the off-surface
// potential at y -/+ delta n for delta in {d, d/2, d/4}, extrapolate to the
// surface, and compare against the boundary operator plus the mu jump.
struct JumpReport {
  double max_rel = 0.0;   // max_i |lhs_i - rhs_i| / max_i |rhs_i|
  double l2_rel = 0.0;
};
// gamma+- V g vs script-V g (continuous across S)
JumpReport jump_test_V(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                       bool interior, const QuadratureBudget& q = {});
// gamma+ W g + mu g vs script-W g
JumpReport jump_test_W(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                       const QuadratureBudget& q = {});
// traction jump of the single layer: T_in V g - T_out V g vs 2 mu g
JumpReport jump_test_TV(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                        const QuadratureBudget& q = {});

// Coordinate-format text dump of a block matrix (row, col, 9 entries per line)
// for offline inspection.
void dump_block_operator(const std::string& path, const Eigen::MatrixXd& m);

}  // namespace lbdie
