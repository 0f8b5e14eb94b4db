// Serial twins of the matrix-free potential applications. They reuse the row
// engine verbatim; only the target loop is serial, so any difference from the
// parallel lane is a scheduling bug, not roundoff.

#include "lbdie/potentials.hpp"
#include "potentials_detail.hpp"

namespace lbdie {

using detail::Vector3d;

VecField apply_Pvol_serial(const KernelSet& ks, const VolumeMesh& vm, const VecField& density,
                           const std::vector<Vector3d>& targets, const QuadratureBudget& q) {
  return detail::apply_volume_op(vm, density, targets, q, false,
                                 [&](const Vector3d& y) { return detail::PvolKernel(ks, y); });
}

VecField apply_N_serial(const KernelSet& ks, const VolumeMesh& vm, const VecField& density,
                        const std::vector<Vector3d>& targets, const QuadratureBudget& q) {
  return detail::apply_volume_op(vm, density, targets, q, false,
                                 [&](const Vector3d& y) { return detail::NKernel(ks, y); });
}

VecField apply_V_serial(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                        const std::vector<Vector3d>& targets, const QuadratureBudget& q) {
  return detail::apply_surface_op(
      sm, density, targets, {}, q, false,
      [&](std::size_t, const Vector3d&) { return detail::VKernel(ks); });
}

VecField apply_W_serial(const KernelSet& ks, const SurfaceMesh& sm, const VecField& density,
                        const std::vector<Vector3d>& targets, const QuadratureBudget& q) {
  return detail::apply_surface_op(
      sm, density, targets, {}, q, false,
      [&](std::size_t, const Vector3d& y) { return detail::WKernel(ks, y); });
}

}  // namespace lbdie
