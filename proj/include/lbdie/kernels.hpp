#pragma once

// Pointwise kernel evaluations for the localized parametrix
//   P(z) = -chi(z) / (4 pi |z|) I,  z = x - y,
// its derivatives, traction kernels, and the weakly singular remainders left
// after splitting off the strong singularity. All evaluations assume z != 0;
// the singular limits are the quadrature code's business.

#include <Eigen/Dense>

#include "lbdie/coefficients.hpp"
#include "lbdie/localizer.hpp"

namespace lbdie {

struct KernelSet {
  CoefficientPtr a;
  LocalizingFunction chi;

  double P_Delta(const Eigen::Vector3d& z) const;
  // gradient in x of P_Delta(x - y), evaluated at z = x - y
  Eigen::Vector3d grad_P_Delta(const Eigen::Vector3d& z) const;

  // Unlocalized frozen-coefficient strong kernel
  //   K(a_y; z)_pq = -a^{pq}_{kj}(y) (3 z_k z_j - |z|^2 delta_kj) / (4 pi |z|^5).
  static Eigen::Matrix3d K_frozen(const Tensor4& ay, const Eigen::Vector3d& z);
  // Angular factor: K(a_y; r w) * r^3 for unit w. The radial profile of the
  // localized strong kernel chi K is then chi(r)/r^3 times this.
  static Eigen::Matrix3d K_frozen_angular(const Tensor4& ay, const Eigen::Vector3d& w);

  // Remainder matched to the localized split
  //   v.p. A(x,d_x) P(x-y) = chi(z) K(a_y; z) + R_hat(x, y):
  // every term carries a factor of chi or its derivatives, so R_hat vanishes
  // identically for |z| >= eps.
  Eigen::Matrix3d R_hat(const Tensor4& ax, const Tensor3& divax, const Tensor4& ay,
                        const Eigen::Vector3d& z) const;
  Eigen::Matrix3d R_hat(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const;
  // Scalar-coefficient path: R_hat = r_hat_scalar * I.
  double R_hat_scalar(double cx, const Eigen::Vector3d& grad_cx,
                      const Eigen::Vector3d& z) const;

  // Remainders of the two classical splits, taken off the coefficient at x
  // (R) and at y (R1):
  //   v.p. A P = v.p. K(a_x; z) + R(x,y) = v.p. K(a_y; z) + R1(x,y).
  Eigen::Matrix3d R(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const;
  Eigen::Matrix3d R1(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const;

  // Scalar remainder for a = I: R = R_Delta * I with
  //   R_Delta(z) = -chi''(r) / (4 pi r).
  double R_Delta(const Eigen::Vector3d& z) const;

  // Literal product-rule evaluation of [A(x,d_x) P(x-y)]_pq for z != 0,
  // used to cross-check the split forms.
  Eigen::Matrix3d AP_direct(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const;

  // Traction kernels for surface potentials; n is the unit normal at the
  // integration point x unless stated otherwise.
  //   [T(x,d_x) P(x-y)]_pq = a^{pq}_{kj}(x) n_k dP_Delta/dz_j (z)
  Eigen::Matrix3d traction_at_source(const Eigen::Vector3d& x, const Eigen::Vector3d& n,
                                     const Eigen::Vector3d& z) const;
  // Transpose of the above; this is the kernel of the double layer.
  Eigen::Matrix3d traction_at_source_T(const Eigen::Vector3d& x, const Eigen::Vector3d& n,
                                       const Eigen::Vector3d& z) const;
  //   [T(y,d_y) P(x-y)]_pq = -a^{pq}_{kj}(y) n_k(y) dP_Delta/dz_j (z)
  Eigen::Matrix3d traction_at_target(const Eigen::Vector3d& y, const Eigen::Vector3d& ny,
                                     const Eigen::Vector3d& z) const;
};

}  // namespace lbdie
