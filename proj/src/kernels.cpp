#include "lbdie/kernels.hpp"

#include <cmath>

namespace lbdie {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

// hess(k,j) = d_k d_j (1/r) = (3 z_k z_j - r^2 delta_kj) / r^5
Eigen::Matrix3d hess_inv_r(const Eigen::Vector3d& z, double r) {
  double r5 = std::pow(r, 5);
  Eigen::Matrix3d h = 3.0 / r5 * z * z.transpose();
  h.diagonal().array() -= 1.0 / (r * r * r);
  return h;
}

}  // namespace

double KernelSet::P_Delta(const Eigen::Vector3d& z) const {
  double r = z.norm();
  return -chi.chi(r) / (kFourPi * r);
}

Eigen::Vector3d KernelSet::grad_P_Delta(const Eigen::Vector3d& z) const {
  double r = z.norm();
  return -(chi.dchi(r) * r - chi.chi(r)) / (kFourPi * r * r * r) * z;
}

Eigen::Matrix3d KernelSet::K_frozen(const Tensor4& ay, const Eigen::Vector3d& z) {
  double r = z.norm();
  Eigen::Matrix3d h = hess_inv_r(z, r);
  Eigen::Matrix3d out;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) s += ay(p, q, k, j) * h(k, j);
      out(p, q) = -s / kFourPi;
    }
  return out;
}

Eigen::Matrix3d KernelSet::K_frozen_angular(const Tensor4& ay, const Eigen::Vector3d& w) {
  Eigen::Matrix3d m = 3.0 * w * w.transpose() - Eigen::Matrix3d::Identity();
  Eigen::Matrix3d out;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) s += ay(p, q, k, j) * m(k, j);
      out(p, q) = -s / kFourPi;
    }
  return out;
}

Eigen::Matrix3d KernelSet::R_hat(const Tensor4& ax, const Tensor3& divax, const Tensor4& ay,
                                 const Eigen::Vector3d& z) const {
  double r = z.norm();
  double c = chi.chi(r), c1 = chi.dchi(r), c2 = chi.d2chi(r);
  if (c == 0.0 && c1 == 0.0 && c2 == 0.0) return Eigen::Matrix3d::Zero();

  Eigen::Matrix3d h = hess_inv_r(z, r);
  Eigen::Vector3d grad_inv_r = -z / (r * r * r);
  Eigen::Vector3d grad_chi = c1 / r * z;
  // d_k d_j chi = chi'' z_k z_j / r^2 + chi' (delta_kj / r - z_k z_j / r^3)
  Eigen::Matrix3d hess_chi = (c2 / (r * r) - c1 / (r * r * r)) * z * z.transpose();
  hess_chi.diagonal().array() += c1 / r;

  Eigen::Matrix3d out;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) {
          s += c * (ax(p, q, k, j) - ay(p, q, k, j)) * h(k, j);
          s += ax(p, q, k, j) * (hess_chi(k, j) / r + grad_chi[j] * grad_inv_r[k] +
                                 grad_chi[k] * grad_inv_r[j]);
        }
      for (int j = 0; j < 3; ++j) {
        double da = divax(p, q, j);
        s += da * (grad_chi[j] / r + c * grad_inv_r[j]);
      }
      out(p, q) = -s / kFourPi;
    }
  return out;
}

Eigen::Matrix3d KernelSet::R_hat(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const {
  return R_hat(a->tensor(x), a->divergence(x), a->tensor(y), x - y);
}

double KernelSet::R_hat_scalar(double cx, const Eigen::Vector3d& grad_cx,
                               const Eigen::Vector3d& z) const {
  // Contracting with delta_pq delta_kj kills the frozen-difference term
  // (d_k d_j (1/r) is traceless for r > 0) and leaves
  //   -(1/4pi) [ c(x) chi''(r)/r + (grad c . z)(chi'/r^2 - chi/r^3) ].
  double r = z.norm();
  double c = chi.chi(r), c1 = chi.dchi(r), c2 = chi.d2chi(r);
  if (c == 0.0 && c1 == 0.0 && c2 == 0.0) return 0.0;
  double gz = grad_cx.dot(z);
  return -(cx * c2 / r + gz * (c1 / (r * r) - c / (r * r * r))) / kFourPi;
}

Eigen::Matrix3d KernelSet::R(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const {
  Eigen::Vector3d z = x - y;
  double r = z.norm();
  double c = chi.chi(r), c1 = chi.dchi(r), c2 = chi.d2chi(r);

  Tensor4 ax = a->tensor(x);
  Tensor3 divax = a->divergence(x);
  Eigen::Matrix3d h = hess_inv_r(z, r);
  Eigen::Vector3d grad_inv_r = -z / (r * r * r);
  Eigen::Vector3d grad_chi = c1 / r * z;
  Eigen::Matrix3d hess_chi = (c2 / (r * r) - c1 / (r * r * r)) * z * z.transpose();
  hess_chi.diagonal().array() += c1 / r;

  Eigen::Matrix3d out;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
          s += ax(p, q, k, j) * ((c - 1.0) * h(k, j) + hess_chi(k, j) / r +
                                 grad_chi[j] * grad_inv_r[k] + grad_chi[k] * grad_inv_r[j]);
      for (int j = 0; j < 3; ++j)
        s += divax(p, q, j) * (grad_chi[j] / r + c * grad_inv_r[j]);
      out(p, q) = -s / kFourPi;
    }
  return out;
}

Eigen::Matrix3d KernelSet::R1(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const {
  Eigen::Vector3d z = x - y;
  double r = z.norm();
  Tensor4 ax = a->tensor(x), ay = a->tensor(y);
  Eigen::Matrix3d h = hess_inv_r(z, r);
  Eigen::Matrix3d diff;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) s += (ax(p, q, k, j) - ay(p, q, k, j)) * h(k, j);
      diff(p, q) = s / kFourPi;
    }
  return R(x, y) - diff;
}

double KernelSet::R_Delta(const Eigen::Vector3d& z) const {
  double r = z.norm();
  return -chi.d2chi(r) / (kFourPi * r);
}

Eigen::Matrix3d KernelSet::AP_direct(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const {
  Eigen::Vector3d z = x - y;
  double r = z.norm();
  double c = chi.chi(r), c1 = chi.dchi(r), c2 = chi.d2chi(r);

  double F = -1.0 / (kFourPi * r);
  Eigen::Vector3d grad_F = z / (kFourPi * r * r * r);
  Eigen::Matrix3d hess_F = -hess_inv_r(z, r) / kFourPi;
  Eigen::Vector3d grad_chi = c1 / r * z;
  Eigen::Matrix3d hess_chi = (c2 / (r * r) - c1 / (r * r * r)) * z * z.transpose();
  hess_chi.diagonal().array() += c1 / r;

  // d_j (chi F) and d_k d_j (chi F) by the product rule
  Eigen::Vector3d g = grad_chi * F + c * grad_F;
  Eigen::Matrix3d H = hess_chi * F + grad_chi * grad_F.transpose() +
                      grad_F * grad_chi.transpose() + c * hess_F;

  Tensor4 ax = a->tensor(x);
  Tensor3 divax = a->divergence(x);
  Eigen::Matrix3d out;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) s += ax(p, q, k, j) * H(k, j);
      for (int j = 0; j < 3; ++j) s += divax(p, q, j) * g[j];
      out(p, q) = s;
    }
  return out;
}

Eigen::Matrix3d KernelSet::traction_at_source(const Eigen::Vector3d& x,
                                              const Eigen::Vector3d& n,
                                              const Eigen::Vector3d& z) const {
  Eigen::Vector3d gp = grad_P_Delta(z);
  Tensor4 ax = a->tensor(x);
  Eigen::Matrix3d out;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) s += ax(p, q, k, j) * n[k] * gp[j];
      out(p, q) = s;
    }
  return out;
}

Eigen::Matrix3d KernelSet::traction_at_source_T(const Eigen::Vector3d& x,
                                                const Eigen::Vector3d& n,
                                                const Eigen::Vector3d& z) const {
  return traction_at_source(x, n, z).transpose();
}

Eigen::Matrix3d KernelSet::traction_at_target(const Eigen::Vector3d& y,
                                              const Eigen::Vector3d& ny,
                                              const Eigen::Vector3d& z) const {
  Eigen::Vector3d gp = grad_P_Delta(z);
  Tensor4 ay = a->tensor(y);
  Eigen::Matrix3d out;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) s += ay(p, q, k, j) * ny[k] * gp[j];
      out(p, q) = -s;
    }
  return out;
}

}  // namespace lbdie
