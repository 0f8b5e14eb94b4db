#pragma once

// Coefficient tensors a^{pq}_{kj}(x) of second order systems
//   [A u]_p = d_k ( a^{pq}_{kj}(x) d_j u_q ),
// their algebraic invariants, and smooth vector fields used to manufacture
// test solutions. Index order is always a(p,q,k,j): p row of the system,
// q column, k outer derivative, j inner derivative.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace lbdie {

struct Tensor4 {
  std::array<double, 81> v{};

  double& operator()(int p, int q, int k, int j) { return v[((p * 3 + q) * 3 + k) * 3 + j]; }
  double operator()(int p, int q, int k, int j) const {
    return v[((p * 3 + q) * 3 + k) * 3 + j];
  }

  // max |a^{pq}_{kj} - a^{qp}_{jk}|
  double pair_symmetry_defect() const;
  // max |a^{pq}_{kj} - a^{kq}_{pj}|; zero only for elasticity-type tensors
  double interchange_defect() const;

  Eigen::Matrix3d contract_symbol(const Eigen::Vector3d& xi) const;  // a^{pq}_{kl} xi_k xi_l
  Eigen::Matrix3d trace_mean() const;                                // (1/3) a^{pq}_{kk}
};

// a'^{p'q'}_{k'j'} = Q_{pp'} Q_{qq'} Q_{kk'} Q_{jj'} a^{pq}_{kj}, where the
// columns of Q are the new frame axes in old coordinates.
Tensor4 rotate(const Tensor4& a, const Eigen::Matrix3d& Q);

// d_k a^{pq}_{kj}, indexed (p, q, j).
struct Tensor3 {
  std::array<double, 27> v{};
  double& operator()(int p, int q, int j) { return v[(p * 3 + q) * 3 + j]; }
  double operator()(int p, int q, int j) const { return v[(p * 3 + q) * 3 + j]; }
};

struct ValidationReport {
  bool pair_symmetric = false;
  bool interchange_symmetric = false;  // informational, not required
  double pair_defect = 0.0;
  double interchange_defect = 0.0;
  double c1 = 0.0;  // min eigenvalue of the symbol over sampled (x, xi)
  double c2 = 0.0;  // max eigenvalue
  bool elliptic = false;
  std::string detail;
};

class CoefficientField {
 public:
  virtual ~CoefficientField() = default;

  virtual std::string name() const = 0;
  virtual bool constant() const = 0;

  virtual Tensor4 tensor(const Eigen::Vector3d& x) const = 0;
  virtual Tensor3 divergence(const Eigen::Vector3d& x) const = 0;

  // a = c(x) I (a^{pq}_{kj} = c delta_pq delta_kj); enables a cheaper kernel path.
  virtual bool scalar() const { return false; }
  virtual double scalar_value(const Eigen::Vector3d&) const { return 0.0; }
  virtual Eigen::Vector3d scalar_gradient(const Eigen::Vector3d&) const {
    return Eigen::Vector3d::Zero();
  }

  Eigen::Matrix3d symbol(const Eigen::Vector3d& x, const Eigen::Vector3d& xi) const {
    return tensor(x).contract_symbol(xi);
  }
  Eigen::Matrix3d beta(const Eigen::Vector3d& x) const { return tensor(x).trace_mean(); }
  Eigen::Matrix3d mu(const Eigen::Vector3d& x, const Eigen::Vector3d& n) const {
    return 0.5 * symbol(x, n);
  }

  ValidationReport validate(int n_points = 64, std::uint64_t seed = 7) const;
};

using CoefficientPtr = std::shared_ptr<const CoefficientField>;

CoefficientPtr make_laplace();
CoefficientPtr make_scalar_coefficient(const std::string& c_expr);
CoefficientPtr make_lame(double lambda, double mu);
CoefficientPtr make_lame(const std::string& lambda_expr, const std::string& mu_expr);
CoefficientPtr make_constant_tensor(const Tensor4& a, const std::string& name = "tensor");
// 81 expression strings indexed (p,q,k,j) in the Tensor4 layout.
CoefficientPtr make_general(const std::array<std::string, 81>& exprs);

// Random constant tensor with both symmetries and strong ellipticity,
// built from a random SPD matrix over symmetric index pairs (k,p).
Tensor4 random_admissible_tensor(std::uint64_t seed);

// Vector field with analytic derivatives, for manufactured solutions.
class SmoothVectorField {
 public:
  SmoothVectorField(const std::string& u1, const std::string& u2, const std::string& u3);

  Eigen::Vector3d value(const Eigen::Vector3d& x) const;
  // grad(q, j) = d_j u_q
  Eigen::Matrix3d grad(const Eigen::Vector3d& x) const;
  // hess(q, k, j) = d_k d_j u_q, returned as hess[q](k, j)
  std::array<Eigen::Matrix3d, 3> hess(const Eigen::Vector3d& x) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// [A u]_p = a^{pq}_{kj} d_k d_j u_q + (d_k a^{pq}_{kj}) d_j u_q
Eigen::Vector3d apply_A(const CoefficientField& a, const SmoothVectorField& u,
                        const Eigen::Vector3d& x);

// [T u]_p = a^{pq}_{kj} n_k d_j u_q
Eigen::Vector3d conormal(const CoefficientField& a, const Eigen::Vector3d& x,
                         const Eigen::Vector3d& n, const Eigen::Matrix3d& grad_u);

// E(v, u) = a^{pq}_{kj} d_j v_q d_k u_p
double energy_density(const CoefficientField& a, const Eigen::Vector3d& x,
                      const Eigen::Matrix3d& grad_v, const Eigen::Matrix3d& grad_u);

}  // namespace lbdie
