#include "lbdie/coefficients.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "lbdie/expr.hpp"

namespace lbdie {

double Tensor4::pair_symmetry_defect() const {
  double d = 0.0;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
          d = std::max(d, std::abs((*this)(p, q, k, j) - (*this)(q, p, j, k)));
  return d;
}

double Tensor4::interchange_defect() const {
  double d = 0.0;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
          d = std::max(d, std::abs((*this)(p, q, k, j) - (*this)(k, q, p, j)));
  return d;
}

Eigen::Matrix3d Tensor4::contract_symbol(const Eigen::Vector3d& xi) const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) m(p, q) += (*this)(p, q, k, j) * xi[k] * xi[j];
  return m;
}

Eigen::Matrix3d Tensor4::trace_mean() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int k = 0; k < 3; ++k) m(p, q) += (*this)(p, q, k, k) / 3.0;
  return m;
}

Tensor4 rotate(const Tensor4& a, const Eigen::Matrix3d& Q) {
  Tensor4 r;
  for (int p2 = 0; p2 < 3; ++p2)
    for (int q2 = 0; q2 < 3; ++q2)
      for (int k2 = 0; k2 < 3; ++k2)
        for (int j2 = 0; j2 < 3; ++j2) {
          double s = 0.0;
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
              for (int k = 0; k < 3; ++k)
                for (int j = 0; j < 3; ++j)
                  s += Q(p, p2) * Q(q, q2) * Q(k, k2) * Q(j, j2) * a(p, q, k, j);
          r(p2, q2, k2, j2) = s;
        }
  return r;
}

ValidationReport CoefficientField::validate(int n_points, std::uint64_t seed) const {
  ValidationReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  std::vector<Eigen::Vector3d> pts;
  pts.emplace_back(Eigen::Vector3d::Zero());
  if (!constant()) {
    while (static_cast<int>(pts.size()) < n_points) {
      Eigen::Vector3d x(unit(rng), unit(rng), unit(rng));
      if (x.norm() <= 1.0) pts.push_back(x);
    }
  }

  std::vector<Eigen::Vector3d> dirs;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k)
        if (i || j || k) dirs.push_back(Eigen::Vector3d(i, j, k).normalized());

  rep.c1 = std::numeric_limits<double>::infinity();
  rep.c2 = 0.0;
  for (const auto& x : pts) {
    Tensor4 a = tensor(x);
    rep.pair_defect = std::max(rep.pair_defect, a.pair_symmetry_defect());
    rep.interchange_defect = std::max(rep.interchange_defect, a.interchange_defect());
    for (const auto& xi : dirs) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(a.contract_symbol(xi));
      rep.c1 = std::min(rep.c1, es.eigenvalues().minCoeff());
      rep.c2 = std::max(rep.c2, es.eigenvalues().maxCoeff());
    }
  }
  rep.pair_symmetric = rep.pair_defect < 1e-12 * std::max(1.0, rep.c2);
  rep.interchange_symmetric = rep.interchange_defect < 1e-12 * std::max(1.0, rep.c2);
  rep.elliptic = rep.c1 > 0.0;

  std::ostringstream os;
  os << name() << ": c1=" << rep.c1 << " c2=" << rep.c2
     << (rep.interchange_symmetric ? ", interchange-symmetric" : "");
  rep.detail = os.str();
  return rep;
}

namespace {

struct ScalarCoefficient final : CoefficientField {
  expr::Ast c;
  std::array<expr::Ast, 3> dc;
  bool is_const;

  explicit ScalarCoefficient(const std::string& s) {
    c = expr::parse(s);
    dc = {expr::derivative(c, expr::Var::X1), expr::derivative(c, expr::Var::X2),
          expr::derivative(c, expr::Var::X3)};
    is_const = c->kind == expr::Kind::Constant;
  }

  std::string name() const override { return is_const ? "laplace" : "scalar"; }
  bool constant() const override { return is_const; }
  bool scalar() const override { return true; }

  double scalar_value(const Eigen::Vector3d& x) const override {
    return expr::evaluate(c, x[0], x[1], x[2]);
  }
  Eigen::Vector3d scalar_gradient(const Eigen::Vector3d& x) const override {
    return {expr::evaluate(dc[0], x[0], x[1], x[2]), expr::evaluate(dc[1], x[0], x[1], x[2]),
            expr::evaluate(dc[2], x[0], x[1], x[2])};
  }

  Tensor4 tensor(const Eigen::Vector3d& x) const override {
    Tensor4 a;
    double cv = scalar_value(x);
    for (int p = 0; p < 3; ++p)
      for (int k = 0; k < 3; ++k) a(p, p, k, k) = cv;
    return a;
  }
  Tensor3 divergence(const Eigen::Vector3d& x) const override {
    Tensor3 d;
    Eigen::Vector3d g = scalar_gradient(x);
    for (int p = 0; p < 3; ++p)
      for (int j = 0; j < 3; ++j) d(p, p, j) = g[j];
    return d;
  }
};

struct LameCoefficient final : CoefficientField {
  expr::Ast lam, mu;
  std::array<expr::Ast, 3> dlam, dmu;
  bool is_const;

  LameCoefficient(const std::string& l, const std::string& m) {
    lam = expr::parse(l);
    mu = expr::parse(m);
    for (int i = 0; i < 3; ++i) {
      auto v = static_cast<expr::Var>(i);
      dlam[i] = expr::derivative(lam, v);
      dmu[i] = expr::derivative(mu, v);
    }
    is_const = lam->kind == expr::Kind::Constant && mu->kind == expr::Kind::Constant;
  }

  std::string name() const override { return "lame"; }
  bool constant() const override { return is_const; }

  Tensor4 tensor(const Eigen::Vector3d& x) const override {
    double l = expr::evaluate(lam, x[0], x[1], x[2]);
    double m = expr::evaluate(mu, x[0], x[1], x[2]);
    Tensor4 a;
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q)
        for (int k = 0; k < 3; ++k)
          for (int j = 0; j < 3; ++j)
            a(p, q, k, j) = l * (k == p) * (j == q) +
                            m * ((k == j) * (p == q) + (k == q) * (j == p));
    return a;
  }
  Tensor3 divergence(const Eigen::Vector3d& x) const override {
    Tensor3 d;
    if (is_const) return d;
    Eigen::Vector3d gl, gm;
    for (int i = 0; i < 3; ++i) {
      gl[i] = expr::evaluate(dlam[i], x[0], x[1], x[2]);
      gm[i] = expr::evaluate(dmu[i], x[0], x[1], x[2]);
    }
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q)
        for (int j = 0; j < 3; ++j)
          d(p, q, j) = gl[p] * (j == q) + gm[j] * (p == q) + gm[q] * (j == p);
    return d;
  }
};

struct ConstTensorCoefficient final : CoefficientField {
  Tensor4 a;
  std::string label;

  ConstTensorCoefficient(const Tensor4& t, std::string n) : a(t), label(std::move(n)) {}

  std::string name() const override { return label; }
  bool constant() const override { return true; }
  Tensor4 tensor(const Eigen::Vector3d&) const override { return a; }
  Tensor3 divergence(const Eigen::Vector3d&) const override { return {}; }
};

struct GeneralCoefficient final : CoefficientField {
  std::array<expr::Ast, 81> e;
  std::array<expr::Ast, 81> de[3];  // de[k][idx] = d_k of entry idx

  explicit GeneralCoefficient(const std::array<std::string, 81>& s) {
    for (int i = 0; i < 81; ++i) {
      e[i] = expr::parse(s[i]);
      for (int k = 0; k < 3; ++k) de[k][i] = expr::derivative(e[i], static_cast<expr::Var>(k));
    }
  }

  std::string name() const override { return "general"; }
  bool constant() const override { return false; }

  Tensor4 tensor(const Eigen::Vector3d& x) const override {
    Tensor4 a;
    for (int i = 0; i < 81; ++i) a.v[i] = expr::evaluate(e[i], x[0], x[1], x[2]);
    return a;
  }
  Tensor3 divergence(const Eigen::Vector3d& x) const override {
    Tensor3 d;
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q)
        for (int j = 0; j < 3; ++j) {
          double s = 0.0;
          for (int k = 0; k < 3; ++k)
            s += expr::evaluate(de[k][((p * 3 + q) * 3 + k) * 3 + j], x[0], x[1], x[2]);
          d(p, q, j) = s;
        }
    return d;
  }
};

}  // namespace

CoefficientPtr make_laplace() { return std::make_shared<ScalarCoefficient>("1"); }

CoefficientPtr make_scalar_coefficient(const std::string& c_expr) {
  return std::make_shared<ScalarCoefficient>(c_expr);
}

CoefficientPtr make_lame(double lambda, double mu) {
  std::ostringstream l, m;
  l.precision(17);
  m.precision(17);
  l << lambda;
  m << mu;
  return std::make_shared<LameCoefficient>(l.str(), m.str());
}

CoefficientPtr make_lame(const std::string& lambda_expr, const std::string& mu_expr) {
  return std::make_shared<LameCoefficient>(lambda_expr, mu_expr);
}

CoefficientPtr make_constant_tensor(const Tensor4& a, const std::string& name) {
  return std::make_shared<ConstTensorCoefficient>(a, name);
}

CoefficientPtr make_general(const std::array<std::string, 81>& exprs) {
  return std::make_shared<GeneralCoefficient>(exprs);
}

Tensor4 random_admissible_tensor(std::uint64_t seed) {
  // C = G^T G + I over symmetric pairs (k,p) keeps the quadratic form
  // a^{pq}_{kj} xi_k xi_j zeta_p zeta_q bounded below by |sym(xi zeta^T)|^2,
  // which is at least |xi|^2 |zeta|^2 / 2.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Matrix<double, 6, 6> G;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) G(i, j) = gauss(rng);
  Eigen::Matrix<double, 6, 6> C =
      G.transpose() * G / 6.0 + Eigen::Matrix<double, 6, 6>::Identity();

  auto voigt = [](int k, int p) {
    if (k == p) return k;
    int s = k + p;
    return s == 3 ? 3 : (s == 2 ? 4 : 5);  // (1,2)->3, (0,2)->4, (0,1)->5
  };
  Tensor4 a;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) a(p, q, k, j) = C(voigt(k, p), voigt(j, q));
  return a;
}

struct SmoothVectorField::Impl {
  std::array<expr::Ast, 3> u;
  std::array<std::array<expr::Ast, 3>, 3> du;                  // du[q][j] = d_j u_q
  std::array<std::array<std::array<expr::Ast, 3>, 3>, 3> ddu;  // ddu[q][k][j]
};

SmoothVectorField::SmoothVectorField(const std::string& u1, const std::string& u2,
                                     const std::string& u3) {
  auto impl = std::make_shared<Impl>();
  std::array<std::string, 3> s = {u1, u2, u3};
  for (int q = 0; q < 3; ++q) {
    impl->u[q] = expr::parse(s[q]);
    for (int j = 0; j < 3; ++j) {
      impl->du[q][j] = expr::derivative(impl->u[q], static_cast<expr::Var>(j));
      for (int k = 0; k < 3; ++k)
        impl->ddu[q][k][j] = expr::derivative(impl->du[q][j], static_cast<expr::Var>(k));
    }
  }
  impl_ = impl;
}

Eigen::Vector3d SmoothVectorField::value(const Eigen::Vector3d& x) const {
  Eigen::Vector3d v;
  for (int q = 0; q < 3; ++q) v[q] = expr::evaluate(impl_->u[q], x[0], x[1], x[2]);
  return v;
}

Eigen::Matrix3d SmoothVectorField::grad(const Eigen::Vector3d& x) const {
  Eigen::Matrix3d g;
  for (int q = 0; q < 3; ++q)
    for (int j = 0; j < 3; ++j) g(q, j) = expr::evaluate(impl_->du[q][j], x[0], x[1], x[2]);
  return g;
}

std::array<Eigen::Matrix3d, 3> SmoothVectorField::hess(const Eigen::Vector3d& x) const {
  std::array<Eigen::Matrix3d, 3> h;
  for (int q = 0; q < 3; ++q)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        h[q](k, j) = expr::evaluate(impl_->ddu[q][k][j], x[0], x[1], x[2]);
  return h;
}

Eigen::Vector3d apply_A(const CoefficientField& a, const SmoothVectorField& u,
                        const Eigen::Vector3d& x) {
  Tensor4 t = a.tensor(x);
  Tensor3 d = a.divergence(x);
  Eigen::Matrix3d g = u.grad(x);
  auto h = u.hess(x);
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) out[p] += t(p, q, k, j) * h[q](k, j);
        out[p] += d(p, q, j) * g(q, j);
      }
  return out;
}

Eigen::Vector3d conormal(const CoefficientField& a, const Eigen::Vector3d& x,
                         const Eigen::Vector3d& n, const Eigen::Matrix3d& grad_u) {
  Tensor4 t = a.tensor(x);
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) out[p] += t(p, q, k, j) * n[k] * grad_u(q, j);
  return out;
}

double energy_density(const CoefficientField& a, const Eigen::Vector3d& x,
                      const Eigen::Matrix3d& grad_v, const Eigen::Matrix3d& grad_u) {
  Tensor4 t = a.tensor(x);
  double e = 0.0;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) e += t(p, q, k, j) * grad_v(q, j) * grad_u(p, k);
  return e;
}

}  // namespace lbdie
