#include <cmath>
#include <random>

#include "doctest.h"
#include "lbdie/coefficients.hpp"

using namespace lbdie;

namespace {

Eigen::Matrix3d lame_symbol(double lam, double mu, const Eigen::Vector3d& xi) {
  return mu * xi.squaredNorm() * Eigen::Matrix3d::Identity() + (lam + mu) * xi * xi.transpose();
}

}  // namespace

TEST_CASE("laplace invariants") {
  auto a = make_laplace();
  Eigen::Vector3d x(0.2, -0.1, 0.4);
  CHECK(a->beta(x).isApprox(Eigen::Matrix3d::Identity(), 1e-15));
  Eigen::Vector3d n(1, 2, -2);
  n.normalize();
  CHECK(a->mu(x, n).isApprox(0.5 * Eigen::Matrix3d::Identity(), 1e-15));

  auto rep = a->validate();
  CHECK(rep.pair_symmetric);
  CHECK_FALSE(rep.interchange_symmetric);
  CHECK(rep.c1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rep.c2 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lame invariants at lambda=2, mu=1") {
  auto a = make_lame(2.0, 1.0);
  Eigen::Vector3d x = Eigen::Vector3d::Zero();

  CHECK(a->beta(x).isApprox(2.0 * Eigen::Matrix3d::Identity(), 1e-14));

  Eigen::Matrix3d mu3 = a->mu(x, Eigen::Vector3d::UnitZ());
  Eigen::Matrix3d mu3_expected = Eigen::Vector3d(0.5, 0.5, 2.0).asDiagonal();
  CHECK(mu3.isApprox(mu3_expected, 1e-14));

  Eigen::Vector3d xi(0.3, -0.7, 0.2);
  CHECK(a->symbol(x, xi).isApprox(lame_symbol(2, 1, xi), 1e-13));

  auto rep = a->validate();
  CHECK(rep.pair_symmetric);
  CHECK(rep.interchange_symmetric);
  CHECK(rep.c1 == doctest::Approx(1.0).epsilon(1e-12));  // mu
  CHECK(rep.c2 == doctest::Approx(4.0).epsilon(1e-12));  // lambda + 2 mu
}

TEST_CASE("conormal of a lame shear field") {
  auto a = make_lame(2.0, 1.0);
  // u = (x3, 0, x1): grad has the two off-diagonal entries (1,3) and (3,1)
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  g(0, 2) = 1.0;
  g(2, 0) = 1.0;
  Eigen::Vector3d t = conormal(*a, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitZ(), g);
  CHECK(t.isApprox(Eigen::Vector3d(2.0, 0.0, 0.0), 1e-14));
}

TEST_CASE("energy density closed forms") {
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  g(0, 2) = 1.0;
  g(2, 0) = 1.0;
  Eigen::Vector3d x(0.1, 0.2, 0.3);

  CHECK(energy_density(*make_laplace(), x, g, g) == doctest::Approx(2.0));

  // lame: lambda tr(gv) tr(gu) + mu (gv:gu + gv:gu^T)
  double lam = 2.0, mu = 1.5;
  auto a = make_lame(lam, mu);
  Eigen::Matrix3d gv, gu;
  gv << 1, 2, 0, -1, 0.5, 0, 2, 0, -3;
  gu << 0, 1, 1, 2, -1, 0, 0, 3, 0.5;
  double expected = lam * gv.trace() * gu.trace() +
                    mu * ((gv.array() * gu.array()).sum() +
                          (gv.array() * gu.transpose().array()).sum());
  CHECK(energy_density(*a, x, gv, gu) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("apply_A against closed forms") {
  SmoothVectorField u("x1^2*x2", "sin(x3)", "x1*x2*x3");
  Eigen::Vector3d x(0.3, -0.2, 0.5);

  // laplace: component-wise laplacian
  Eigen::Vector3d lap(2.0 * x[1], -std::sin(x[2]), 0.0);
  CHECK(apply_A(*make_laplace(), u, x).isApprox(lap, 1e-13));

  // scalar c(x): A u = c lap(u) + (grad c . grad) u
  auto c = make_scalar_coefficient("1 + x1^2 + 0.5*x2");
  double cv = 1 + x[0] * x[0] + 0.5 * x[1];
  Eigen::Vector3d gc(2 * x[0], 0.5, 0.0);
  Eigen::Matrix3d g = u.grad(x);
  Eigen::Vector3d expected = cv * lap + g * gc;
  CHECK(apply_A(*c, u, x).isApprox(expected, 1e-12));

  // constant lame: mu lap(u) + (lam + mu) grad(div u);
  // div u = 2 x1 x2 + x1 x2, so grad(div u) = (3 x2, 3 x1, 0)
  double lam = 2.0, mu = 1.0;
  Eigen::Vector3d grad_div(3 * x[1], 3 * x[0], 0.0);
  expected = mu * lap + (lam + mu) * grad_div;
  CHECK(apply_A(*make_lame(lam, mu), u, x).isApprox(expected, 1e-12));
}

TEST_CASE("smooth field derivatives match finite differences") {
  SmoothVectorField u("exp(x1)*x2", "x3^2 - x1", "sin(x2)*x3");
  Eigen::Vector3d x(0.4, -0.3, 0.7);
  double h = 1e-5;
  Eigen::Matrix3d g = u.grad(x);
  for (int j = 0; j < 3; ++j) {
    Eigen::Vector3d xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    Eigen::Vector3d fd = (u.value(xp) - u.value(xm)) / (2 * h);
    for (int q = 0; q < 3; ++q) CHECK(g(q, j) == doctest::Approx(fd[q]).epsilon(1e-8));
  }
  auto hess = u.hess(x);
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    Eigen::Matrix3d fd = (u.grad(xp) - u.grad(xm)) / (2 * h);
    for (int q = 0; q < 3; ++q)
      for (int j = 0; j < 3; ++j) CHECK(hess[q](k, j) == doctest::Approx(fd(q, j)).epsilon(1e-7));
  }
}

TEST_CASE("variable lame divergence matches finite differences") {
  auto a = make_lame("2 + x3", "1 + 0.5*x1");
  Eigen::Vector3d x(0.2, 0.1, -0.3);
  double h = 1e-5;
  Tensor3 d = a->divergence(x);
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int j = 0; j < 3; ++j) {
        double fd = 0.0;
        for (int k = 0; k < 3; ++k) {
          Eigen::Vector3d xp = x, xm = x;
          xp[k] += h;
          xm[k] -= h;
          fd += (a->tensor(xp)(p, q, k, j) - a->tensor(xm)(p, q, k, j)) / (2 * h);
        }
        CHECK(d(p, q, j) == doctest::Approx(fd).epsilon(1e-8));
      }
}

TEST_CASE("random admissible tensors are admissible") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    Tensor4 t = random_admissible_tensor(seed);
    CHECK(t.pair_symmetry_defect() == doctest::Approx(0.0));
    CHECK(t.interchange_defect() == doctest::Approx(0.0));
    auto rep = make_constant_tensor(t)->validate();
    CHECK(rep.elliptic);
    CHECK(rep.c1 >= 0.49);

    // quadratic form with complex zeta stays real and positive
    std::mt19937_64 rng(seed + 100);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::Vector3d xi(U(rng), U(rng), U(rng));
      Eigen::Vector3cd zeta;
      for (int i = 0; i < 3; ++i) zeta[i] = std::complex<double>(U(rng), U(rng));
      Eigen::Matrix3d A = t.contract_symbol(xi);
      std::complex<double> q = zeta.dot(A * zeta);  // conjugates the left factor
      CHECK(std::abs(q.imag()) < 1e-13);
      CHECK(q.real() >= 0.49 * xi.squaredNorm() * zeta.squaredNorm() - 1e-12);
    }
  }
  // distinct seeds give distinct tensors
  CHECK(random_admissible_tensor(1).v != random_admissible_tensor(2).v);
}

TEST_CASE("frame rotation transforms the symbol covariantly") {
  Tensor4 t = random_admissible_tensor(11);
  // rotation about an arbitrary axis
  Eigen::Matrix3d Q = Eigen::AngleAxisd(0.8, Eigen::Vector3d(1, 2, 2).normalized()).matrix();
  Tensor4 tr = rotate(t, Q);
  CHECK(tr.pair_symmetry_defect() == doctest::Approx(0.0).epsilon(1e-12));

  Eigen::Vector3d xi_new(0.3, -0.5, 0.8);
  Eigen::Matrix3d lhs = tr.contract_symbol(xi_new);
  Eigen::Matrix3d rhs = Q.transpose() * t.contract_symbol(Q * xi_new) * Q;
  CHECK(lhs.isApprox(rhs, 1e-12));

  // trace mean transforms as a matrix
  CHECK(tr.trace_mean().isApprox(Q.transpose() * t.trace_mean() * Q, 1e-12));
}

TEST_CASE("general coefficient field from expressions") {
  // variable scalar written out as 81 entries
  std::array<std::string, 81> entries;
  entries.fill("0");
  for (int p = 0; p < 3; ++p)
    for (int k = 0; k < 3; ++k) entries[((p * 3 + p) * 3 + k) * 3 + k] = "1 + x1^2 + 0.5*x2";
  auto gen = make_general(entries);
  auto ref = make_scalar_coefficient("1 + x1^2 + 0.5*x2");
  Eigen::Vector3d x(0.3, -0.4, 0.1);
  Tensor4 tg = gen->tensor(x), tr = ref->tensor(x);
  for (int i = 0; i < 81; ++i) CHECK(tg.v[i] == doctest::Approx(tr.v[i]).epsilon(1e-14));
  Tensor3 dg = gen->divergence(x), dr = ref->divergence(x);
  for (int i = 0; i < 27; ++i) CHECK(dg.v[i] == doctest::Approx(dr.v[i]).epsilon(1e-14));
}
