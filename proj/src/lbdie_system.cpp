#include "lbdie/lbdie_system.hpp"

#include <algorithm>
#include <cmath>

namespace lbdie {

namespace {

std::vector<Eigen::Vector3d> cell_centroids(const VolumeMesh& vm) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(vm.cells.size());
  for (const auto& c : vm.cells) out.push_back(c.centroid);
  return out;
}

Eigen::VectorXd flatten(const VecField& f) {
  Eigen::VectorXd v(3 * static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) v.segment<3>(3 * i) = f[i];
  return v;
}

VecField unflatten(const Eigen::VectorXd& v, std::size_t n) {
  VecField f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = v.segment<3>(3 * i);
  return f;
}

}  // namespace

LBDIESystem assemble_system(const KernelSet& ks, const VolumeMesh& vm, const SurfaceMesh& sm,
                            const QuadratureBudget& q) {
  LBDIESystem sys;
  sys.ks = &ks;
  sys.vm = &vm;
  sys.sm = &sm;
  sys.quad = q;

  const auto targets = cell_centroids(vm);
  sys.B = assemble_N(ks, vm, targets, q);
  for (std::size_t j = 0; j < vm.cells.size(); ++j)
    sys.B.block<3, 3>(3 * j, 3 * j) += ks.a->beta(vm.cells[j].centroid);

  sys.Vv = assemble_V(ks, sm, targets, q);
  sys.Np = assemble_N_trace(ks, vm, sm, q);

  auto ops = assemble_boundary_ops(ks, sm, q);
  sys.Vb = std::move(ops.V);
  sys.Wb = std::move(ops.W);
  return sys;
}

Eigen::VectorXd LBDIESystem::rhs(const VecField& f, const VecField& phi0) const {
  if (f.size() != cells() || phi0.size() != panels())
    throw std::invalid_argument("rhs: field sizes do not match the meshes");

  const auto targets = cell_centroids(*vm);
  VecField pf = apply_Pvol(*ks, *vm, f, targets, quad);
  VecField wphi = apply_W(*ks, *sm, phi0, targets, quad);

  // Trace of the volume potential by the same three-point offsets as the
  // assembled trace operators.
  std::vector<Eigen::Vector3d> y1(panels()), y2(panels()), y3(panels());
  for (std::size_t i = 0; i < panels(); ++i) {
    const auto& pan = sm->panels[i];
    y1[i] = pan.centroid - pan.diameter * pan.normal;
    y2[i] = pan.centroid - 0.5 * pan.diameter * pan.normal;
    y3[i] = pan.centroid - 0.25 * pan.diameter * pan.normal;
  }
  VecField pf1 = apply_Pvol(*ks, *vm, f, y1, quad);
  VecField pf2 = apply_Pvol(*ks, *vm, f, y2, quad);
  VecField pf3 = apply_Pvol(*ks, *vm, f, y3, quad);

  Eigen::VectorXd b(dim());
  for (std::size_t j = 0; j < cells(); ++j) b.segment<3>(3 * j) = pf[j] - wphi[j];

  const Eigen::Index off = B.rows();
  Eigen::VectorXd phiv = flatten(phi0);
  Eigen::VectorXd wb = Wb * phiv;
  for (std::size_t i = 0; i < panels(); ++i) {
    const auto& pan = sm->panels[i];
    Eigen::Matrix3d bm = ks->a->beta(pan.centroid) - ks->a->mu(pan.centroid, pan.normal);
    b.segment<3>(off + 3 * i) = (8.0 * pf3[i] - 6.0 * pf2[i] + pf1[i]) / 3.0 -
                                bm * phi0[i] - wb.segment<3>(3 * i);
  }
  return b;
}

Eigen::VectorXd LBDIESystem::apply(const Eigen::VectorXd& x) const {
  const Eigen::Index nu = B.rows();
  const Eigen::Index np = Vb.rows();
  Eigen::VectorXd y(nu + np);
  y.head(nu) = B * x.head(nu) - Vv * x.tail(np);
  y.tail(np) = Np * x.head(nu) - Vb * x.tail(np);
  return y;
}

Eigen::MatrixXd LBDIESystem::dense() const {
  const Eigen::Index nu = B.rows();
  const Eigen::Index np = Vb.rows();
  Eigen::MatrixXd D(nu + np, nu + np);
  D.topLeftCorner(nu, nu) = B;
  D.topRightCorner(nu, np) = -Vv;
  D.bottomLeftCorner(np, nu) = Np;
  D.bottomRightCorner(np, np) = -Vb;
  return D;
}

namespace {

// Right preconditioner: beta(c_j)^{-1} per cell block, -Vb^{-1} (via its LU)
// for the boundary block.
struct BlockPrecond {
  std::vector<Eigen::Matrix3d> beta_inv;
  Eigen::PartialPivLU<Eigen::MatrixXd> vlu;
  Eigen::Index nu = 0;

  explicit BlockPrecond(const LBDIESystem& sys) : nu(sys.B.rows()) {
    beta_inv.reserve(sys.cells());
    for (const auto& c : sys.vm->cells)
      beta_inv.push_back(sys.ks->a->beta(c.centroid).inverse());
    vlu.compute(sys.Vb);
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(v.size());
    for (std::size_t j = 0; j < beta_inv.size(); ++j)
      out.segment<3>(3 * j) = beta_inv[j] * v.segment<3>(3 * j);
    out.tail(v.size() - nu) = -vlu.solve(v.tail(v.size() - nu));
    return out;
  }
};

}  // namespace

LBDIESolution solve_system(const LBDIESystem& sys, const Eigen::VectorXd& rhs,
                           const SolveOptions& opts) {
  const Eigen::Index n = sys.dim();
  if (rhs.size() != n) throw std::invalid_argument("solve_system: rhs size mismatch");

  LBDIESolution sol;
  const double bnorm = rhs.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (bnorm == 0.0) {
    sol.u = unflatten(x.head(sys.B.rows()), sys.cells());
    sol.psi = unflatten(x.tail(sys.Vb.rows()), sys.panels());
    return sol;
  }

  BlockPrecond M(sys);
  const int m = std::max(1, opts.restart);
  Eigen::MatrixXd V(n, m + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);

  double rel = 1.0;
  int iters = 0;
  bool done = false;

  while (!done && iters < opts.max_iter) {
    Eigen::VectorXd r = rhs - sys.apply(x);
    double beta = r.norm();
    rel = beta / bnorm;
    if (rel < opts.tol) break;

    V.col(0) = r / beta;
    g.setZero();
    g(0) = beta;
    int k = 0;

    for (int j = 0; j < m && iters < opts.max_iter; ++j, ++iters) {
      Eigen::VectorXd w = sys.apply(M.apply(V.col(j)));
      for (int i = 0; i <= j; ++i) {  // modified Gram-Schmidt
        H(i, j) = w.dot(V.col(i));
        w -= H(i, j) * V.col(i);
      }
      H(j + 1, j) = w.norm();
      const bool breakdown = H(j + 1, j) < 1e-14 * bnorm;
      if (!breakdown) V.col(j + 1) = w / H(j + 1, j);

      for (int i = 0; i < j; ++i) {
        const double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
        H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs(j) = H(j, j) / denom;
      sn(j) = H(j + 1, j) / denom;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);

      k = j + 1;
      rel = std::abs(g(j + 1)) / bnorm;
      sol.history.push_back(rel);
      if (rel < opts.tol || breakdown) {
        done = rel < opts.tol;
        break;
      }
    }

    Eigen::VectorXd y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    x += M.apply(V.leftCols(k) * y);

    // The rotated Hessenberg block is triangular with the same singular values
    // as the projected operator; its extremes give a cheap conditioning probe.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H.topLeftCorner(k, k));
    const double smin = svd.singularValues()(k - 1);
    if (smin > 0.0)
      sol.cond_estimate = std::max(sol.cond_estimate, svd.singularValues()(0) / smin);
  }

  rel = (rhs - sys.apply(x)).norm() / bnorm;
  sol.residual = rel;
  sol.iterations = iters;
  if (rel >= opts.tol && iters >= opts.max_iter)
    throw NoConvergence("GMRES stalled at relative residual " + std::to_string(rel) + " after " +
                            std::to_string(iters) + " iterations",
                        sol.history);

  sol.u = unflatten(x.head(sys.B.rows()), sys.cells());
  sol.psi = unflatten(x.tail(sys.Vb.rows()), sys.panels());
  return sol;
}

double rel_l2_cells(const VolumeMesh& vm, const VecField& got, const VecField& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < vm.cells.size(); ++j) {
    num += vm.cells[j].volume * (got[j] - want[j]).squaredNorm();
    den += vm.cells[j].volume * want[j].squaredNorm();
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

double rel_l2_panels(const SurfaceMesh& sm, const VecField& got, const VecField& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sm.panels.size(); ++i) {
    num += sm.panels[i].area * (got[i] - want[i]).squaredNorm();
    den += sm.panels[i].area * want[i].squaredNorm();
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace lbdie
