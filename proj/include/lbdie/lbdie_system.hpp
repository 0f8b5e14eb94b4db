#pragma once

// Coupled volume-boundary system for the Dirichlet problem. Unknowns are the
// field u at cell centroids and the conormal density psi at panel centroids;
// given Dirichlet data phi0 and load f the two collocation rows are
//   (beta + N) u - V psi = Pvol f - W phi0          at cell centroids,
//   N+ u - scriptV psi = Pvol+ f - (beta - mu) phi0 - scriptW phi0   on S.
// The solver is restarted GMRES, right-preconditioned by the block diagonal
// (beta per cell, LU of the boundary single layer).

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbdie/geometry.hpp"
#include "lbdie/kernels.hpp"
#include "lbdie/potentials.hpp"

namespace lbdie {

struct LBDIESystem {
  const KernelSet* ks = nullptr;
  const VolumeMesh* vm = nullptr;
  const SurfaceMesh* sm = nullptr;
  QuadratureBudget quad;

  Eigen::MatrixXd B;   // (beta + N) at cell centroids
  Eigen::MatrixXd Vv;  // single layer at cell centroids
  Eigen::MatrixXd Np;  // trace of N
  Eigen::MatrixXd Vb;  // boundary single layer
  Eigen::MatrixXd Wb;  // boundary double layer (right-hand side only)

  std::size_t cells() const { return vm->cells.size(); }
  std::size_t panels() const { return sm->panels.size(); }
  Eigen::Index dim() const { return B.rows() + Vb.rows(); }

  // Right-hand side for load f (per cell) and Dirichlet data phi0 (per panel).
  Eigen::VectorXd rhs(const VecField& f, const VecField& phi0) const;

  // Block matvec [u; psi] -> [B u - Vv psi; Np u - Vb psi].
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  // Materialized block matrix, for dumps and direct solves in tests.
  Eigen::MatrixXd dense() const;
};

LBDIESystem assemble_system(const KernelSet& ks, const VolumeMesh& vm, const SurfaceMesh& sm,
                            const QuadratureBudget& q = {});

struct SolveOptions {
  int restart = 120;
  int max_iter = 500;
  double tol = 1e-8;
};

struct LBDIESolution {
  VecField u, psi;
  int iterations = 0;
  double residual = 0.0;       // final relative residual
  double cond_estimate = 0.0;  // sigma_max/sigma_min of the last Hessenberg block
  std::vector<double> history;
};

class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(const std::string& what, std::vector<double> hist)
      : std::runtime_error(what), history(std::move(hist)) {}
  std::vector<double> history;
};

// Throws NoConvergence with the residual history attached.
LBDIESolution solve_system(const LBDIESystem& sys, const Eigen::VectorXd& rhs,
                           const SolveOptions& opts = {});

// Volume-weighted relative L2 distance between per-cell fields.
double rel_l2_cells(const VolumeMesh& vm, const VecField& got, const VecField& want);
// Area-weighted relative L2 distance between per-panel fields.
double rel_l2_panels(const SurfaceMesh& sm, const VecField& got, const VecField& want);

}  // namespace lbdie
