#pragma once

#include <cstdint>
#include <vector>

#include "priest/basis.hpp"
#include "priest/polar.hpp"

namespace priest {

struct ProjectionConfig {
  double rho = 1.0;
  int max_iters = 15;
  double feas_tol = 1e-3;
};

// Immutable per-problem data shared by every sample and iteration. M is the
// inverse of [[I + rho F'F, A'], [A, 0]] and depends only on (F, A, rho).
struct ProjectionWorkspace {
  Eigen::MatrixXd M;
  Eigen::MatrixXd F;
  Eigen::MatrixXd A;
  Eigen::VectorXd tau;
  Eigen::VectorXd b_eq;
  ProjectionConfig cfg;
  int n_o = 0;
  int n_p = 0;
  int n_c = 0;
  // Basis blocks lifted out of F for the structured products.
  Eigen::MatrixXd P, Pdot, Pddot;
};

ProjectionWorkspace precompute_workspace(const PolarConstraintSystem& system,
                                         const BoundaryConstraints& bc,
                                         const ProjectionConfig& cfg);

// F' v without touching the dense F, exploiting the block layout.
Eigen::VectorXd apply_ft(const ProjectionWorkspace& ws, const Eigen::VectorXd& v);

struct QpResult {
  Eigen::VectorXd xi_bar;
  Eigen::VectorXd nu;
};

// argmin 0.5||xi_bar - xi||^2 + (rho/2)||F xi_bar - e||^2 - lambda' xi_bar
// subject to A xi_bar = b_eq, computed as the cached affine map.
QpResult qp_step(const ProjectionWorkspace& ws, const Eigen::VectorXd& xi,
                 const Eigen::VectorXd& e, const Eigen::VectorXd& lambda);

struct ProjectionResult {
  std::vector<Trajectory> trajectories;
  Eigen::VectorXd residuals;       // constraint violation of each final iterate
  Eigen::MatrixXd residual_trace;  // max_iters x N_b, violation at iteration entry
  std::vector<std::uint8_t> aborted;
  double boundary_violation_max = 0.0;  // max ||A xi - b_eq||_inf over all iterates
  std::int64_t boundary_audit_count = 0;
};

// Project every sample toward the feasible set: max_iters sweeps of the
// closed-form polar updates, slack and multiplier updates, and the cached QP
// step, independently per sample (OpenMP across samples).
ProjectionResult project_batch(const std::vector<Trajectory>& samples,
                               const ProjectionWorkspace& ws,
                               const std::vector<Obstacle>& obstacles, const Limits& limits,
                               const BasisSet& basis);

// Convenience entry that assembles the constraint system and workspace.
ProjectionResult project_batch(const std::vector<Trajectory>& samples,
                               const std::vector<Obstacle>& obstacles, const Limits& limits,
                               const BasisSet& basis, const BoundaryConstraints& bc,
                               const ProjectionConfig& cfg);

// Plain dense serial implementation of the same iteration, kept as the
// reference the parallel kernels are tested against.
ProjectionResult project_batch_reference(const std::vector<Trajectory>& samples,
                                         const ProjectionWorkspace& ws,
                                         const std::vector<Obstacle>& obstacles,
                                         const Limits& limits, const BasisSet& basis);

}  // namespace priest
