#pragma once

#include <Eigen/Dense>

#include "priest/basis.hpp"

namespace priest {

// Weights of the primary cost components plus the appended residual term.
struct CostWeights {
  double w_smooth = 1.0;
  double w_curv = 0.0;
  double w_path = 0.0;
  double w_resid = 10.0;

  static CostWeights point_to_point() { return {1.0, 0.0, 0.0, 10.0}; }
  static CostWeights mpc() { return {1.0, 0.1, 1.0, 10.0}; }
};

// Piece of problem state the primary cost needs beyond the trajectory itself.
struct CostContext {
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();
};

// Sum of squared acceleration magnitudes scaled by the grid step.
double smoothness_cost(const TrajectorySamples& samples, double dt);
double smoothness_cost(const Trajectory& traj, const BasisSet& basis);

// kappa(t) = |v x a| / max(|v|^3, eps^3) with eps = 1e-3 m/s.
Eigen::VectorXd curvature_profile(const TrajectorySamples& samples);
double curvature_cost(const TrajectorySamples& samples, double dt);
double curvature_cost(const Trajectory& traj, const BasisSet& basis);

// Mean distance of the waypoints to the start->goal segment (projection
// parameter clamped to [0, 1]). Throws if start == goal.
double path_error_cost(const Eigen::MatrixXd& waypoints, const Eigen::Vector3d& start,
                       const Eigen::Vector3d& goal);
double path_error_cost(const Trajectory& traj, const Eigen::Vector3d& start,
                       const Eigen::Vector3d& goal, const BasisSet& basis);

// c_aug = w_smooth*smoothness + w_curv*curvature + w_path*path_error +
// w_resid*r. Consumes only scalar values of the components; none of them is
// required to be smooth in the trajectory.
double augmented_cost(const TrajectorySamples& samples, double dt, double r,
                      const CostWeights& weights, const CostContext& ctx);
double augmented_cost(const Trajectory& traj, double r, const CostWeights& weights,
                      const CostContext& ctx, const BasisSet& basis);

}  // namespace priest
