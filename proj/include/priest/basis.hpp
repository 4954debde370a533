#pragma once

#include <Eigen/Dense>

namespace priest {

// Polynomial basis sampled on a uniform time grid. Columns are monomials in
// normalized time s = (t - t0) / (tf - t0) to keep conditioning sane at
// degree ~10; Pdot/Pddot carry the chain-rule factors so they are true time
// derivatives.
struct BasisSet {
  int n_p = 0;
  int degree = 0;
  double t0 = 0.0;
  double tf = 0.0;
  Eigen::VectorXd t_grid;
  Eigen::MatrixXd P;
  Eigen::MatrixXd Pdot;
  Eigen::MatrixXd Pddot;

  int coeffs_per_axis() const { return degree + 1; }
  int n_vars() const { return 3 * (degree + 1); }
  double dt() const { return n_p > 1 ? (tf - t0) / (n_p - 1) : 0.0; }
};

BasisSet build_basis(int n_p, int degree, double t0, double tf);

// Stacked per-axis coefficients xi = [c_x; c_y; c_z].
struct Trajectory {
  Eigen::VectorXd coeffs;
};

struct TrajectorySamples {
  Eigen::MatrixXd pos;  // n_p x 3
  Eigen::MatrixXd vel;
  Eigen::MatrixXd acc;
};

TrajectorySamples evaluate(const Trajectory& traj, const BasisSet& basis);

struct BoundaryState {
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
  Eigen::Vector3d vel = Eigen::Vector3d::Zero();
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
};

// Equality system A xi = b_eq pinning position/velocity/acceleration at t0
// and position at tf, four rows per axis in that order.
struct BoundaryConstraints {
  Eigen::MatrixXd A;
  Eigen::VectorXd b_eq;
};

BoundaryConstraints build_boundary_system(const BasisSet& basis,
                                          const BoundaryState& start,
                                          const Eigen::Vector3d& goal);

// Minimum-norm solution of A xi = b_eq.
Eigen::VectorXd fit_min_norm(const BoundaryConstraints& bc);

// argmin ||stack(P) xi - waypoints||^2 subject to A xi = b_eq. Waypoints are
// n_p x 3 positions; used for straight-line initialization and warm starts.
Trajectory fit_to_waypoints(const BasisSet& basis, const BoundaryConstraints& bc,
                            const Eigen::MatrixXd& waypoints);

}  // namespace priest
