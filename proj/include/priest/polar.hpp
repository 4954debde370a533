#pragma once

#include <Eigen/Dense>
#include <vector>

#include "priest/basis.hpp"

namespace priest {

// Axis-aligned ellipsoid with semi-axes (a, a, b), center sampled over the
// planning grid so dynamic obstacles are just precomputed center paths.
struct Obstacle {
  Eigen::VectorXd cx, cy, cz;  // n_p center samples
  double a = 0.0;
  double b = 0.0;
  Eigen::Vector3d vel = Eigen::Vector3d::Zero();
};

// Propagate a world obstacle (center at t0 plus constant velocity) over the
// basis time grid.
Obstacle make_obstacle(const Eigen::Vector3d& center, double a, double b,
                       const Eigen::Vector3d& vel, const BasisSet& basis);

struct Limits {
  double v_max = 1.0;
  double a_max = 1.0;
  Eigen::Vector3d s_min = Eigen::Vector3d::Constant(-1e3);
  Eigen::Vector3d s_max = Eigen::Vector3d::Constant(1e3);
};

// Auxiliary variables of the reformulated constraints. Obstacle blocks are
// n_p x n_o (one column per obstacle); velocity/acceleration blocks n_p.
struct PolarVariables {
  Eigen::ArrayXXd alpha_o, beta_o, d_o;
  Eigen::ArrayXd alpha_v, beta_v, d_v;
  Eigen::ArrayXd alpha_a, beta_a, d_a;

  static PolarVariables zero(int n_p, int n_o);
};

// Stacked linear maps of the constraint set. Row layout, axis-major:
//   F_tilde: per axis [P stacked once per obstacle; Pdot; Pddot]
//   G:       per axis [-P; P], tau the matching [-s_min; s_max] bounds
struct PolarConstraintSystem {
  Eigen::MatrixXd F_tilde;  // 3*(n_o+2)*n_p x n_v
  Eigen::MatrixXd G;        // 6*n_p x n_v
  Eigen::VectorXd tau;      // 6*n_p
  Eigen::MatrixXd F;        // [F_tilde; G]
  int n_o = 0;
  int n_p = 0;
};

PolarConstraintSystem build_constraint_system(const BasisSet& basis,
                                              const std::vector<Obstacle>& obstacles,
                                              const Limits& limits);

// Gauss-Seidel closed-form updates: alpha first, then beta (uses fresh
// alpha), then d (uses fresh alpha and beta). atan2(0, 0) maps to 0.
void update_alpha(PolarVariables& polar, const TrajectorySamples& samples,
                  const std::vector<Obstacle>& obstacles);
void update_beta(PolarVariables& polar, const TrajectorySamples& samples,
                 const std::vector<Obstacle>& obstacles);
void update_d(PolarVariables& polar, const TrajectorySamples& samples,
              const std::vector<Obstacle>& obstacles, const Limits& limits);

// One full sweep of the three updates against the given samples.
PolarVariables best_fit_polar(const TrajectorySamples& samples,
                              const std::vector<Obstacle>& obstacles,
                              const Limits& limits);

// e_tilde in the F_tilde row layout: obstacle-surface targets, then velocity
// and acceleration targets, per axis.
Eigen::VectorXd compute_e_tilde(const PolarVariables& polar,
                                const std::vector<Obstacle>& obstacles,
                                const Limits& limits);

// Full right-hand side e = [e_tilde; tau - slack].
Eigen::VectorXd compute_e(const PolarVariables& polar, const std::vector<Obstacle>& obstacles,
                          const Limits& limits, const Eigen::VectorXd& slack,
                          const Eigen::VectorXd& tau);

// r = ||F_tilde xi - e_tilde*||_2 + ||max(0, G xi - tau)||_2 with the polar
// variables re-fit to xi by one AM sweep. Zero iff the trajectory satisfies
// collision, velocity, acceleration and workspace constraints at every grid
// point.
double residual(const Trajectory& traj, const std::vector<Obstacle>& obstacles,
                const Limits& limits, const BasisSet& basis);

}  // namespace priest
