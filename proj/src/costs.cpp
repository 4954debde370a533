#include "priest/costs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace priest {

namespace {
constexpr double kSpeedFloor = 1e-3;  // m/s, bounds curvature near rest

void check_weights(const CostWeights& w) {
  if (w.w_smooth < 0 || w.w_curv < 0 || w.w_path < 0 || w.w_resid < 0) {
    throw std::invalid_argument("cost weights must be nonnegative");
  }
}
}  // namespace

double smoothness_cost(const TrajectorySamples& samples, double dt) {
  return samples.acc.squaredNorm() * dt;
}

double smoothness_cost(const Trajectory& traj, const BasisSet& basis) {
  return smoothness_cost(evaluate(traj, basis), basis.dt());
}

Eigen::VectorXd curvature_profile(const TrajectorySamples& samples) {
  const int n = static_cast<int>(samples.vel.rows());
  Eigen::VectorXd kappa(n);
  const double floor3 = kSpeedFloor * kSpeedFloor * kSpeedFloor;
  for (int t = 0; t < n; ++t) {
    const Eigen::Vector3d v = samples.vel.row(t);
    const Eigen::Vector3d a = samples.acc.row(t);
    const double speed = v.norm();
    kappa[t] = v.cross(a).norm() / std::max(speed * speed * speed, floor3);
  }
  return kappa;
}

double curvature_cost(const TrajectorySamples& samples, double dt) {
  return curvature_profile(samples).squaredNorm() * dt;
}

double curvature_cost(const Trajectory& traj, const BasisSet& basis) {
  return curvature_cost(evaluate(traj, basis), basis.dt());
}

double path_error_cost(const Eigen::MatrixXd& waypoints, const Eigen::Vector3d& start,
                       const Eigen::Vector3d& goal) {
  const Eigen::Vector3d seg = goal - start;
  const double len2 = seg.squaredNorm();
  if (len2 <= 0.0) throw std::invalid_argument("path error: start equals goal");
  if (waypoints.rows() == 0) throw std::invalid_argument("path error: no waypoints");
  double sum = 0.0;
  for (int t = 0; t < waypoints.rows(); ++t) {
    const Eigen::Vector3d p = waypoints.row(t);
    const double u = std::clamp(seg.dot(p - start) / len2, 0.0, 1.0);
    sum += (p - (start + u * seg)).norm();
  }
  return sum / static_cast<double>(waypoints.rows());
}

double path_error_cost(const Trajectory& traj, const Eigen::Vector3d& start,
                       const Eigen::Vector3d& goal, const BasisSet& basis) {
  return path_error_cost(evaluate(traj, basis).pos, start, goal);
}

double augmented_cost(const TrajectorySamples& samples, double dt, double r,
                      const CostWeights& weights, const CostContext& ctx) {
  check_weights(weights);
  if (r < 0.0) throw std::invalid_argument("augmented cost: residual must be nonnegative");
  double c = weights.w_resid * r;
  if (weights.w_smooth > 0.0) c += weights.w_smooth * smoothness_cost(samples, dt);
  if (weights.w_curv > 0.0) c += weights.w_curv * curvature_cost(samples, dt);
  if (weights.w_path > 0.0) c += weights.w_path * path_error_cost(samples.pos, ctx.start, ctx.goal);
  return c;
}

double augmented_cost(const Trajectory& traj, double r, const CostWeights& weights,
                      const CostContext& ctx, const BasisSet& basis) {
  return augmented_cost(evaluate(traj, basis), basis.dt(), r, weights, ctx);
}

}  // namespace priest
