#include "priest/polar.hpp"

#include <cmath>
#include <stdexcept>

namespace priest {

namespace {

double atan2_or_zero(double y, double x) {
  if (y == 0.0 && x == 0.0) return 0.0;
  return std::atan2(y, x);
}

void check_inputs(const std::vector<Obstacle>& obstacles, const Limits& limits, int n_p) {
  for (const Obstacle& o : obstacles) {
    if (o.a <= 0.0 || o.b <= 0.0) throw std::invalid_argument("obstacle semi-axes must be > 0");
    if (o.cx.size() != n_p || o.cy.size() != n_p || o.cz.size() != n_p) {
      throw std::invalid_argument("obstacle center grid length mismatch");
    }
  }
  if (limits.v_max <= 0.0 || limits.a_max <= 0.0) {
    throw std::invalid_argument("limits must be positive");
  }
  if ((limits.s_min.array() >= limits.s_max.array()).any()) {
    throw std::invalid_argument("s_min must be below s_max");
  }
}

}  // namespace

Obstacle make_obstacle(const Eigen::Vector3d& center, double a, double b,
                       const Eigen::Vector3d& vel, const BasisSet& basis) {
  Obstacle o;
  o.a = a;
  o.b = b;
  o.vel = vel;
  Eigen::ArrayXd dt = basis.t_grid.array() - basis.t0;
  o.cx = center.x() + vel.x() * dt;
  o.cy = center.y() + vel.y() * dt;
  o.cz = center.z() + vel.z() * dt;
  return o;
}

PolarVariables PolarVariables::zero(int n_p, int n_o) {
  PolarVariables polar;
  polar.alpha_o.setZero(n_p, n_o);
  polar.beta_o.setZero(n_p, n_o);
  polar.d_o.setOnes(n_p, n_o);
  polar.alpha_v.setZero(n_p);
  polar.beta_v.setZero(n_p);
  polar.d_v.setZero(n_p);
  polar.alpha_a.setZero(n_p);
  polar.beta_a.setZero(n_p);
  polar.d_a.setZero(n_p);
  return polar;
}

PolarConstraintSystem build_constraint_system(const BasisSet& basis,
                                              const std::vector<Obstacle>& obstacles,
                                              const Limits& limits) {
  if (basis.n_p <= 0) throw std::invalid_argument("empty basis");
  check_inputs(obstacles, limits, basis.n_p);

  const int n_p = basis.n_p;
  const int n_o = static_cast<int>(obstacles.size());
  const int n_c = basis.coeffs_per_axis();
  const int n_v = 3 * n_c;
  const int axis_rows = (n_o + 2) * n_p;

  PolarConstraintSystem sys;
  sys.n_o = n_o;
  sys.n_p = n_p;
  sys.F_tilde.setZero(3 * axis_rows, n_v);
  for (int ax = 0; ax < 3; ++ax) {
    const int r0 = ax * axis_rows;
    const int c0 = ax * n_c;
    for (int j = 0; j < n_o; ++j) {
      sys.F_tilde.block(r0 + j * n_p, c0, n_p, n_c) = basis.P;
    }
    sys.F_tilde.block(r0 + n_o * n_p, c0, n_p, n_c) = basis.Pdot;
    sys.F_tilde.block(r0 + (n_o + 1) * n_p, c0, n_p, n_c) = basis.Pddot;
  }

  sys.G.setZero(6 * n_p, n_v);
  sys.tau.resize(6 * n_p);
  for (int ax = 0; ax < 3; ++ax) {
    const int r0 = ax * 2 * n_p;
    const int c0 = ax * n_c;
    sys.G.block(r0, c0, n_p, n_c) = -basis.P;
    sys.G.block(r0 + n_p, c0, n_p, n_c) = basis.P;
    sys.tau.segment(r0, n_p).setConstant(-limits.s_min[ax]);
    sys.tau.segment(r0 + n_p, n_p).setConstant(limits.s_max[ax]);
  }

  sys.F.resize(sys.F_tilde.rows() + sys.G.rows(), n_v);
  sys.F << sys.F_tilde, sys.G;
  return sys;
}

void update_alpha(PolarVariables& polar, const TrajectorySamples& samples,
                  const std::vector<Obstacle>& obstacles) {
  const int n_p = static_cast<int>(samples.pos.rows());
  const int n_o = static_cast<int>(obstacles.size());
  if (polar.alpha_o.rows() != n_p || polar.alpha_o.cols() != n_o) {
    polar = PolarVariables::zero(n_p, n_o);
  }
  for (int j = 0; j < n_o; ++j) {
    const Obstacle& o = obstacles[j];
    for (int t = 0; t < n_p; ++t) {
      polar.alpha_o(t, j) =
          atan2_or_zero(samples.pos(t, 1) - o.cy[t], samples.pos(t, 0) - o.cx[t]);
    }
  }
  for (int t = 0; t < n_p; ++t) {
    polar.alpha_v[t] = atan2_or_zero(samples.vel(t, 1), samples.vel(t, 0));
    polar.alpha_a[t] = atan2_or_zero(samples.acc(t, 1), samples.acc(t, 0));
  }
}

void update_beta(PolarVariables& polar, const TrajectorySamples& samples,
                 const std::vector<Obstacle>& obstacles) {
  const int n_p = static_cast<int>(samples.pos.rows());
  const int n_o = static_cast<int>(obstacles.size());
  for (int j = 0; j < n_o; ++j) {
    const Obstacle& o = obstacles[j];
    for (int t = 0; t < n_p; ++t) {
      const double dx = samples.pos(t, 0) - o.cx[t];
      const double dy = samples.pos(t, 1) - o.cy[t];
      const double dz = samples.pos(t, 2) - o.cz[t];
      const double u = dx * std::cos(polar.alpha_o(t, j)) + dy * std::sin(polar.alpha_o(t, j));
      polar.beta_o(t, j) = atan2_or_zero(u / o.a, dz / o.b);
    }
  }
  for (int t = 0; t < n_p; ++t) {
    const double uv = samples.vel(t, 0) * std::cos(polar.alpha_v[t]) +
                      samples.vel(t, 1) * std::sin(polar.alpha_v[t]);
    polar.beta_v[t] = atan2_or_zero(uv, samples.vel(t, 2));
    const double ua = samples.acc(t, 0) * std::cos(polar.alpha_a[t]) +
                      samples.acc(t, 1) * std::sin(polar.alpha_a[t]);
    polar.beta_a[t] = atan2_or_zero(ua, samples.acc(t, 2));
  }
}

void update_d(PolarVariables& polar, const TrajectorySamples& samples,
              const std::vector<Obstacle>& obstacles, const Limits& limits) {
  const int n_p = static_cast<int>(samples.pos.rows());
  const int n_o = static_cast<int>(obstacles.size());
  for (int j = 0; j < n_o; ++j) {
    const Obstacle& o = obstacles[j];
    for (int t = 0; t < n_p; ++t) {
      const double dx = samples.pos(t, 0) - o.cx[t];
      const double dy = samples.pos(t, 1) - o.cy[t];
      const double dz = samples.pos(t, 2) - o.cz[t];
      const double sa = std::sin(polar.alpha_o(t, j)), ca = std::cos(polar.alpha_o(t, j));
      const double sb = std::sin(polar.beta_o(t, j)), cb = std::cos(polar.beta_o(t, j));
      const double num = dx * o.a * ca * sb + dy * o.a * sa * sb + dz * o.b * cb;
      const double den = o.a * o.a * sb * sb + o.b * o.b * cb * cb;
      // den > 0 whenever a, b > 0; the guard snaps to the lower bound.
      polar.d_o(t, j) = den > 0.0 ? std::max(1.0, num / den) : 1.0;
    }
  }
  for (int t = 0; t < n_p; ++t) {
    const double sbv = std::sin(polar.beta_v[t]), cbv = std::cos(polar.beta_v[t]);
    const double numv = samples.vel(t, 0) * std::cos(polar.alpha_v[t]) * sbv +
                        samples.vel(t, 1) * std::sin(polar.alpha_v[t]) * sbv +
                        samples.vel(t, 2) * cbv;
    polar.d_v[t] = std::clamp(numv / limits.v_max, 0.0, 1.0);
    const double sba = std::sin(polar.beta_a[t]), cba = std::cos(polar.beta_a[t]);
    const double numa = samples.acc(t, 0) * std::cos(polar.alpha_a[t]) * sba +
                        samples.acc(t, 1) * std::sin(polar.alpha_a[t]) * sba +
                        samples.acc(t, 2) * cba;
    polar.d_a[t] = std::clamp(numa / limits.a_max, 0.0, 1.0);
  }
}

PolarVariables best_fit_polar(const TrajectorySamples& samples,
                              const std::vector<Obstacle>& obstacles, const Limits& limits) {
  PolarVariables polar =
      PolarVariables::zero(static_cast<int>(samples.pos.rows()), static_cast<int>(obstacles.size()));
  update_alpha(polar, samples, obstacles);
  update_beta(polar, samples, obstacles);
  update_d(polar, samples, obstacles, limits);
  return polar;
}

Eigen::VectorXd compute_e_tilde(const PolarVariables& polar,
                                const std::vector<Obstacle>& obstacles, const Limits& limits) {
  const int n_p = static_cast<int>(polar.alpha_v.size());
  const int n_o = static_cast<int>(obstacles.size());
  const int axis_rows = (n_o + 2) * n_p;
  Eigen::VectorXd e(3 * axis_rows);

  const Eigen::ArrayXXd sin_bo = polar.beta_o.sin();
  const Eigen::ArrayXXd cos_bo = polar.beta_o.cos();
  const Eigen::ArrayXd sin_bv = polar.beta_v.sin();
  const Eigen::ArrayXd cos_bv = polar.beta_v.cos();
  const Eigen::ArrayXd sin_ba = polar.beta_a.sin();
  const Eigen::ArrayXd cos_ba = polar.beta_a.cos();

  for (int j = 0; j < n_o; ++j) {
    const Obstacle& o = obstacles[j];
    const Eigen::ArrayXd radial = o.a * polar.d_o.col(j) * sin_bo.col(j);
    e.segment(0 * axis_rows + j * n_p, n_p) =
        o.cx.array() + radial * polar.alpha_o.col(j).cos();
    e.segment(1 * axis_rows + j * n_p, n_p) =
        o.cy.array() + radial * polar.alpha_o.col(j).sin();
    e.segment(2 * axis_rows + j * n_p, n_p) =
        o.cz.array() + o.b * polar.d_o.col(j) * cos_bo.col(j);
  }
  const Eigen::ArrayXd vmag = limits.v_max * polar.d_v;
  const Eigen::ArrayXd amag = limits.a_max * polar.d_a;
  e.segment(0 * axis_rows + n_o * n_p, n_p) = vmag * polar.alpha_v.cos() * sin_bv;
  e.segment(1 * axis_rows + n_o * n_p, n_p) = vmag * polar.alpha_v.sin() * sin_bv;
  e.segment(2 * axis_rows + n_o * n_p, n_p) = vmag * cos_bv;
  e.segment(0 * axis_rows + (n_o + 1) * n_p, n_p) = amag * polar.alpha_a.cos() * sin_ba;
  e.segment(1 * axis_rows + (n_o + 1) * n_p, n_p) = amag * polar.alpha_a.sin() * sin_ba;
  e.segment(2 * axis_rows + (n_o + 1) * n_p, n_p) = amag * cos_ba;
  return e;
}

Eigen::VectorXd compute_e(const PolarVariables& polar, const std::vector<Obstacle>& obstacles,
                          const Limits& limits, const Eigen::VectorXd& slack,
                          const Eigen::VectorXd& tau) {
  if (slack.size() != tau.size()) throw std::invalid_argument("slack/tau size mismatch");
  Eigen::VectorXd e_tilde = compute_e_tilde(polar, obstacles, limits);
  Eigen::VectorXd e(e_tilde.size() + tau.size());
  e << e_tilde, tau - slack;
  return e;
}

double residual(const Trajectory& traj, const std::vector<Obstacle>& obstacles,
                const Limits& limits, const BasisSet& basis) {
  check_inputs(obstacles, limits, basis.n_p);
  const TrajectorySamples samples = evaluate(traj, basis);
  const PolarVariables polar = best_fit_polar(samples, obstacles, limits);

  double sq = 0.0;
  const int n_p = basis.n_p;
  for (int j = 0; j < static_cast<int>(obstacles.size()); ++j) {
    const Obstacle& o = obstacles[j];
    for (int t = 0; t < n_p; ++t) {
      const double sa = std::sin(polar.alpha_o(t, j)), ca = std::cos(polar.alpha_o(t, j));
      const double sb = std::sin(polar.beta_o(t, j)), cb = std::cos(polar.beta_o(t, j));
      const double rad = o.a * polar.d_o(t, j) * sb;
      const double ex = o.cx[t] + rad * ca;
      const double ey = o.cy[t] + rad * sa;
      const double ez = o.cz[t] + o.b * polar.d_o(t, j) * cb;
      sq += std::pow(samples.pos(t, 0) - ex, 2) + std::pow(samples.pos(t, 1) - ey, 2) +
            std::pow(samples.pos(t, 2) - ez, 2);
    }
  }
  for (int t = 0; t < n_p; ++t) {
    const double sbv = std::sin(polar.beta_v[t]), cbv = std::cos(polar.beta_v[t]);
    const double vm = limits.v_max * polar.d_v[t];
    sq += std::pow(samples.vel(t, 0) - vm * std::cos(polar.alpha_v[t]) * sbv, 2) +
          std::pow(samples.vel(t, 1) - vm * std::sin(polar.alpha_v[t]) * sbv, 2) +
          std::pow(samples.vel(t, 2) - vm * cbv, 2);
    const double sba = std::sin(polar.beta_a[t]), cba = std::cos(polar.beta_a[t]);
    const double am = limits.a_max * polar.d_a[t];
    sq += std::pow(samples.acc(t, 0) - am * std::cos(polar.alpha_a[t]) * sba, 2) +
          std::pow(samples.acc(t, 1) - am * std::sin(polar.alpha_a[t]) * sba, 2) +
          std::pow(samples.acc(t, 2) - am * cba, 2);
  }

  double bound_sq = 0.0;
  for (int ax = 0; ax < 3; ++ax) {
    for (int t = 0; t < n_p; ++t) {
      bound_sq += std::pow(std::max(0.0, limits.s_min[ax] - samples.pos(t, ax)), 2) +
                  std::pow(std::max(0.0, samples.pos(t, ax) - limits.s_max[ax]), 2);
    }
  }
  return std::sqrt(sq) + std::sqrt(bound_sq);
}

}  // namespace priest
