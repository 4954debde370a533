#include "priest/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace priest {

namespace {

// Obstacle centers repacked column-per-obstacle for vectorized sweeps.
struct ObstacleGrid {
  Eigen::ArrayXXd cx, cy, cz;  // n_p x n_o
  Eigen::ArrayXd inv_a2, inv_b2, b;

  ObstacleGrid(const std::vector<Obstacle>& obstacles, int n_p) {
    const int n_o = static_cast<int>(obstacles.size());
    cx.resize(n_p, n_o);
    cy.resize(n_p, n_o);
    cz.resize(n_p, n_o);
    inv_a2.resize(n_o);
    inv_b2.resize(n_o);
    b.resize(n_o);
    for (int j = 0; j < n_o; ++j) {
      cx.col(j) = obstacles[j].cx;
      cy.col(j) = obstacles[j].cy;
      cz.col(j) = obstacles[j].cz;
      inv_a2[j] = 1.0 / (obstacles[j].a * obstacles[j].a);
      inv_b2[j] = 1.0 / (obstacles[j].b * obstacles[j].b);
      b[j] = obstacles[j].b;
    }
  }
};

// Per-sample scratch. Holds the flat residual/target chunks in the stacked
// row layout so F products reduce to a handful of small mat-vecs.
struct SampleKernel {
  const ProjectionWorkspace& ws;
  const ObstacleGrid& grid;
  const Limits& limits;
  int n_p, n_o, n_c, n_v;

  Eigen::VectorXd xi_bar, lambda, eta, sol;
  Eigen::MatrixXd pos, vel, acc;
  Eigen::ArrayXXd e_ox, e_oy, e_oz;  // n_p x n_o obstacle targets
  Eigen::ArrayXXd w_ox, w_oy, w_oz;
  Eigen::MatrixXd e_v, e_a;  // n_p x 3 velocity/acceleration targets
  Eigen::MatrixXd w_v, w_a;
  Eigen::MatrixXd w_glo, w_ghi;  // bound violations (= G xi - e rows)
  Eigen::MatrixXd e_glo, e_ghi;

  SampleKernel(const ProjectionWorkspace& ws_, const ObstacleGrid& grid_, const Limits& limits_)
      : ws(ws_), grid(grid_), limits(limits_), n_p(ws_.n_p), n_o(ws_.n_o), n_c(ws_.n_c),
        n_v(3 * ws_.n_c) {
    xi_bar.resize(n_v);
    lambda.setZero(n_v);
    eta.resize(n_v + ws.A.rows());
    pos.resize(n_p, 3);
    vel.resize(n_p, 3);
    acc.resize(n_p, 3);
    e_ox.resize(n_p, n_o);
    e_oy.resize(n_p, n_o);
    e_oz.resize(n_p, n_o);
    w_ox.resize(n_p, n_o);
    w_oy.resize(n_p, n_o);
    w_oz.resize(n_p, n_o);
    e_v.resize(n_p, 3);
    e_a.resize(n_p, 3);
    w_v.resize(n_p, 3);
    w_a.resize(n_p, 3);
    w_glo.resize(n_p, 3);
    w_ghi.resize(n_p, 3);
    e_glo.resize(n_p, 3);
    e_ghi.resize(n_p, 3);
  }

  void evaluate_current() {
    for (int ax = 0; ax < 3; ++ax) {
      const auto c = xi_bar.segment(ax * n_c, n_c);
      pos.col(ax).noalias() = ws.P * c;
      vel.col(ax).noalias() = ws.Pdot * c;
      acc.col(ax).noalias() = ws.Pddot * c;
    }
  }

  // Closed-form alternating sweep against the current iterate. At the polar
  // optimum the obstacle target collapses to center + max(1,h)/h * delta with
  // h the ellipsoidal norm of delta, and the velocity/acceleration targets to
  // radial clamps, so no trigonometry is needed here.
  void sweep_and_targets() {
    for (int j = 0; j < n_o; ++j) {
      for (int t = 0; t < n_p; ++t) {
        const double dx = pos(t, 0) - grid.cx(t, j);
        const double dy = pos(t, 1) - grid.cy(t, j);
        const double dz = pos(t, 2) - grid.cz(t, j);
        const double h2 = (dx * dx + dy * dy) * grid.inv_a2[j] + dz * dz * grid.inv_b2[j];
        if (h2 == 0.0) {
          e_ox(t, j) = grid.cx(t, j);
          e_oy(t, j) = grid.cy(t, j);
          e_oz(t, j) = grid.cz(t, j) + grid.b[j];
          continue;
        }
        const double h = std::sqrt(h2);
        const double k = h >= 1.0 ? 1.0 : 1.0 / h;
        e_ox(t, j) = grid.cx(t, j) + k * dx;
        e_oy(t, j) = grid.cy(t, j) + k * dy;
        e_oz(t, j) = grid.cz(t, j) + k * dz;
      }
    }
    for (int t = 0; t < n_p; ++t) {
      const double vn = vel.row(t).norm();
      const double kv = vn > limits.v_max ? limits.v_max / vn : 1.0;
      e_v.row(t) = kv * vel.row(t);
      const double an = acc.row(t).norm();
      const double ka = an > limits.a_max ? limits.a_max / an : 1.0;
      e_a.row(t) = ka * acc.row(t);
    }
    for (int ax = 0; ax < 3; ++ax) {
      e_glo.col(ax) =
          ((-limits.s_min[ax]) - (pos.col(ax).array() - limits.s_min[ax]).max(0.0)).matrix();
      e_ghi.col(ax) =
          (limits.s_max[ax] - (limits.s_max[ax] - pos.col(ax).array()).max(0.0)).matrix();
    }
  }

  // w = F xi_bar - e in the same chunked layout; the G rows reduce to the
  // positive bound violations. Returns the violation measure of the iterate.
  double residual_chunks() {
    for (int j = 0; j < n_o; ++j) {
      w_ox.col(j) = pos.col(0).array() - e_ox.col(j);
      w_oy.col(j) = pos.col(1).array() - e_oy.col(j);
      w_oz.col(j) = pos.col(2).array() - e_oz.col(j);
    }
    w_v = vel - e_v;
    w_a = acc - e_a;
    for (int ax = 0; ax < 3; ++ax) {
      w_glo.col(ax) = (limits.s_min[ax] - pos.col(ax).array()).max(0.0);
      w_ghi.col(ax) = (pos.col(ax).array() - limits.s_max[ax]).max(0.0);
    }
    const double tilde_sq = w_ox.matrix().squaredNorm() + w_oy.matrix().squaredNorm() +
                            w_oz.matrix().squaredNorm() + w_v.squaredNorm() + w_a.squaredNorm();
    const double bound_sq = w_glo.squaredNorm() + w_ghi.squaredNorm();
    return std::sqrt(tilde_sq) + std::sqrt(bound_sq);
  }

  // F' of the chunked vector (x -> obstacle columns, velocity, acceleration,
  // bound rows), matching apply_ft on the flattened layout.
  Eigen::VectorXd ft_product(const Eigen::ArrayXXd& ox, const Eigen::ArrayXXd& oy,
                             const Eigen::ArrayXXd& oz, const Eigen::MatrixXd& v,
                             const Eigen::MatrixXd& a, const Eigen::MatrixXd& glo,
                             const Eigen::MatrixXd& ghi) const {
    Eigen::VectorXd out(n_v);
    for (int ax = 0; ax < 3; ++ax) {
      const Eigen::ArrayXXd& o = ax == 0 ? ox : (ax == 1 ? oy : oz);
      Eigen::VectorXd psum = ghi.col(ax) - glo.col(ax);
      if (n_o > 0) psum += o.rowwise().sum().matrix();
      out.segment(ax * n_c, n_c).noalias() = ws.P.transpose() * psum;
      out.segment(ax * n_c, n_c).noalias() += ws.Pdot.transpose() * v.col(ax);
      out.segment(ax * n_c, n_c).noalias() += ws.Pddot.transpose() * a.col(ax);
    }
    return out;
  }

  // One multiplier + QP update against the original sample xi.
  void qp_update(const Eigen::VectorXd& xi) {
    lambda -= ws.cfg.rho * ft_product(w_ox, w_oy, w_oz, w_v, w_a, w_glo, w_ghi);
    Eigen::VectorXd fte = ft_product(e_ox, e_oy, e_oz, e_v, e_a, e_glo, e_ghi);
    eta.head(n_v) = xi + ws.cfg.rho * fte + lambda;
    eta.tail(ws.A.rows()) = ws.b_eq;
    sol.noalias() = ws.M * eta;
    xi_bar = sol.head(n_v);
  }
};

}  // namespace

ProjectionWorkspace precompute_workspace(const PolarConstraintSystem& system,
                                         const BoundaryConstraints& bc,
                                         const ProjectionConfig& cfg) {
  if (cfg.rho < 0.0 || cfg.max_iters < 1) {
    throw std::invalid_argument("projection config: need rho >= 0 and max_iters >= 1");
  }
  ProjectionWorkspace ws;
  ws.F = system.F;
  ws.A = bc.A;
  ws.tau = system.tau;
  ws.b_eq = bc.b_eq;
  ws.cfg = cfg;
  ws.n_o = system.n_o;
  ws.n_p = system.n_p;
  ws.n_c = static_cast<int>(system.F.cols()) / 3;

  const int n_v = static_cast<int>(system.F.cols());
  const int m = static_cast<int>(bc.A.rows());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n_v + m, n_v + m);
  kkt.topLeftCorner(n_v, n_v) = Eigen::MatrixXd::Identity(n_v, n_v);
  if (cfg.rho != 0.0) {
    kkt.topLeftCorner(n_v, n_v) += cfg.rho * (system.F.transpose() * system.F);
  }
  kkt.topRightCorner(n_v, m) = bc.A.transpose();
  kkt.bottomLeftCorner(m, n_v) = bc.A;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) {
    throw std::runtime_error("singular KKT matrix: rank " + std::to_string(lu.rank()) + " of " +
                             std::to_string(n_v + m) +
                             " (boundary system rank-deficient or malformed F)");
  }
  ws.M = lu.inverse();

  // Lift the per-axis basis blocks back out of the stacked system for
  // structured products. With no obstacles F_tilde has no position rows, but
  // the workspace-bound rows of G always carry +P.
  if (ws.n_o > 0) {
    ws.P = system.F_tilde.block(0, 0, ws.n_p, ws.n_c);
  } else {
    ws.P = system.G.block(ws.n_p, 0, ws.n_p, ws.n_c);
  }
  ws.Pdot = system.F_tilde.block(ws.n_o * ws.n_p, 0, ws.n_p, ws.n_c);
  ws.Pddot = system.F_tilde.block((ws.n_o + 1) * ws.n_p, 0, ws.n_p, ws.n_c);
  return ws;
}

Eigen::VectorXd apply_ft(const ProjectionWorkspace& ws, const Eigen::VectorXd& v) {
  const int n_p = ws.n_p, n_o = ws.n_o, n_c = ws.n_c;
  const int axis_rows = (n_o + 2) * n_p;
  const int g0 = 3 * axis_rows;
  if (v.size() != g0 + 6 * n_p) throw std::invalid_argument("apply_ft: size mismatch");
  Eigen::VectorXd out(3 * n_c);
  for (int ax = 0; ax < 3; ++ax) {
    Eigen::VectorXd psum = Eigen::VectorXd::Zero(n_p);
    for (int j = 0; j < n_o; ++j) psum += v.segment(ax * axis_rows + j * n_p, n_p);
    psum += v.segment(g0 + ax * 2 * n_p + n_p, n_p);  // +P rows
    psum -= v.segment(g0 + ax * 2 * n_p, n_p);        // -P rows
    out.segment(ax * n_c, n_c).noalias() = ws.P.transpose() * psum;
    out.segment(ax * n_c, n_c).noalias() +=
        ws.Pdot.transpose() * v.segment(ax * axis_rows + n_o * n_p, n_p);
    out.segment(ax * n_c, n_c).noalias() +=
        ws.Pddot.transpose() * v.segment(ax * axis_rows + (n_o + 1) * n_p, n_p);
  }
  return out;
}

QpResult qp_step(const ProjectionWorkspace& ws, const Eigen::VectorXd& xi,
                 const Eigen::VectorXd& e, const Eigen::VectorXd& lambda) {
  const int n_v = 3 * ws.n_c;
  const int m = static_cast<int>(ws.A.rows());
  if (xi.size() != n_v || lambda.size() != n_v) {
    throw std::invalid_argument("qp_step: coefficient size mismatch");
  }
  Eigen::VectorXd eta(n_v + m);
  eta.head(n_v) = xi + ws.cfg.rho * apply_ft(ws, e) + lambda;
  eta.tail(m) = ws.b_eq;
  Eigen::VectorXd sol = ws.M * eta;
  QpResult out;
  out.xi_bar = sol.head(n_v);
  out.nu = sol.tail(m);
  return out;
}

ProjectionResult project_batch(const std::vector<Trajectory>& samples,
                               const ProjectionWorkspace& ws,
                               const std::vector<Obstacle>& obstacles, const Limits& limits,
                               const BasisSet& basis) {
  if (static_cast<int>(obstacles.size()) != ws.n_o) {
    throw std::invalid_argument("project_batch: obstacle count does not match workspace");
  }
  for (const Obstacle& ob : obstacles) {
    if (ob.cx.size() != ws.n_p || ob.cy.size() != ws.n_p || ob.cz.size() != ws.n_p) {
      throw std::invalid_argument("project_batch: obstacle grid length does not match workspace");
    }
  }
  for (const Trajectory& s : samples) {
    if (s.coeffs.size() != 3 * ws.n_c) {
      throw std::invalid_argument("project_batch: sample coefficient size mismatch");
    }
  }

  const int n_b = static_cast<int>(samples.size());
  const int iters = ws.cfg.max_iters;
  ProjectionResult result;
  result.trajectories.resize(n_b);
  result.residuals.setZero(n_b);
  result.residual_trace.setZero(iters, n_b);
  result.aborted.assign(n_b, 0);
  if (n_b == 0) return result;

  const ObstacleGrid grid(obstacles, ws.n_p);
  Eigen::VectorXd bviol = Eigen::VectorXd::Zero(n_b);
  std::vector<std::int64_t> audits(n_b, 0);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_b; ++i) {
    SampleKernel kernel(ws, grid, limits);
    kernel.xi_bar = samples[i].coeffs;
    bool ok = kernel.xi_bar.allFinite();
    if (ok) {
      kernel.evaluate_current();
      for (int k = 0; k < iters; ++k) {
        kernel.sweep_and_targets();
        result.residual_trace(k, i) = kernel.residual_chunks();
        kernel.qp_update(samples[i].coeffs);
        if (!kernel.xi_bar.allFinite()) {
          ok = false;
          break;
        }
        kernel.evaluate_current();
        bviol[i] = std::max(bviol[i], (ws.A * kernel.xi_bar - ws.b_eq).cwiseAbs().maxCoeff());
        ++audits[i];
      }
    }
    if (!ok) {
      result.aborted[i] = 1;
      result.trajectories[i].coeffs = samples[i].coeffs;
      result.residuals[i] = std::numeric_limits<double>::infinity();
    } else {
      result.trajectories[i].coeffs = kernel.xi_bar;
      kernel.sweep_and_targets();
      result.residuals[i] = kernel.residual_chunks();
    }
  }

  result.boundary_violation_max = bviol.maxCoeff();
  for (std::int64_t c : audits) result.boundary_audit_count += c;
  (void)basis;
  return result;
}

ProjectionResult project_batch(const std::vector<Trajectory>& samples,
                               const std::vector<Obstacle>& obstacles, const Limits& limits,
                               const BasisSet& basis, const BoundaryConstraints& bc,
                               const ProjectionConfig& cfg) {
  const PolarConstraintSystem system = build_constraint_system(basis, obstacles, limits);
  const ProjectionWorkspace ws = precompute_workspace(system, bc, cfg);
  return project_batch(samples, ws, obstacles, limits, basis);
}

}  // namespace priest
