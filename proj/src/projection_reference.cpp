#include <algorithm>
#include <limits>
#include <stdexcept>

#include "priest/projection.hpp"

namespace priest {

// Serial reference projection. Follows the same iteration as project_batch
// but goes through the angle-based polar interface and dense F products, one
// sample at a time. Kept as the behavioral baseline for the optimized
// OpenMP kernels, both in tests and in the projection benchmark.
ProjectionResult project_batch_reference(const std::vector<Trajectory>& samples,
                                         const ProjectionWorkspace& ws,
                                         const std::vector<Obstacle>& obstacles,
                                         const Limits& limits, const BasisSet& basis) {
  if (static_cast<int>(obstacles.size()) != ws.n_o) {
    throw std::invalid_argument("project_batch_reference: obstacle count mismatch");
  }
  const int n_b = static_cast<int>(samples.size());
  const int iters = ws.cfg.max_iters;
  const int tilde_rows = 3 * (ws.n_o + 2) * ws.n_p;

  ProjectionResult result;
  result.trajectories.resize(n_b);
  result.residuals.setZero(n_b);
  result.residual_trace.setZero(iters, n_b);
  result.aborted.assign(n_b, 0);
  if (n_b == 0) return result;

  for (int i = 0; i < n_b; ++i) {
    Trajectory current;
    current.coeffs = samples[i].coeffs;
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(current.coeffs.size());
    bool ok = current.coeffs.allFinite();

    if (ok) {
      for (int k = 0; k < iters; ++k) {
        const TrajectorySamples ts = evaluate(current, basis);
        const PolarVariables polar = best_fit_polar(ts, obstacles, limits);
        const Eigen::VectorXd g_xi = ws.F.bottomRows(6 * ws.n_p) * current.coeffs;
        const Eigen::VectorXd slack = (ws.tau - g_xi).cwiseMax(0.0);
        const Eigen::VectorXd e = compute_e(polar, obstacles, limits, slack, ws.tau);

        const Eigen::VectorXd w = ws.F * current.coeffs - e;
        result.residual_trace(k, i) =
            w.head(tilde_rows).norm() + w.tail(6 * ws.n_p).norm();

        lambda -= ws.cfg.rho * (ws.F.transpose() * w);
        const QpResult qp = qp_step(ws, samples[i].coeffs, e, lambda);
        if (!qp.xi_bar.allFinite()) {
          ok = false;
          break;
        }
        current.coeffs = qp.xi_bar;
        result.boundary_violation_max =
            std::max(result.boundary_violation_max,
                     (ws.A * current.coeffs - ws.b_eq).cwiseAbs().maxCoeff());
        ++result.boundary_audit_count;
      }
    }

    if (!ok) {
      result.aborted[i] = 1;
      result.trajectories[i].coeffs = samples[i].coeffs;
      result.residuals[i] = std::numeric_limits<double>::infinity();
    } else {
      result.trajectories[i] = current;
      result.residuals[i] = residual(current, obstacles, limits, basis);
    }
  }
  return result;
}

}  // namespace priest
