#include "priest/sampler.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace priest {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Independent generator for distribution j, a fixed function of the master
// seed and j alone so adding distributions never perturbs existing streams.
std::mt19937_64 stream_for(std::uint64_t seed, int j) {
  return std::mt19937_64(splitmix64(seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(j + 1)));
}

void validate_config(const SamplerConfig& cfg) {
  if (cfg.n_iters < 1) throw std::invalid_argument("sampler: n_iters must be >= 1");
  if (cfg.n_elite < 1 || cfg.n_elite > cfg.n_proj || cfg.n_proj > cfg.n_batch) {
    throw std::invalid_argument("sampler: need 1 <= n_elite <= n_proj <= n_batch");
  }
  if (!(cfg.sigma > 0.0 && cfg.sigma <= 1.0)) {
    throw std::invalid_argument("sampler: sigma must be in (0, 1]");
  }
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("sampler: gamma must be positive");
  if (cfg.m_dists < 1 || cfg.n_batch % cfg.m_dists != 0) {
    throw std::invalid_argument("sampler: m_dists must be >= 1 and divide n_batch");
  }
  if (!(cfg.init_std_frac >= 0.0)) {
    throw std::invalid_argument("sampler: init_std_frac must be nonnegative");
  }
}

double since_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

Eigen::MatrixXd straight_line_waypoints(const BasisSet& basis, const Eigen::Vector3d& from,
                                        const Eigen::Vector3d& to) {
  Eigen::MatrixXd wps(basis.n_p, 3);
  for (int t = 0; t < basis.n_p; ++t) {
    const double s = basis.n_p > 1 ? static_cast<double>(t) / (basis.n_p - 1) : 0.0;
    wps.row(t) = ((1.0 - s) * from + s * to).transpose();
  }
  return wps;
}

// Per-axis sampling std: a fraction of the workspace extent, capped by the
// query size so unbounded default limits do not blow the exploration up.
Eigen::Vector3d initial_axis_std(const PlanningProblem& problem, double frac) {
  const double span = (problem.goal - problem.start.pos).norm();
  const double cap = 4.0 * span + 1.0;
  Eigen::Vector3d std_ax;
  for (int ax = 0; ax < 3; ++ax) {
    const double extent = problem.limits.s_max[ax] - problem.limits.s_min[ax];
    std_ax[ax] = frac * std::min(std::max(extent, 0.0), cap);
  }
  return std_ax;
}

// Exploration covariance built from smooth deflection modes. In normalized
// time the polynomials s^(3+j)(1-s), j = 0..n_c-5, span exactly the
// perturbations that leave the pinned start position/velocity/acceleration
// and the end position untouched, so the equality projection cannot cancel
// them; each mode is normalized to unit peak deflection and weighted by the
// per-axis extent with a decay over the mode order. A covariance that is
// instead diagonal in monomial coefficients loses almost its entire spread
// once the boundary equalities are enforced.
Eigen::MatrixXd initial_covariance(const PlanningProblem& problem, double frac) {
  const int n_c = problem.basis.coeffs_per_axis();
  const int n_v = problem.basis.n_vars();
  const Eigen::Vector3d std_ax = initial_axis_std(problem, frac);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n_v, n_v);
  if (n_c < 5) {
    // The boundary rows leave no free directions; exploration is impossible
    // and the (deterministic) mean is all the distribution can express.
    return sigma;
  }

  // Deflection modes spanning every direction the boundary system leaves
  // free (flat at the start, which is pinned up to acceleration, and zero at
  // the fixed endpoint).  Spanning all of them matters: a direction missing
  // here is one the optimizer can never move along, however long it runs.
  //
  // Modes 0..n_c-6 are s^(3+j) (1-s)^2: doubly flat at the endpoint, so they
  // deflect the middle of the trajectory, where exploration pays off.  The
  // last mode, s^3 (1-s), is the one remaining free direction; it is the only
  // mode with endpoint slope, i.e. it owns the terminal velocity.
  const int n_modes = n_c - 4;
  Eigen::MatrixXd modes = Eigen::MatrixXd::Zero(n_c, n_modes);
  Eigen::VectorXd vel_amp(n_modes), acc_amp(n_modes), decay(n_modes);
  for (int j = 0; j < n_modes; ++j) {
    if (j < n_modes - 1) {
      modes(3 + j, j) = 1.0;
      modes(4 + j, j) = -2.0;
      modes(5 + j, j) = 1.0;
      decay[j] = 1.0 / (1.0 + j);
    } else {
      modes(3, j) = 1.0;
      modes(4, j) = -1.0;
      decay[j] = 0.5;  // as smooth as the second mid-deflection mode
    }
  }
  // Orthonormalize the family in the sampled-position metric.  The raw bump
  // shapes overlap heavily; with a diagonal covariance over near-parallel
  // modes, shape directions that are *differences* of neighbouring bumps get
  // vanishing variance and the optimizer can spend its whole budget unable to
  // move along them.  QR of the evaluated shapes fixes the conditioning while
  // preserving the family's order (mode j is adjusted by modes 0..j-1 only).
  {
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(problem.basis.P * modes);
    const Eigen::MatrixXd r =
        qr.matrixQR().topLeftCorner(n_modes, n_modes).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd orth =
        r.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(modes);
    modes = orth;
  }
  // The solve above mixes nearly-parallel raw modes with large cancelling
  // weights, and the rounding error of that mix lands outside the boundary
  // null space — enough for every draw to visibly miss the endpoint
  // conditions.  Snap the mixed modes back onto the null space of the
  // per-axis boundary operator.
  {
    Eigen::MatrixXd bnd(4, n_c);
    bnd.row(0) = problem.basis.P.row(0);
    bnd.row(1) = problem.basis.Pdot.row(0);
    bnd.row(2) = problem.basis.Pddot.row(0);
    bnd.row(3) = problem.basis.P.row(problem.basis.n_p - 1);
    const Eigen::MatrixXd gram = bnd * bnd.transpose();
    const auto gram_ldlt = gram.ldlt();
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::MatrixXd corr = bnd.transpose() * gram_ldlt.solve(bnd * modes);
      modes -= corr;
    }
  }
  for (int j = 0; j < n_modes; ++j) {
    // Peak deflection over the grid, so one std of a mode reads in metres.
    const double amp = (problem.basis.P * modes.col(j)).cwiseAbs().maxCoeff();
    modes.col(j) /= std::max(amp, 1e-12);
    vel_amp[j] = (problem.basis.Pdot * modes.col(j)).cwiseAbs().maxCoeff();
    acc_amp[j] = (problem.basis.Pddot * modes.col(j)).cwiseAbs().maxCoeff();
  }
  // A mode drawn at one std deflects positions by the std directly; cap the
  // std so the matching velocity/acceleration deflection stays a fraction of
  // the limits, otherwise every sample starts dynamically infeasible and the
  // projection spends its budget fighting the limits instead of obstacles.
  constexpr double kDynBudget = 0.5;
  for (int ax = 0; ax < 3; ++ax) {
    Eigen::MatrixXd scaled(n_c, n_modes);
    for (int j = 0; j < n_modes; ++j) {
      double mode_std = std_ax[ax] * decay[j];
      mode_std = std::min(mode_std, kDynBudget * problem.limits.v_max / vel_amp[j]);
      mode_std = std::min(mode_std, kDynBudget * problem.limits.a_max / acc_amp[j]);
      scaled.col(j) = mode_std * modes.col(j);
    }
    // Accumulate one triangle and mirror it so the block is exactly
    // symmetric; summing the outer products per entry is not, once the mode
    // coefficients are large enough for their rounding to show.
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n_c, n_c);
    block.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
    sigma.block(ax * n_c, ax * n_c, n_c, n_c) = block.selfadjointView<Eigen::Lower>();
  }
  return sigma;
}

struct DistSlice {
  int offset = 0;
  int count = 0;
};

// An elite retained across iterations, with its already-computed scores.
struct PoolEntry {
  Trajectory traj;
  double cost = 0.0;
  double resid = 0.0;
};

// The optimizer core shared by the single-distribution, decentralized and
// baseline entry points. `two_stage` turns the lowest-residual pre-selection
// on (projection-guided mode) or off (baseline mode).
OptimizeResult optimize_core(const PlanningProblem& problem, const SamplerConfig& cfg,
                             const ProjectionConfig& proj_cfg,
                             std::vector<SamplerState> states, bool two_stage) {
  const auto t_total = std::chrono::steady_clock::now();
  validate_config(cfg);
  const int m = static_cast<int>(states.size());
  if (m < 1) throw std::invalid_argument("optimizer: need at least one distribution");
  if (cfg.n_batch % m != 0) {
    throw std::invalid_argument("optimizer: distribution count must divide n_batch");
  }
  const int nb_j = cfg.n_batch / m;
  const int nproj_j = std::min(std::max(1, cfg.n_proj / m), nb_j);
  const int nelite_j = std::clamp(cfg.n_elite / m, 1, nproj_j);

  const int n_v = problem.basis.n_vars();
  for (const SamplerState& s : states) {
    if (s.mu.size() != n_v || s.sigma.rows() != n_v || s.sigma.cols() != n_v) {
      throw std::invalid_argument("optimizer: distribution state does not match the basis");
    }
  }

  const BoundaryConstraints bc =
      build_boundary_system(problem.basis, problem.start, problem.goal);
  const PolarConstraintSystem system =
      build_constraint_system(problem.basis, problem.obstacles, problem.limits);
  const ProjectionWorkspace ws = precompute_workspace(system, bc, proj_cfg);
  const CostContext ctx{problem.start.pos, problem.goal};

  std::vector<std::mt19937_64> rngs;
  rngs.reserve(m);
  for (int j = 0; j < m; ++j) rngs.push_back(stream_for(cfg.seed, j));

  OptimizeResult res;
  res.best_cost = kInf;
  res.best_residual = kInf;

  // Elite lists persist across iterations: retained trajectories compete with
  // every new batch, so an unlucky batch can never drag the update away from
  // the best solutions found so far, and late iterations refine around them.
  std::vector<std::vector<PoolEntry>> pools(static_cast<std::size_t>(m));

  std::vector<Trajectory> batch;
  batch.reserve(cfg.n_batch);
  for (int iter = 0; iter < cfg.n_iters; ++iter) {
    const auto t_iter = std::chrono::steady_clock::now();
    batch.clear();
    std::vector<DistSlice> slices(m);
    for (int j = 0; j < m; ++j) {
      slices[j] = {static_cast<int>(batch.size()), nb_j};
      std::vector<Trajectory> drawn = sample_batch(states[j], nb_j, rngs[j]);
      std::move(drawn.begin(), drawn.end(), std::back_inserter(batch));
    }

    const ProjectionResult proj =
        project_batch(batch, ws, problem.obstacles, problem.limits, problem.basis);
    res.boundary_violation_max =
        std::max(res.boundary_violation_max, proj.boundary_violation_max);
    res.boundary_audit_count += proj.boundary_audit_count;

    for (int j = 0; j < m; ++j) {
      const DistSlice slice = slices[j];
      const Eigen::VectorXd r_j = proj.residuals.segment(slice.offset, slice.count);

      // Candidate set: lowest-residual pre-selection, or the whole slice.
      std::vector<int> cset;
      if (two_stage) {
        for (int local : select_lowest(r_j, nproj_j)) cset.push_back(slice.offset + local);
      } else {
        cset.resize(slice.count);
        std::iota(cset.begin(), cset.end(), slice.offset);
      }

      Eigen::VectorXd costs(static_cast<int>(cset.size()));
      for (int k = 0; k < costs.size(); ++k) {
        const int i = cset[k];
        if (proj.aborted[i] || !std::isfinite(proj.residuals[i])) {
          costs[k] = kInf;
          continue;
        }
        costs[k] = augmented_cost(proj.trajectories[i], proj.residuals[i], problem.weights,
                                  ctx, problem.basis);
        if (!std::isfinite(costs[k])) {
          throw std::runtime_error("optimizer: non-finite cost for sample " +
                                   std::to_string(i) + " at iteration " +
                                   std::to_string(iter));
        }
      }

      // New candidates and retained elites compete on equal terms.
      std::vector<Trajectory> cand_traj;
      std::vector<double> cand_cost;
      std::vector<double> cand_resid;
      cand_traj.reserve(cset.size() + pools[j].size());
      for (int k = 0; k < costs.size(); ++k) {
        if (!std::isfinite(costs[k])) continue;  // aborted samples; drop them
        cand_traj.push_back(proj.trajectories[cset[k]]);
        cand_cost.push_back(costs[k]);
        cand_resid.push_back(proj.residuals[cset[k]]);
      }
      for (const PoolEntry& e : pools[j]) {
        cand_traj.push_back(e.traj);
        cand_cost.push_back(e.cost);
        cand_resid.push_back(e.resid);
      }

      const Eigen::VectorXd cand_vec =
          Eigen::Map<const Eigen::VectorXd>(cand_cost.data(), cand_cost.size());
      const std::vector<int> elite_loc =
          select_lowest(cand_vec, std::min<int>(nelite_j, cand_vec.size()));
      std::vector<Trajectory> elites;
      std::vector<double> elite_costs;
      pools[j].clear();
      for (int loc : elite_loc) {
        elites.push_back(cand_traj[loc]);
        elite_costs.push_back(cand_cost[loc]);
        pools[j].push_back({cand_traj[loc], cand_cost[loc], cand_resid[loc]});
      }

      IterationDiag diag;
      diag.iteration = iter;
      diag.distribution = j;
      diag.elite_count = static_cast<int>(elites.size());
      double finite_r_sum = 0.0;
      int finite_r_count = 0;
      for (int t = 0; t < r_j.size(); ++t) {
        if (std::isfinite(r_j[t])) {
          finite_r_sum += r_j[t];
          ++finite_r_count;
        }
      }
      diag.mean_residual = finite_r_count > 0 ? finite_r_sum / finite_r_count : kInf;

      if (!elites.empty()) {
        const Eigen::VectorXd elite_vec =
            Eigen::Map<const Eigen::VectorXd>(elite_costs.data(), elite_costs.size());
        diag.min_cost = elite_vec.minCoeff();
        diag.mean_cost = elite_vec.mean();

        // elite_loc is ordered by cost, so the first kept entry is the best.
        if (elite_costs.front() < res.best_cost) {
          res.best = elites.front();
          res.best_cost = elite_costs.front();
          res.best_residual = cand_resid[elite_loc.front()];
          res.found = true;
        }

        // Temperature proportional to the elite cost spread: the exponential
        // weighting then responds to relative cost differences, so the
        // effective elite count does not depend on the problem's cost scale
        // (with a fixed temperature, a spread of a few cost units collapses
        // all weight onto one sample and freezes the covariance in a handful
        // of iterations).
        const double spread = elite_vec.mean() - elite_vec.minCoeff();
        const Eigen::VectorXd w =
            compute_weights(elite_vec, cfg.gamma * std::max(spread, 1e-12));
        states[j] = update_distribution(states[j], elites, w, cfg.sigma);
      } else {
        diag.min_cost = kInf;
        diag.mean_cost = kInf;
        std::cerr << "priest: iteration " << iter << " distribution " << j
                  << " produced no usable elites; distribution left unchanged\n";
      }
      diag.elapsed_ms = since_ms(t_iter);
      res.diagnostics.push_back(diag);

      if (cfg.diag_stream != nullptr) {
        nlohmann::json line = {{"iteration", diag.iteration},
                               {"distribution", diag.distribution},
                               {"min_cost", diag.min_cost},
                               {"mean_cost", diag.mean_cost},
                               {"mean_residual", diag.mean_residual},
                               {"elite_count", diag.elite_count},
                               {"elapsed_ms", diag.elapsed_ms}};
        *cfg.diag_stream << line.dump() << '\n';
      }
    }
  }

  res.final_states = std::move(states);
  res.total_ms = since_ms(t_total);
  return res;
}

}  // namespace

std::vector<Trajectory> sample_batch(const SamplerState& state, int n, std::mt19937_64& rng) {
  const int n_v = static_cast<int>(state.mu.size());
  if (n < 0) throw std::invalid_argument("sample_batch: negative sample count");
  if (state.sigma.rows() != n_v || state.sigma.cols() != n_v) {
    throw std::invalid_argument("sample_batch: covariance shape does not match the mean");
  }

  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n_v, n_v);
  if (n_v > 0 && !(state.sigma.array() == 0.0).all()) {
    const Eigen::MatrixXd sym = 0.5 * (state.sigma + state.sigma.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) {
      throw std::runtime_error("sample_batch: covariance eigendecomposition failed");
    }
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const double scale = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
    if (lam.minCoeff() < -1e-6 * scale) {
      throw std::runtime_error("sample_batch: covariance is indefinite");
    }
    // Square root via the truncated eigendecomposition rather than a jittered
    // Cholesky factor: a rank-deficient covariance must produce draws confined
    // to its range, with no jitter-scale leakage into excluded directions.
    const double floor = 1e-12 * scale;
    const Eigen::VectorXd root =
        lam.unaryExpr([&](double v) { return v > floor ? std::sqrt(v) : 0.0; });
    l = eig.eigenvectors() * root.asDiagonal();
  }

  // Draws inherit whatever rounding the covariance carries outside the
  // boundary manifold, so each one is re-projected onto it after sampling.
  const bool snap = state.manifold_a.rows() > 0;
  Eigen::LDLT<Eigen::MatrixXd> manifold_gram;
  if (snap) {
    if (state.manifold_a.cols() != n_v ||
        state.manifold_b.size() != state.manifold_a.rows()) {
      throw std::invalid_argument("sample_batch: manifold shape does not match the mean");
    }
    manifold_gram.compute((state.manifold_a * state.manifold_a.transpose()).eval());
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Trajectory> out(static_cast<std::size_t>(n));
  Eigen::VectorXd z(n_v);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n_v; ++k) z[k] = normal(rng);
    Eigen::VectorXd draw = state.mu + l * z;
    if (snap) {
      draw += state.manifold_a.transpose() *
              manifold_gram.solve(state.manifold_b - state.manifold_a * draw);
    }
    out[static_cast<std::size_t>(i)].coeffs = std::move(draw);
  }
  return out;
}

std::vector<int> select_lowest(const Eigen::VectorXd& values, int k) {
  const int n = static_cast<int>(values.size());
  if (k < 0 || k > n) throw std::invalid_argument("select_lowest: k out of range");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  const auto better = [&values](int a, int b) {
    const bool fa = std::isfinite(values[a]);
    const bool fb = std::isfinite(values[b]);
    if (fa != fb) return fa;  // non-finite entries rank last
    if (fa && values[a] != values[b]) return values[a] < values[b];
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), better);
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

Eigen::VectorXd compute_weights(const Eigen::VectorXd& costs, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("compute_weights: gamma must be positive");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(costs.size());
  double delta = kInf;
  for (int i = 0; i < costs.size(); ++i) {
    if (std::isfinite(costs[i])) delta = std::min(delta, costs[i]);
  }
  if (!std::isfinite(delta)) return w;
  for (int i = 0; i < costs.size(); ++i) {
    w[i] = std::isfinite(costs[i]) ? std::exp(-(costs[i] - delta) / gamma) : 0.0;
  }
  return w;
}

SamplerState update_distribution(const SamplerState& state,
                                 const std::vector<Trajectory>& elites,
                                 const Eigen::VectorXd& weights, double sigma) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) {
    throw std::invalid_argument("update_distribution: sigma must be in [0, 1]");
  }
  if (static_cast<int>(elites.size()) != weights.size()) {
    throw std::invalid_argument("update_distribution: one weight per elite required");
  }
  const int n_v = static_cast<int>(state.mu.size());
  double total = 0.0;
  for (int i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("update_distribution: weights must be finite and >= 0");
    }
    total += weights[i];
  }
  for (const Trajectory& e : elites) {
    if (e.coeffs.size() != n_v) {
      throw std::invalid_argument("update_distribution: elite size does not match the state");
    }
  }
  if (sigma == 0.0) return state;
  if (total <= 0.0) {
    std::cerr << "priest: zero total elite weight, distribution left unchanged\n";
    return state;
  }

  Eigen::VectorXd weighted_mean = Eigen::VectorXd::Zero(n_v);
  for (int i = 0; i < weights.size(); ++i) {
    weighted_mean.noalias() += weights[i] * elites[static_cast<std::size_t>(i)].coeffs;
  }
  weighted_mean /= total;

  SamplerState next;
  next.manifold_a = state.manifold_a;
  next.manifold_b = state.manifold_b;
  next.mu = (1.0 - sigma) * state.mu + sigma * weighted_mean;

  // Scatter about the updated mean, not the previous one.
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(n_v, n_v);
  for (int i = 0; i < weights.size(); ++i) {
    const Eigen::VectorXd d = elites[static_cast<std::size_t>(i)].coeffs - next.mu;
    scatter.noalias() += weights[i] * (d * d.transpose());
  }
  scatter /= total;

  const Eigen::MatrixXd blended = (1.0 - sigma) * state.sigma + sigma * scatter;
  next.sigma = 0.5 * (blended + blended.transpose());
  return next;
}

SamplerState make_initial_state(const PlanningProblem& problem, const SamplerConfig& cfg) {
  const BoundaryConstraints bc =
      build_boundary_system(problem.basis, problem.start, problem.goal);
  const Eigen::MatrixXd wps =
      straight_line_waypoints(problem.basis, problem.start.pos, problem.goal);
  SamplerState state;
  state.mu = fit_to_waypoints(problem.basis, bc, wps).coeffs;

  state.sigma = initial_covariance(problem, cfg.init_std_frac);
  state.manifold_a = bc.A;
  state.manifold_b = bc.b_eq;
  return state;
}

std::vector<SamplerState> make_decentralized_states(const PlanningProblem& problem,
                                                    const SamplerConfig& cfg, int m) {
  if (m < 1) throw std::invalid_argument("make_decentralized_states: m must be >= 1");
  const SamplerState base = make_initial_state(problem, cfg);
  std::vector<SamplerState> states;
  states.reserve(static_cast<std::size_t>(m));
  if (m == 1) {
    states.push_back(base);
    return states;
  }

  const BoundaryConstraints bc =
      build_boundary_system(problem.basis, problem.start, problem.goal);
  Eigen::Vector3d u = problem.goal - problem.start.pos;
  Eigen::Vector3d lateral(-u.y(), u.x(), 0.0);
  if (lateral.norm() < 1e-12) {
    lateral = Eigen::Vector3d(1.0, 0.0, 0.0);
  } else {
    lateral.normalize();
  }
  const Eigen::Vector3d extent = problem.limits.s_max - problem.limits.s_min;
  const double span = (problem.goal - problem.start.pos).norm();
  const double cross =
      std::min(lateral.cwiseAbs().dot(extent.cwiseMax(0.0)), 4.0 * span + 1.0);

  const Eigen::MatrixXd line =
      straight_line_waypoints(problem.basis, problem.start.pos, problem.goal);
  for (int j = 0; j < m; ++j) {
    const double f = (j + 0.5) / m - 0.5;  // evenly spaced in (-1/2, 1/2)
    Eigen::MatrixXd wps = line;
    for (int t = 0; t < problem.basis.n_p; ++t) {
      const double s =
          problem.basis.n_p > 1 ? static_cast<double>(t) / (problem.basis.n_p - 1) : 0.0;
      const double bump = 4.0 * s * (1.0 - s);  // zero at both boundaries
      wps.row(t) += (f * 0.7 * cross * bump) * lateral.transpose();
    }
    SamplerState state;
    state.mu = fit_to_waypoints(problem.basis, bc, wps).coeffs;
    state.sigma = base.sigma;
    states.push_back(std::move(state));
  }
  return states;
}

OptimizeResult priest_optimize(const PlanningProblem& problem, const SamplerConfig& cfg,
                               const ProjectionConfig& proj_cfg,
                               const SamplerState* init_state) {
  std::vector<SamplerState> states;
  if (init_state != nullptr) {
    states.push_back(*init_state);
  } else {
    states.push_back(make_initial_state(problem, cfg));
  }
  return optimize_core(problem, cfg, proj_cfg, std::move(states), /*two_stage=*/true);
}

OptimizeResult dpriest_optimize(const PlanningProblem& problem, const SamplerConfig& cfg,
                                const ProjectionConfig& proj_cfg,
                                const std::vector<SamplerState>* init_states) {
  std::vector<SamplerState> states;
  if (init_states != nullptr) {
    states = *init_states;
  } else {
    states = make_decentralized_states(problem, cfg, cfg.m_dists);
  }
  if (static_cast<int>(states.size()) != cfg.m_dists) {
    throw std::invalid_argument("dpriest_optimize: need one initial state per distribution");
  }
  return optimize_core(problem, cfg, proj_cfg, std::move(states), /*two_stage=*/true);
}

OptimizeResult cem_baseline_optimize(const PlanningProblem& problem, const SamplerConfig& cfg,
                                     const ProjectionConfig& proj_cfg,
                                     const SamplerState* init_state) {
  ProjectionConfig eq_only = proj_cfg;
  eq_only.rho = 0.0;    // the QP degenerates to the boundary-equality projection
  eq_only.max_iters = 1;  // which is idempotent, so one pass is exact
  std::vector<SamplerState> states;
  if (init_state != nullptr) {
    states.push_back(*init_state);
  } else {
    states.push_back(make_initial_state(problem, cfg));
  }
  return optimize_core(problem, cfg, eq_only, std::move(states), /*two_stage=*/false);
}

}  // namespace priest
