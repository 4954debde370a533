#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "priest/basis.hpp"
#include "priest/costs.hpp"
#include "priest/polar.hpp"
#include "priest/projection.hpp"

namespace priest {

struct SamplerConfig {
  int n_iters = 13;    // outer optimizer iterations
  int n_batch = 110;   // samples per iteration (all distributions combined)
  int n_proj = 80;     // lowest-residual pre-selection size
  int n_elite = 20;    // lowest-cost elite size
  double sigma = 0.8;  // distribution learning rate, (0, 1]
  double gamma = 1.0;  // exponential weighting temperature, > 0
  int m_dists = 1;     // parallel distributions (decentralized mode)
  std::uint64_t seed = 0;
  double init_std_frac = 0.25;        // initial exploration std, fraction of extent
  std::ostream* diag_stream = nullptr;  // optional JSON-lines diagnostics
};

struct SamplerState {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  // Affine manifold the distribution lives on (the boundary conditions).
  // When set, draws are re-projected onto it: the covariance is supported on
  // the manifold's tangent space only up to floating-point error, which can
  // reach visible scale once badly-conditioned shape directions carry large
  // coefficients.  Empty matrices disable the correction.
  Eigen::MatrixXd manifold_a;
  Eigen::VectorXd manifold_b;
};

struct IterationDiag {
  int iteration = 0;
  int distribution = 0;
  double min_cost = 0.0;
  double mean_cost = 0.0;
  double mean_residual = 0.0;
  int elite_count = 0;
  double elapsed_ms = 0.0;
};

struct OptimizeResult {
  Trajectory best;
  double best_cost = 0.0;
  double best_residual = 0.0;
  bool found = false;
  std::vector<IterationDiag> diagnostics;
  std::vector<SamplerState> final_states;  // one per distribution
  double total_ms = 0.0;
  // Aggregated over every projection iterate of the run.
  double boundary_violation_max = 0.0;
  std::int64_t boundary_audit_count = 0;
};

// Everything a point-to-point planning query needs.
struct PlanningProblem {
  BoundaryState start;
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();
  std::vector<Obstacle> obstacles;
  Limits limits;
  BasisSet basis;
  CostWeights weights = CostWeights::point_to_point();
};

// Draw n i.i.d. samples from N(mu, sigma). The covariance factor comes from
// a rank-truncated eigendecomposition, so a PSD sigma confines draws to its
// range; an exactly-zero sigma yields n copies of mu. Draws are re-projected
// onto the state's affine manifold when one is set.
std::vector<Trajectory> sample_batch(const SamplerState& state, int n, std::mt19937_64& rng);

// Indices of the k smallest values, ties broken toward the smaller index.
std::vector<int> select_lowest(const Eigen::VectorXd& values, int k);

// c_m = exp(-(c_m - min c)/gamma); the best entry always gets weight 1.
Eigen::VectorXd compute_weights(const Eigen::VectorXd& costs, double gamma);

// Exponentially weighted mean/covariance blend; sigma is the step size.
// Zero total weight leaves the state unchanged (with a warning on stderr).
SamplerState update_distribution(const SamplerState& state,
                                 const std::vector<Trajectory>& elites,
                                 const Eigen::VectorXd& weights, double sigma);

// Initial mean: straight start->goal line fit under the boundary conditions.
// Initial covariance: deflection modes spanning the boundary system's null
// space, with per-axis stds scaled by the workspace extent (init_std_frac)
// and capped so one-std draws respect a fraction of the dynamic limits.
SamplerState make_initial_state(const PlanningProblem& problem, const SamplerConfig& cfg);

// Initial states for the decentralized mode: the straight-line mean bowed
// laterally by evenly spaced offsets so the distributions explore different
// homotopies. m = 1 reduces to make_initial_state exactly.
std::vector<SamplerState> make_decentralized_states(const PlanningProblem& problem,
                                                    const SamplerConfig& cfg, int m);

// Projection-guided sampling optimizer (single distribution).
OptimizeResult priest_optimize(const PlanningProblem& problem, const SamplerConfig& cfg,
                               const ProjectionConfig& proj_cfg,
                               const SamplerState* init_state = nullptr);

// Decentralized variant: m_dists independent distributions share one joint
// projection batch per iteration.
OptimizeResult dpriest_optimize(const PlanningProblem& problem, const SamplerConfig& cfg,
                                const ProjectionConfig& proj_cfg,
                                const std::vector<SamplerState>* init_states = nullptr);

// Ablation baseline: projection reduced to the boundary equalities only
// (zero penalty weight, single projection step) and plain single-stage
// selection on the augmented cost.
OptimizeResult cem_baseline_optimize(const PlanningProblem& problem, const SamplerConfig& cfg,
                                     const ProjectionConfig& proj_cfg,
                                     const SamplerState* init_state = nullptr);

}  // namespace priest
