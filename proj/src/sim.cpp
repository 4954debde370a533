#include "priest/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace priest {

namespace {

constexpr double kPlanarB = 1e3;  // z semi-axis for planner cylinders

// Independent deterministic seed streams (same scheme as the sampler: a
// splitmix64 hop per component keeps derived seeds uncorrelated).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double surface_distance(const GeomObstacle& obs, const Eigen::Vector3d& p) {
  if (obs.planar) {
    return std::hypot(p.x() - obs.center.x(), p.y() - obs.center.y()) - obs.radius;
  }
  return (p - obs.center).norm() - obs.radius;
}

Eigen::Vector3d sample_point_2d(std::mt19937_64& rng, double half_x, double half_y) {
  std::uniform_real_distribution<double> ux(-half_x, half_x);
  std::uniform_real_distribution<double> uy(-half_y, half_y);
  const double x = ux(rng);
  const double y = uy(rng);
  return Eigen::Vector3d(x, y, 0.0);
}

// Rejection-sample an obstacle center: the predicate sees the candidate and
// accepts or rejects it. Throws when the budget runs out.
template <typename SampleFn, typename AcceptFn>
Eigen::Vector3d place_obstacle(std::mt19937_64& rng, int budget, SampleFn&& sample,
                               AcceptFn&& accept) {
  for (int attempt = 0; attempt < budget; ++attempt) {
    const Eigen::Vector3d candidate = sample(rng);
    if (accept(candidate)) return candidate;
  }
  throw std::runtime_error(
      "environment generation: rejection-sampling budget exceeded (start/goal "
      "clearance unsatisfiable with the requested obstacle density)");
}

}  // namespace

bool inside_obstacle(const GeomObstacle& obs, const Eigen::Vector3d& p) {
  return surface_distance(obs, p) < 0.0;
}

Environment generate_env_2d(std::mt19937_64& rng, const EnvGenConfig& cfg) {
  Environment env;
  const double hx = cfg.arena_x / 2.0;
  const double hy = cfg.arena_y / 2.0;
  env.bounds_min = Eigen::Vector3d(-hx, -hy, -0.5);
  env.bounds_max = Eigen::Vector3d(hx, hy, 0.5);
  env.start.pos = Eigen::Vector3d(0.0, -(hy - 1.0), 0.0);
  env.goal = Eigen::Vector3d(0.0, hy - 1.0, 0.0);
  env.limits.v_max = 2.5;
  env.limits.a_max = 3.0;
  env.limits.s_min = env.bounds_min;
  env.limits.s_max = env.bounds_max;

  env.obstacles.reserve(static_cast<std::size_t>(cfg.n_obstacles_2d));
  for (int i = 0; i < cfg.n_obstacles_2d; ++i) {
    GeomObstacle obs;
    obs.radius = cfg.radius_2d;
    obs.planar = true;
    obs.center = place_obstacle(
        rng, cfg.reject_budget,
        [&](std::mt19937_64& r) { return sample_point_2d(r, hx, hy); },
        [&](const Eigen::Vector3d& c) {
          GeomObstacle probe{c, cfg.radius_2d, Eigen::Vector3d::Zero(), true};
          return surface_distance(probe, env.start.pos) >= cfg.clearance &&
                 surface_distance(probe, env.goal) >= cfg.clearance;
        });
    env.obstacles.push_back(obs);
  }
  return env;
}

Environment generate_env_3d(std::mt19937_64& rng, const EnvGenConfig& cfg) {
  Environment env;
  env.bounds_min = Eigen::Vector3d::Zero();
  env.bounds_max = Eigen::Vector3d(cfg.room_x, cfg.room_y, cfg.room_z);
  env.start.pos = Eigen::Vector3d(0.8, 0.8, cfg.room_z / 2.0);
  env.goal = Eigen::Vector3d(cfg.room_x - 0.8, cfg.room_y - 0.8, cfg.room_z / 2.0);
  env.limits.v_max = 2.5;
  env.limits.a_max = 3.0;
  env.limits.s_min = env.bounds_min;
  env.limits.s_max = env.bounds_max;

  env.obstacles.reserve(static_cast<std::size_t>(cfg.n_obstacles_3d));
  for (int i = 0; i < cfg.n_obstacles_3d; ++i) {
    GeomObstacle obs;
    obs.radius = cfg.radius_3d;
    obs.planar = false;
    obs.center = place_obstacle(
        rng, cfg.reject_budget,
        [&](std::mt19937_64& r) {
          std::uniform_real_distribution<double> ux(0.0, cfg.room_x);
          std::uniform_real_distribution<double> uy(0.0, cfg.room_y);
          std::uniform_real_distribution<double> uz(0.0, cfg.room_z);
          const double x = ux(r);
          const double y = uy(r);
          const double z = uz(r);
          return Eigen::Vector3d(x, y, z);
        },
        [&](const Eigen::Vector3d& c) {
          GeomObstacle probe{c, cfg.radius_3d, Eigen::Vector3d::Zero(), false};
          return surface_distance(probe, env.start.pos) >= cfg.clearance &&
                 surface_distance(probe, env.goal) >= cfg.clearance;
        });
    env.obstacles.push_back(obs);
  }
  return env;
}

Environment generate_env_dynamic(std::mt19937_64& rng, const EnvGenConfig& cfg) {
  Environment env;
  env.dynamic = true;
  env.bounds_min = Eigen::Vector3d(-0.5, -cfg.corridor_half_width, -0.5);
  env.bounds_max = Eigen::Vector3d(cfg.corridor_len, cfg.corridor_half_width, 0.5);
  env.start.pos = Eigen::Vector3d(0.0, 0.0, 0.0);
  env.goal = Eigen::Vector3d(cfg.corridor_len - 1.0, 0.0, 0.0);
  env.limits.v_max = 1.0;  // the dynamic suite pins the robot's top speed
  env.limits.a_max = 2.0;
  env.limits.s_min = env.bounds_min;
  env.limits.s_max = env.bounds_max;

  // Obstacles spawn ahead of the robot and drift toward it; their surfaces
  // must clear the walls, the start, and the goal at t = 0.
  const double y_span = cfg.corridor_half_width - cfg.radius_dyn;
  env.obstacles.reserve(static_cast<std::size_t>(cfg.n_obstacles_dyn));
  for (int i = 0; i < cfg.n_obstacles_dyn; ++i) {
    GeomObstacle obs;
    obs.radius = cfg.radius_dyn;
    obs.planar = true;
    obs.vel = Eigen::Vector3d(-cfg.speed_dyn, 0.0, 0.0);
    obs.center = place_obstacle(
        rng, cfg.reject_budget,
        [&](std::mt19937_64& r) {
          std::uniform_real_distribution<double> ux(2.5, cfg.corridor_len - 1.5);
          std::uniform_real_distribution<double> uy(-y_span, y_span);
          const double x = ux(r);
          const double y = uy(r);
          return Eigen::Vector3d(x, y, 0.0);
        },
        [&](const Eigen::Vector3d& c) {
          GeomObstacle probe{c, cfg.radius_dyn, Eigen::Vector3d::Zero(), true};
          return surface_distance(probe, env.start.pos) >= cfg.clearance &&
                 surface_distance(probe, env.goal) >= cfg.clearance;
        });
    env.obstacles.push_back(obs);
  }
  return env;
}

StepOutcome step_world(const Environment& env, const RobotState& robot,
                       const Trajectory& plan, const BasisSet& basis, double dt) {
  if (dt < 0.0) throw std::invalid_argument("step_world: negative dt");
  StepOutcome out;
  out.env = env;
  out.robot = robot;

  const TrajectorySamples samples = evaluate(plan, basis);
  const double grid_dt = basis.dt();

  // State of the plan at time t, linearly interpolated between grid rows
  // (exact whenever t is a whole number of grid steps).
  const auto plan_state = [&](double t) {
    RobotState s;
    const double u = grid_dt > 0.0 ? t / grid_dt : 0.0;
    const int lo = std::clamp(static_cast<int>(std::floor(u)), 0, basis.n_p - 1);
    const int hi = std::min(lo + 1, basis.n_p - 1);
    const double w = std::clamp(u - lo, 0.0, 1.0);
    s.pos = (1.0 - w) * samples.pos.row(lo).transpose() + w * samples.pos.row(hi).transpose();
    s.vel = (1.0 - w) * samples.vel.row(lo).transpose() + w * samples.vel.row(hi).transpose();
    s.acc = (1.0 - w) * samples.acc.row(lo).transpose() + w * samples.acc.row(hi).transpose();
    return s;
  };

  constexpr int kSubsteps = 10;
  for (int k = 1; k <= kSubsteps; ++k) {
    const double t_k = dt * k / kSubsteps;
    const Eigen::Vector3d p = plan_state(t_k).pos;
    for (const GeomObstacle& obs : env.obstacles) {
      GeomObstacle moved = obs;
      moved.center += obs.vel * t_k;
      if (inside_obstacle(moved, p)) {
        out.collided = true;
        break;
      }
    }
    if (out.collided) break;
  }

  const RobotState end = plan_state(dt);
  out.robot.pos = end.pos;
  out.robot.vel = end.vel;
  out.robot.acc = end.acc;
  out.robot.time = robot.time + dt;
  for (GeomObstacle& obs : out.env.obstacles) obs.center += obs.vel * dt;
  return out;
}

std::vector<Eigen::Vector3d> lidar_scan(const Eigen::Vector3d& robot_pos,
                                        const Environment& env, int n_rays,
                                        double max_range) {
  if (n_rays < 1) throw std::invalid_argument("lidar_scan: need at least one ray");
  if (max_range <= 0.0) throw std::invalid_argument("lidar_scan: max_range must be positive");
  std::vector<Eigen::Vector3d> hits;
  hits.reserve(static_cast<std::size_t>(n_rays));

  for (int i = 0; i < n_rays; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / n_rays;
    const double dx = std::cos(theta);
    const double dy = std::sin(theta);
    double best_t = max_range;
    bool hit = false;
    for (const GeomObstacle& obs : env.obstacles) {
      // Scan plane at the robot's height: planar obstacles present their full
      // radius, spheres the circle the plane slices out of them.
      double r2 = obs.radius * obs.radius;
      if (!obs.planar) {
        const double dz = obs.center.z() - robot_pos.z();
        r2 -= dz * dz;
        if (r2 <= 0.0) continue;
      }
      const double ox = obs.center.x() - robot_pos.x();
      const double oy = obs.center.y() - robot_pos.y();
      const double proj = ox * dx + oy * dy;          // along-ray center offset
      const double perp2 = ox * ox + oy * oy - proj * proj;
      const double disc = r2 - perp2;
      if (disc < 0.0) continue;
      const double step = std::sqrt(disc);
      double t = proj - step;          // near intersection
      if (t < 0.0) t = proj + step;    // inside: take the exit point
      if (t < 0.0 || t >= best_t) continue;
      best_t = t;
      hit = true;
    }
    if (hit) {
      hits.emplace_back(robot_pos.x() + best_t * dx, robot_pos.y() + best_t * dy,
                        robot_pos.z());
    }
  }
  return hits;
}

std::vector<Eigen::Vector3d> extract_obstacles(const std::vector<Eigen::Vector3d>& points,
                                               const Eigen::Vector3d& robot_pos,
                                               double voxel_size, int k) {
  if (voxel_size <= 0.0) throw std::invalid_argument("extract_obstacles: voxel_size must be positive");
  if (k < 0) throw std::invalid_argument("extract_obstacles: negative k");

  // One centroid per occupied voxel. An ordered map keyed by the integer cell
  // index keeps the result independent of the input point order.
  using Cell = std::tuple<long long, long long, long long>;
  std::map<Cell, std::pair<Eigen::Vector3d, int>> cells;
  for (const Eigen::Vector3d& p : points) {
    const Cell c{static_cast<long long>(std::floor(p.x() / voxel_size)),
                 static_cast<long long>(std::floor(p.y() / voxel_size)),
                 static_cast<long long>(std::floor(p.z() / voxel_size))};
    auto [it, inserted] = cells.try_emplace(c, std::make_pair(p, 1));
    if (!inserted) {
      it->second.first += p;
      it->second.second += 1;
    }
  }

  std::vector<Eigen::Vector3d> centroids;
  centroids.reserve(cells.size());
  for (const auto& [cell, acc] : cells) centroids.push_back(acc.first / acc.second);

  std::stable_sort(centroids.begin(), centroids.end(),
                   [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
                     return (a - robot_pos).squaredNorm() < (b - robot_pos).squaredNorm();
                   });
  if (static_cast<int>(centroids.size()) > k) centroids.resize(static_cast<std::size_t>(k));
  return centroids;
}

std::string planner_name(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::kPriest: return "priest";
    case PlannerKind::kDPriest: return "dpriest";
    case PlannerKind::kCem: return "cem";
  }
  throw std::invalid_argument("planner_name: unknown planner");
}

std::string benchmark_name(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::kStatic2d: return "static2d";
    case BenchmarkKind::kStatic3d: return "static3d";
    case BenchmarkKind::kDynamic: return "dynamic";
    case BenchmarkKind::kPointToPoint: return "point2point";
  }
  throw std::invalid_argument("benchmark_name: unknown benchmark");
}

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Planner-facing view of the world: box constraints from the workspace
// bounds, dynamic limits from the suite, and the supplied obstacle set.
PlanningProblem make_problem(const Environment& env, const RobotState& robot,
                             const Eigen::Vector3d& goal, const BasisSet& basis,
                             std::vector<Obstacle> obstacles) {
  PlanningProblem p;
  p.basis = basis;
  p.start.pos = robot.pos;
  p.start.vel = robot.vel;
  p.start.acc = robot.acc;
  p.goal = goal;
  p.obstacles = std::move(obstacles);
  p.limits = env.limits;
  p.weights = CostWeights::point_to_point();
  return p;
}

OptimizeResult dispatch_planner(PlannerKind planner, const PlanningProblem& problem,
                                SamplerConfig cfg, const ProjectionConfig& proj_cfg,
                                const Eigen::VectorXd* warm_mu) {
  switch (planner) {
    case PlannerKind::kPriest: {
      SamplerState init = make_initial_state(problem, cfg);
      if (warm_mu != nullptr) init.mu = *warm_mu;
      return priest_optimize(problem, cfg, proj_cfg, &init);
    }
    case PlannerKind::kDPriest: {
      cfg.m_dists = std::max(2, cfg.m_dists);
      std::vector<SamplerState> init = make_decentralized_states(problem, cfg, cfg.m_dists);
      if (warm_mu != nullptr) init.front().mu = *warm_mu;
      return dpriest_optimize(problem, cfg, proj_cfg, &init);
    }
    case PlannerKind::kCem: {
      SamplerState init = make_initial_state(problem, cfg);
      if (warm_mu != nullptr) init.mu = *warm_mu;
      return cem_baseline_optimize(problem, cfg, proj_cfg, &init);
    }
  }
  throw std::invalid_argument("dispatch_planner: unknown planner");
}

// Audit a planned trajectory against the true world geometry: no grid sample
// may lie inside an obstacle (centers propagated to the sample's time). The
// planner sees margin-inflated obstacles, so this membership check is the
// strict one.
bool collision_free(const TrajectorySamples& samples, const Environment& env,
                    const BasisSet& basis) {
  for (int t = 0; t < basis.n_p; ++t) {
    const Eigen::Vector3d p = samples.pos.row(t).transpose();
    const double at = basis.t_grid[t] - basis.t0;
    for (const GeomObstacle& obs : env.obstacles) {
      GeomObstacle moved = obs;
      moved.center += obs.vel * at;
      if (inside_obstacle(moved, p)) return false;
    }
  }
  return true;
}

}  // namespace

EpisodeResult run_pointshot(const Environment& env, PlannerKind planner,
                            const SamplerConfig& sampler_cfg,
                            const ProjectionConfig& proj_cfg, const MpcConfig& mpc_cfg,
                            std::uint64_t seed) {
  EpisodeResult ep;
  const double dist = (env.goal - env.start.pos).norm();

  // Horizon sized to the task: enough time to detour, bounded below by the
  // MPC horizon so trivial instances still get a sane grid.
  const double horizon =
      std::max(mpc_cfg.horizon, 1.7 * dist / std::max(env.limits.v_max, 1e-9));
  const BasisSet basis = build_basis(mpc_cfg.n_p, mpc_cfg.degree, 0.0, horizon);

  std::vector<Obstacle> view;
  view.reserve(env.obstacles.size());
  for (const GeomObstacle& obs : env.obstacles) {
    const double r = obs.radius + mpc_cfg.margin;
    view.push_back(make_obstacle(obs.center, r, obs.planar ? kPlanarB : r, obs.vel, basis));
  }

  RobotState robot;
  robot.pos = env.start.pos;
  robot.vel = env.start.vel;
  robot.acc = env.start.acc;
  const PlanningProblem problem = make_problem(env, robot, env.goal, basis, std::move(view));

  SamplerConfig cfg = sampler_cfg;
  cfg.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  const OptimizeResult res = dispatch_planner(planner, problem, cfg, proj_cfg, nullptr);
  ep.compute_times.push_back(seconds_since(t0));

  const TrajectorySamples samples = evaluate(res.best, basis);
  const bool clear = collision_free(samples, env, basis);
  const bool reached =
      (samples.pos.row(basis.n_p - 1).transpose() - env.goal).norm() <=
      mpc_cfg.success_radius;
  ep.collision = !clear;
  ep.success = res.found && clear && reached;
  ep.travel_time = horizon;
  for (int t = 0; t < basis.n_p; ++t) {
    RobotState s;
    s.pos = samples.pos.row(t).transpose();
    s.vel = samples.vel.row(t).transpose();
    s.acc = samples.acc.row(t).transpose();
    s.time = basis.t_grid[t];
    ep.log.push_back(s);
  }
  if (!ep.success) {
    ep.failure_cause = !clear      ? "returned trajectory intersects an obstacle"
                       : !reached  ? "endpoint misses the goal"
                                   : "planner returned no trajectory";
  }
  return ep;
}

EpisodeResult run_mpc_episode(const Environment& env, PlannerKind planner,
                              const SamplerConfig& sampler_cfg,
                              const ProjectionConfig& proj_cfg, const MpcConfig& mpc_cfg,
                              std::uint64_t seed) {
  EpisodeResult ep;
  Environment world = env;
  RobotState robot;
  robot.pos = env.start.pos;
  robot.vel = env.start.vel;
  robot.acc = env.start.acc;
  ep.log.push_back(robot);

  if ((robot.pos - world.goal).norm() <= mpc_cfg.success_radius) {
    ep.success = true;
    ep.travel_time = 0.0;
    return ep;
  }

  const BasisSet basis = build_basis(mpc_cfg.n_p, mpc_cfg.degree, 0.0, mpc_cfg.horizon);
  // Execute whole grid steps per replan: the tracked state is then the exact
  // polynomial state, not an interpolant.
  const int steps = std::max(1, static_cast<int>(std::lround(mpc_cfg.replan_dt / basis.dt())));
  const double exec_dt = steps * basis.dt();

  bool have_prev = false;
  TrajectorySamples prev_samples;

  for (int replan = 0; robot.time < mpc_cfg.timeout; ++replan) {
    // Perceive: planar scan, voxel downsample, keep the nearest k points.
    const std::vector<Eigen::Vector3d> scan =
        lidar_scan(robot.pos, world, mpc_cfg.n_rays, mpc_cfg.max_range);
    const std::vector<Eigen::Vector3d> points =
        extract_obstacles(scan, robot.pos, mpc_cfg.voxel_size, mpc_cfg.k_nearest);

    std::vector<Obstacle> view;
    view.reserve(points.size());
    for (const Eigen::Vector3d& c : points) {
      view.push_back(
          make_obstacle(c, mpc_cfg.inflation, kPlanarB, Eigen::Vector3d::Zero(), basis));
    }

    // Local goal: the true goal clipped to the distance reachable within the
    // horizon, so the endpoint equality stays attainable under v_max.
    const Eigen::Vector3d to_goal = world.goal - robot.pos;
    const double dist = to_goal.norm();
    const double reach = 0.8 * world.limits.v_max * mpc_cfg.horizon;
    const Eigen::Vector3d local_goal =
        dist <= reach ? world.goal
                      : Eigen::Vector3d(robot.pos + to_goal * (reach / dist));

    const PlanningProblem problem =
        make_problem(world, robot, local_goal, basis, std::move(view));

    // Warm start: refit the previous plan, shifted by the executed slice, to
    // the new boundary conditions.
    Eigen::VectorXd warm_mu;
    const Eigen::VectorXd* warm = nullptr;
    if (have_prev) {
      const BoundaryConstraints bc =
          build_boundary_system(problem.basis, problem.start, problem.goal);
      Eigen::MatrixXd wps(basis.n_p, 3);
      for (int i = 0; i < basis.n_p; ++i) {
        wps.row(i) = prev_samples.pos.row(std::min(i + steps, basis.n_p - 1));
      }
      warm_mu = fit_to_waypoints(problem.basis, bc, wps).coeffs;
      warm = &warm_mu;
    }

    SamplerConfig cfg = sampler_cfg;
    cfg.seed = mix_seed(seed, static_cast<std::uint64_t>(replan));
    const auto t0 = std::chrono::steady_clock::now();
    const OptimizeResult res = dispatch_planner(planner, problem, cfg, proj_cfg, warm);
    ep.compute_times.push_back(seconds_since(t0));
    if (!res.found) {
      ep.failure_cause = "planner returned no trajectory";
      return ep;
    }
    prev_samples = evaluate(res.best, basis);
    have_prev = true;

    const StepOutcome step = step_world(world, robot, res.best, basis, exec_dt);
    world = step.env;
    robot = step.robot;
    ep.log.push_back(robot);
    if (step.collided) {
      ep.collision = true;
      ep.failure_cause = "collision";
      return ep;
    }
    if ((robot.pos - world.goal).norm() <= mpc_cfg.success_radius) {
      ep.success = true;
      ep.travel_time = robot.time;
      return ep;
    }
  }
  ep.failure_cause = "timeout";
  return ep;
}

MetricsTable compute_metrics(std::vector<EpisodeResult> episodes) {
  MetricsTable table;
  table.episodes = std::move(episodes);
  if (table.episodes.empty()) return table;

  int successes = 0;
  bool any_travel = false;
  bool any_compute = false;
  double travel_sum = 0.0;
  double compute_sum = 0.0;
  std::int64_t compute_count = 0;
  for (const EpisodeResult& ep : table.episodes) {
    if (ep.success) {
      ++successes;
      travel_sum += ep.travel_time;
      if (!any_travel) {
        table.travel_min = table.travel_max = ep.travel_time;
        any_travel = true;
      } else {
        table.travel_min = std::min(table.travel_min, ep.travel_time);
        table.travel_max = std::max(table.travel_max, ep.travel_time);
      }
    }
    for (double c : ep.compute_times) {
      compute_sum += c;
      ++compute_count;
      if (!any_compute) {
        table.compute_min = table.compute_max = c;
        any_compute = true;
      } else {
        table.compute_min = std::min(table.compute_min, c);
        table.compute_max = std::max(table.compute_max, c);
      }
    }
  }
  table.success_rate = static_cast<double>(successes) / table.episodes.size();
  if (successes > 0) table.travel_mean = travel_sum / successes;
  if (compute_count > 0) table.compute_mean = compute_sum / compute_count;
  return table;
}

Environment benchmark_env(BenchmarkKind kind, std::uint64_t seed, int trial,
                          const EnvGenConfig& env_cfg) {
  std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
  switch (kind) {
    case BenchmarkKind::kStatic2d: return generate_env_2d(rng, env_cfg);
    case BenchmarkKind::kStatic3d: return generate_env_3d(rng, env_cfg);
    case BenchmarkKind::kDynamic: return generate_env_dynamic(rng, env_cfg);
    case BenchmarkKind::kPointToPoint: {
      // Optimizer-reliability suite: the same 2D task with the clutter removed.
      Environment env = generate_env_2d(rng, env_cfg);
      env.obstacles.clear();
      return env;
    }
  }
  throw std::invalid_argument("benchmark_env: unknown benchmark");
}

std::map<std::string, MetricsTable> run_benchmark(
    BenchmarkKind kind, int n_trials, std::uint64_t seed,
    const std::vector<PlannerKind>& planners, const SamplerConfig& sampler_cfg,
    const ProjectionConfig& proj_cfg, const MpcConfig& mpc_cfg,
    const EnvGenConfig& env_cfg, std::ostream* progress) {
  if (n_trials < 1) throw std::invalid_argument("run_benchmark: need at least one trial");

  std::map<std::string, std::vector<EpisodeResult>> episodes;
  for (int trial = 0; trial < n_trials; ++trial) {
    const Environment env = benchmark_env(kind, seed, trial, env_cfg);
    const std::uint64_t episode_seed = mix_seed(seed ^ 0x5ca1ab1eull, trial);
    for (PlannerKind planner : planners) {
      const EpisodeResult ep =
          kind == BenchmarkKind::kDynamic
              ? run_mpc_episode(env, planner, sampler_cfg, proj_cfg, mpc_cfg, episode_seed)
              : run_pointshot(env, planner, sampler_cfg, proj_cfg, mpc_cfg, episode_seed);
      episodes[planner_name(planner)].push_back(ep);
      if (progress != nullptr) {
        *progress << benchmark_name(kind) << " trial " << trial << ' '
                  << planner_name(planner) << ": "
                  << (ep.success ? "success" : ep.failure_cause) << '\n';
      }
    }
  }

  std::map<std::string, MetricsTable> tables;
  for (auto& [name, eps] : episodes) tables[name] = compute_metrics(std::move(eps));
  return tables;
}

std::vector<ScalingRow> scaling_bench(const std::vector<int>& obstacle_counts,
                                      const std::vector<int>& batch_sizes, int repeats,
                                      std::uint64_t seed) {
  if (repeats < 1) throw std::invalid_argument("scaling_bench: need at least one repeat");
  const BasisSet basis = build_basis(50, 10, 0.0, 5.0);
  std::vector<ScalingRow> rows;

  for (int n_o : obstacle_counts) {
    for (int n_b : batch_sizes) {
      std::mt19937_64 rng(mix_seed(seed, (static_cast<std::uint64_t>(n_o) << 20) ^
                                             static_cast<std::uint64_t>(n_b)));
      // A representative static field around a straight-line query.
      Environment env;
      env.limits.v_max = 2.5;
      env.limits.a_max = 3.0;
      env.limits.s_min = Eigen::Vector3d(-2.0, -6.0, -0.5);
      env.limits.s_max = Eigen::Vector3d(12.0, 6.0, 0.5);
      env.start.pos = Eigen::Vector3d(0.0, 0.0, 0.0);
      env.goal = Eigen::Vector3d(10.0, 0.0, 0.0);
      std::uniform_real_distribution<double> ux(1.0, 9.0);
      std::uniform_real_distribution<double> uy(-4.0, 4.0);
      std::vector<Obstacle> view;
      view.reserve(static_cast<std::size_t>(n_o));
      for (int i = 0; i < n_o; ++i) {
        const double x = ux(rng);
        const double y = uy(rng);
        view.push_back(make_obstacle(Eigen::Vector3d(x, y, 0.0), 0.4, kPlanarB,
                                     Eigen::Vector3d::Zero(), basis));
      }

      RobotState robot;
      robot.pos = env.start.pos;
      const PlanningProblem problem = make_problem(env, robot, env.goal, basis, view);
      const BoundaryConstraints bc =
          build_boundary_system(basis, problem.start, problem.goal);
      const PolarConstraintSystem system =
          build_constraint_system(basis, problem.obstacles, problem.limits);
      ProjectionConfig cfg;
      cfg.max_iters = 1;  // timing the per-iteration cost
      const ProjectionWorkspace ws = precompute_workspace(system, bc, cfg);

      SamplerConfig scfg;
      const SamplerState init = make_initial_state(problem, scfg);
      std::mt19937_64 draw_rng(mix_seed(seed, 0x77));
      const std::vector<Trajectory> batch = sample_batch(init, n_b, draw_rng);

      project_batch(batch, ws, problem.obstacles, problem.limits, basis);  // warm-up
      double sum = 0.0;
      double sum_sq = 0.0;
      for (int rep = 0; rep < repeats; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        project_batch(batch, ws, problem.obstacles, problem.limits, basis);
        const double ms = seconds_since(t0) * 1e3;
        sum += ms;
        sum_sq += ms * ms;
      }
      ScalingRow row;
      row.n_obstacles = n_o;
      row.n_batch = n_b;
      row.repeats = repeats;
      row.mean_ms = sum / repeats;
      row.std_ms = repeats > 1
                       ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / repeats) / (repeats - 1)))
                       : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_line: need two or more paired points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) throw std::invalid_argument("fit_line: x values are all equal");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double mean_y = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.intercept + fit.slope * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace priest
