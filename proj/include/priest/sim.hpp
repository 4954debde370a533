#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "priest/basis.hpp"
#include "priest/polar.hpp"
#include "priest/projection.hpp"
#include "priest/sampler.hpp"

namespace priest {

// World-level obstacle: geometry plus motion, independent of any basis grid.
// Planar obstacles are infinite cylinders along z (membership ignores z);
// non-planar ones are spheres.
struct GeomObstacle {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;
  Eigen::Vector3d vel = Eigen::Vector3d::Zero();
  bool planar = true;
};

// True iff the point is strictly inside the obstacle surface.
bool inside_obstacle(const GeomObstacle& obs, const Eigen::Vector3d& p);

struct Environment {
  std::vector<GeomObstacle> obstacles;
  Eigen::Vector3d bounds_min = Eigen::Vector3d::Zero();
  Eigen::Vector3d bounds_max = Eigen::Vector3d::Zero();
  BoundaryState start;
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();
  Limits limits;  // dynamic limits the suite prescribes for the robot
  bool dynamic = false;
};

// Geometry/placement knobs for the generators. Start/goal clearance is
// measured to the obstacle surface and enforced by rejection sampling.
struct EnvGenConfig {
  // 2D arena (x by y extent, centered on the origin; motion in the z=0 plane)
  double arena_x = 10.0;
  double arena_y = 16.0;
  int n_obstacles_2d = 50;
  double radius_2d = 0.4;
  // 3D room [0, room_x] x [0, room_y] x [0, room_z]
  double room_x = 7.0;
  double room_y = 7.0;
  double room_z = 3.0;
  int n_obstacles_3d = 25;
  double radius_3d = 0.68;
  // Dynamic corridor along +x: [0, corridor_len] x [-half_width, half_width]
  double corridor_len = 13.0;
  double corridor_half_width = 1.0;
  int n_obstacles_dyn = 10;
  double radius_dyn = 0.3;
  double speed_dyn = 0.1;  // m/s, toward the robot (-x)
  double clearance = 0.8;  // start/goal surface clearance, m
  int reject_budget = 100000;
};

// Random cluttered worlds. Identical rng state reproduces the environment.
Environment generate_env_2d(std::mt19937_64& rng, const EnvGenConfig& cfg = {});
Environment generate_env_3d(std::mt19937_64& rng, const EnvGenConfig& cfg = {});
Environment generate_env_dynamic(std::mt19937_64& rng, const EnvGenConfig& cfg = {});

struct RobotState {
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
  Eigen::Vector3d vel = Eigen::Vector3d::Zero();
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  double time = 0.0;
};

struct StepOutcome {
  Environment env;
  RobotState robot;
  bool collided = false;
};

// Advance the world by dt: obstacles move by vel*dt, the robot tracks the
// planned trajectory exactly (dt is rounded to whole grid steps of the
// basis). Collision is checked at 10 substeps against the moving obstacles.
StepOutcome step_world(const Environment& env, const RobotState& robot,
                       const Trajectory& plan, const BasisSet& basis, double dt);

// Planar ray cast from the robot position: first obstacle hit per ray,
// misses excluded. Rays fan uniformly over [0, 2pi).
std::vector<Eigen::Vector3d> lidar_scan(const Eigen::Vector3d& robot_pos,
                                        const Environment& env, int n_rays,
                                        double max_range);

// Voxel-grid downsample (centroid per occupied voxel), then keep the k
// centroids nearest to the robot.
std::vector<Eigen::Vector3d> extract_obstacles(const std::vector<Eigen::Vector3d>& points,
                                               const Eigen::Vector3d& robot_pos,
                                               double voxel_size, int k);

enum class PlannerKind { kPriest, kDPriest, kCem };
std::string planner_name(PlannerKind kind);

// Receding-horizon loop and perception parameters (paper leaves these
// unstated; they are exposed here and recorded in result metadata).
struct MpcConfig {
  double horizon = 5.0;       // planning horizon per replan, s
  double replan_dt = 0.1;     // executed slice per replan, s
  double timeout = 120.0;     // simulated-time budget, s
  double success_radius = 0.5;
  int n_rays = 360;
  double max_range = 8.0;
  double voxel_size = 0.25;
  int k_nearest = 60;
  double inflation = 0.3;  // point-obstacle safety radius, m
  double margin = 0.05;    // single-shot planner-side obstacle inflation, m
  int n_p = 50;
  int degree = 10;
};

struct EpisodeResult {
  bool success = false;
  bool collision = false;
  double travel_time = 0.0;            // first time within success_radius
  std::vector<double> compute_times;   // per-replan planner wall time, s
  std::vector<RobotState> log;         // robot state after every step
  std::string failure_cause;           // empty on success
};

// scan -> extract -> plan (warm-started) -> execute one slice, until the
// robot is within success_radius of the goal, collides, or times out.
EpisodeResult run_mpc_episode(const Environment& env, PlannerKind planner,
                              const SamplerConfig& sampler_cfg,
                              const ProjectionConfig& proj_cfg, const MpcConfig& mpc_cfg,
                              std::uint64_t seed);

// One-shot planning in a fully known environment (the point-to-point task):
// a single optimizer call, success iff the result is feasible and verifiably
// collision-free against the true world geometry.
EpisodeResult run_pointshot(const Environment& env, PlannerKind planner,
                            const SamplerConfig& sampler_cfg,
                            const ProjectionConfig& proj_cfg, const MpcConfig& mpc_cfg,
                            std::uint64_t seed);

struct MetricsTable {
  double success_rate = 0.0;
  double travel_mean = 0.0, travel_min = 0.0, travel_max = 0.0;  // successes only
  double compute_mean = 0.0, compute_min = 0.0, compute_max = 0.0;  // all replans
  std::vector<EpisodeResult> episodes;
};

// Aggregates recomputed from the episode list (the table's invariant).
MetricsTable compute_metrics(std::vector<EpisodeResult> episodes);

enum class BenchmarkKind { kStatic2d, kStatic3d, kDynamic, kPointToPoint };
std::string benchmark_name(BenchmarkKind kind);

// Environment sequence for a suite: trial i is generated from (seed, i) only,
// so every planner sees the identical world.
Environment benchmark_env(BenchmarkKind kind, std::uint64_t seed, int trial,
                          const EnvGenConfig& env_cfg);

// Run n_trials seeded episodes per planner. static2d/static3d/point2point are
// single-shot planning suites; dynamic runs the full MPC loop.
std::map<std::string, MetricsTable> run_benchmark(
    BenchmarkKind kind, int n_trials, std::uint64_t seed,
    const std::vector<PlannerKind>& planners, const SamplerConfig& sampler_cfg,
    const ProjectionConfig& proj_cfg, const MpcConfig& mpc_cfg,
    const EnvGenConfig& env_cfg = {}, std::ostream* progress = nullptr);

struct ScalingRow {
  int n_obstacles = 0;
  int n_batch = 0;
  double mean_ms = 0.0;  // per projection iteration
  double std_ms = 0.0;
  int repeats = 0;
};

// Wall time of one warm projection iteration over an (n_o, N_b) grid.
std::vector<ScalingRow> scaling_bench(const std::vector<int>& obstacle_counts,
                                      const std::vector<int>& batch_sizes, int repeats,
                                      std::uint64_t seed);

// Least-squares line fit y = a + b x returning {a, b, r_squared}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace priest
