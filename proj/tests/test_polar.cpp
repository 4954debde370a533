#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "priest/polar.hpp"
#include "test_util.hpp"

using namespace priest;

namespace {

constexpr double kPi = 3.14159265358979323846;

double ang_diff(double a, double b) {
  double d = std::fmod(a - b, 2 * kPi);
  if (d > kPi) d -= 2 * kPi;
  if (d < -kPi) d += 2 * kPi;
  return std::abs(d);
}

// Squared residual of one obstacle element at polar variables (alpha, beta, d).
double obstacle_term(const Eigen::Vector3d& delta, double a, double b, double alpha,
                     double beta, double d) {
  const double mx = a * d * std::cos(alpha) * std::sin(beta);
  const double my = a * d * std::sin(alpha) * std::sin(beta);
  const double mz = b * d * std::cos(beta);
  return (delta - Eigen::Vector3d(mx, my, mz)).squaredNorm();
}

// Same term with d minimized over d >= 0 (the beta sub-problem's effective
// objective once the d update follows in the sweep).
double obstacle_term_min_d(const Eigen::Vector3d& delta, double a, double b, double alpha,
                           double beta) {
  const Eigen::Vector3d m(a * std::cos(alpha) * std::sin(beta),
                          a * std::sin(alpha) * std::sin(beta), b * std::cos(beta));
  const double mm = m.squaredNorm();
  if (mm == 0.0) return delta.squaredNorm();
  const double d = std::max(0.0, delta.dot(m) / mm);
  return (delta - d * m).squaredNorm();
}

TrajectorySamples single_point_samples(const Eigen::Vector3d& pos, const Eigen::Vector3d& vel,
                                       const Eigen::Vector3d& acc) {
  TrajectorySamples s;
  s.pos = pos.transpose();
  s.vel = vel.transpose();
  s.acc = acc.transpose();
  return s;
}

Obstacle static_sphere(const Eigen::Vector3d& c, double r, int n_p) {
  Obstacle o;
  o.a = r;
  o.b = r;
  o.cx = Eigen::VectorXd::Constant(n_p, c.x());
  o.cy = Eigen::VectorXd::Constant(n_p, c.y());
  o.cz = Eigen::VectorXd::Constant(n_p, c.z());
  return o;
}

}  // namespace

TEST_CASE("constraint system shapes match the stacked layout") {
  BasisSet basis = build_basis(50, 10, 0.0, 5.0);
  Limits limits;
  limits.s_min << -1, -2, -3;
  limits.s_max << 4, 5, 6;

  PolarConstraintSystem empty = build_constraint_system(basis, {}, limits);
  CHECK(empty.F_tilde.rows() == 300);
  CHECK(empty.F_tilde.cols() == 33);
  CHECK(empty.G.rows() == 300);
  CHECK(empty.F.rows() == 600);

  std::vector<Obstacle> obstacles(50, static_sphere({0, 0, 0}, 0.4, 50));
  PolarConstraintSystem sys = build_constraint_system(basis, obstacles, limits);
  CHECK(sys.F_tilde.rows() == 3 * 52 * 50);
  CHECK(sys.F.rows() == 3 * 52 * 50 + 300);

  CHECK(sys.tau.size() == 300);
  for (int ax = 0; ax < 3; ++ax) {
    CHECK(sys.tau[ax * 100] == doctest::Approx(-limits.s_min[ax]));
    CHECK(sys.tau[ax * 100 + 50] == doctest::Approx(limits.s_max[ax]));
  }
}

TEST_CASE("system rejects malformed input") {
  BasisSet basis = build_basis(20, 5, 0.0, 1.0);
  Limits limits;
  Obstacle bad = static_sphere({0, 0, 0}, 0.4, 10);  // wrong grid length
  CHECK_THROWS(build_constraint_system(basis, {bad}, limits));
  Obstacle flat = static_sphere({0, 0, 0}, 0.0, 20);
  CHECK_THROWS(build_constraint_system(basis, {flat}, limits));
  Limits inverted;
  inverted.s_min << 1, 0, 0;
  inverted.s_max << -1, 1, 1;
  CHECK_THROWS(build_constraint_system(basis, {}, inverted));
}

TEST_CASE("alpha update: axis-aligned cases") {
  auto samples = single_point_samples({2, 0, 0}, {0, 1.5, 0}, {0, 0, 0});
  std::vector<Obstacle> obstacles{static_sphere({0, 0, 0}, 1.0, 1)};
  PolarVariables polar = PolarVariables::zero(1, 1);
  update_alpha(polar, samples, obstacles);
  CHECK(polar.alpha_o(0, 0) == doctest::Approx(0.0));
  CHECK(polar.alpha_v[0] == doctest::Approx(kPi / 2));
  CHECK(polar.alpha_a[0] == doctest::Approx(0.0));  // atan2(0,0) convention
}

TEST_CASE("beta update: axis-aligned cases") {
  std::vector<Obstacle> obstacles;
  PolarVariables polar = PolarVariables::zero(1, 0);

  auto up = single_point_samples({0, 0, 0}, {0, 0, 2}, {0, 0, 0});
  update_alpha(polar, up, obstacles);
  update_beta(polar, up, obstacles);
  CHECK(polar.beta_v[0] == doctest::Approx(0.0));

  auto flat = single_point_samples({0, 0, 0}, {1, 0, 0}, {0, 0, 0});
  update_alpha(polar, flat, obstacles);
  CHECK(polar.alpha_v[0] == doctest::Approx(0.0));
  update_beta(polar, flat, obstacles);
  CHECK(polar.beta_v[0] == doctest::Approx(kPi / 2));
}

TEST_CASE("d update: geometric cases and clamps") {
  Limits limits;
  limits.v_max = 1.0;
  limits.a_max = 2.0;

  std::vector<Obstacle> obstacles{static_sphere({0, 0, 0}, 0.7, 1)};
  auto outside = single_point_samples({1.4, 0, 0}, {2, 0, 0}, {0, 0, 0});
  PolarVariables polar = best_fit_polar(outside, obstacles, limits);
  CHECK(polar.alpha_o(0, 0) == doctest::Approx(0.0));
  CHECK(polar.beta_o(0, 0) == doctest::Approx(kPi / 2));
  CHECK(polar.d_o(0, 0) == doctest::Approx(2.0));  // distance 2a along +x
  CHECK(polar.d_v[0] == doctest::Approx(1.0));     // speed 2*v_max clamps

  auto inside = single_point_samples({0, 0, 0}, {0.3, 0, 0}, {0, 0, 0});
  PolarVariables pin = best_fit_polar(inside, obstacles, limits);
  CHECK(pin.d_o(0, 0) == doctest::Approx(1.0));  // robot at center clamps up
  CHECK(pin.d_v[0] == doctest::Approx(0.3));
}

TEST_CASE("d bounds hold after update on random instances") {
  auto gen = testutil::rng(21);
  std::uniform_real_distribution<double> ud(-5.0, 5.0);
  Limits limits;
  limits.v_max = 2.0;
  limits.a_max = 3.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int n_p = 7;
    TrajectorySamples samples;
    samples.pos = Eigen::MatrixXd::NullaryExpr(n_p, 3, [&]() { return ud(gen); });
    samples.vel = Eigen::MatrixXd::NullaryExpr(n_p, 3, [&]() { return ud(gen); });
    samples.acc = Eigen::MatrixXd::NullaryExpr(n_p, 3, [&]() { return ud(gen); });
    std::vector<Obstacle> obstacles{static_sphere({ud(gen), ud(gen), ud(gen)}, 0.9, n_p)};
    obstacles[0].b = 1.7;  // spheroid
    PolarVariables polar = best_fit_polar(samples, obstacles, limits);
    CHECK((polar.d_o >= 1.0).all());
    CHECK((polar.d_v >= 0.0).all());
    CHECK((polar.d_v <= 1.0).all());
    CHECK((polar.d_a >= 0.0).all());
    CHECK((polar.d_a <= 1.0).all());
  }
}

TEST_CASE("alpha closed form matches grid-search argmin") {
  auto gen = testutil::rng(31);
  std::uniform_real_distribution<double> ud(-4.0, 4.0);
  std::uniform_real_distribution<double> ub(0.2, kPi - 0.2);
  std::uniform_real_distribution<double> uds(1.0, 3.0);
  const double step = 2 * kPi / 4096;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::Vector3d delta(ud(gen), ud(gen), ud(gen));
    if (delta.head<2>().norm() < 0.3) delta.x() += 1.0;  // keep argmin well-defined
    const double a = 0.8, b = 1.4;
    const double beta = ub(gen), d = uds(gen);
    auto f = [&](double alpha) { return obstacle_term(delta, a, b, alpha, beta, d); };
    const double oracle = testutil::grid_argmin(f, -kPi, kPi, 4096);

    const int n_p = 1;
    auto samples = single_point_samples(delta, {0, 0, 0}, {0, 0, 0});
    std::vector<Obstacle> obstacles{static_sphere({0, 0, 0}, a, n_p)};
    obstacles[0].b = b;
    PolarVariables polar = PolarVariables::zero(n_p, 1);
    update_alpha(polar, samples, obstacles);
    CHECK(ang_diff(polar.alpha_o(0, 0), oracle) <= 2 * step);
  }
}

TEST_CASE("beta closed form matches grid-search argmin of the d-relaxed term") {
  auto gen = testutil::rng(37);
  std::uniform_real_distribution<double> ud(-4.0, 4.0);
  const double step = 2 * kPi / 4096;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::Vector3d delta(ud(gen), ud(gen), ud(gen));
    if (delta.norm() < 0.5) delta.z() += 1.0;
    const double a = 0.6 + 0.1 * (rep % 5), b = 1.2;

    auto samples = single_point_samples(delta, {0, 0, 0}, {0, 0, 0});
    std::vector<Obstacle> obstacles{static_sphere({0, 0, 0}, a, 1)};
    obstacles[0].b = b;
    PolarVariables polar = PolarVariables::zero(1, 1);
    update_alpha(polar, samples, obstacles);
    update_beta(polar, samples, obstacles);

    const double alpha = polar.alpha_o(0, 0);
    auto f = [&](double beta) { return obstacle_term_min_d(delta, a, b, alpha, beta); };
    const double oracle = testutil::grid_argmin(f, -kPi, kPi, 4096);
    CHECK(ang_diff(polar.beta_o(0, 0), oracle) <= 2 * step);
  }
}

TEST_CASE("beta closed form for velocity matches grid search at fixed d") {
  // The velocity/acceleration models are spherical, so the update is the
  // exact argmin at any fixed d, not only after relaxing d.
  auto gen = testutil::rng(41);
  std::uniform_real_distribution<double> ud(-3.0, 3.0);
  const double step = 2 * kPi / 4096;
  Limits limits;
  limits.v_max = 2.0;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::Vector3d vel(ud(gen), ud(gen), ud(gen));
    if (vel.norm() < 0.3) vel.x() += 1.0;
    auto samples = single_point_samples({0, 0, 0}, vel, {0, 0, 0});
    PolarVariables polar = PolarVariables::zero(1, 0);
    update_alpha(polar, samples, {});
    update_beta(polar, samples, {});
    const double alpha = polar.alpha_v[0];
    const double d = 0.7;
    auto f = [&](double beta) {
      return obstacle_term(vel, limits.v_max, limits.v_max, alpha, beta, d);
    };
    const double oracle = testutil::grid_argmin(f, -kPi, kPi, 4096);
    CHECK(ang_diff(polar.beta_v[0], oracle) <= 2 * step);
  }
}

TEST_CASE("d closed form matches a bounded 1-D search") {
  auto gen = testutil::rng(43);
  std::uniform_real_distribution<double> ud(-4.0, 4.0);
  Limits limits;
  limits.v_max = 1.7;
  limits.a_max = 2.9;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::Vector3d pos(ud(gen), ud(gen), ud(gen));
    Eigen::Vector3d vel(ud(gen), ud(gen), ud(gen));
    Eigen::Vector3d acc(ud(gen), ud(gen), ud(gen));
    const double a = 0.5, b = 1.1;
    auto samples = single_point_samples(pos, vel, acc);
    std::vector<Obstacle> obstacles{static_sphere({0.3, -0.2, 0.1}, a, 1)};
    obstacles[0].b = b;
    PolarVariables polar = best_fit_polar(samples, obstacles, limits);

    const Eigen::Vector3d delta = pos - Eigen::Vector3d(0.3, -0.2, 0.1);
    auto fo = [&](double d) {
      return obstacle_term(delta, a, b, polar.alpha_o(0, 0), polar.beta_o(0, 0), d);
    };
    CHECK(std::abs(polar.d_o(0, 0) - testutil::golden_min(fo, 1.0, 50.0)) <= 1e-6);

    auto fv = [&](double d) {
      return obstacle_term(vel, limits.v_max, limits.v_max, polar.alpha_v[0], polar.beta_v[0], d);
    };
    CHECK(std::abs(polar.d_v[0] - testutil::golden_min(fv, 0.0, 1.0)) <= 1e-6);

    auto fa = [&](double d) {
      return obstacle_term(acc, limits.a_max, limits.a_max, polar.alpha_a[0], polar.beta_a[0], d);
    };
    CHECK(std::abs(polar.d_a[0] - testutil::golden_min(fa, 0.0, 1.0)) <= 1e-6);
  }
}

TEST_CASE("e targets: axis-aligned spot checks") {
  Limits limits;
  limits.v_max = 2.5;
  std::vector<Obstacle> obstacles{static_sphere({1, 2, 3}, 0.5, 1)};
  obstacles[0].b = 0.9;
  PolarVariables polar = PolarVariables::zero(1, 1);
  polar.d_v[0] = 1.0;
  polar.alpha_v[0] = 0.0;
  polar.beta_v[0] = kPi / 2;
  polar.d_o(0, 0) = 1.0;
  polar.beta_o(0, 0) = 0.0;

  Eigen::VectorXd e = compute_e_tilde(polar, obstacles, limits);
  const int axis_rows = 3;  // (n_o + 2) * n_p with n_o = 1, n_p = 1
  CHECK(e[0 * axis_rows + 1] == doctest::Approx(limits.v_max));  // vx target
  CHECK(e[1 * axis_rows + 1] == doctest::Approx(0.0));
  CHECK(e[2 * axis_rows + 1] == doctest::Approx(0.0));
  CHECK(e[2 * axis_rows + 0] == doctest::Approx(3.0 + 0.9));  // z_o + b at beta = 0
}

TEST_CASE("stacked e agrees with per-timestep constraint evaluation") {
  BasisSet basis = build_basis(30, 8, 0.0, 4.0);
  Limits limits;
  limits.v_max = 2.0;
  limits.a_max = 3.0;
  limits.s_min << -8, -8, -8;
  limits.s_max << 8, 8, 8;
  auto gen = testutil::rng(53);
  std::uniform_real_distribution<double> ud(-3.0, 3.0);

  std::vector<Obstacle> obstacles;
  for (int j = 0; j < 4; ++j) {
    Obstacle o = static_sphere({ud(gen), ud(gen), ud(gen)}, 0.6, basis.n_p);
    o.b = 1.3;
    obstacles.push_back(o);
  }
  PolarConstraintSystem sys = build_constraint_system(basis, obstacles, limits);

  Trajectory traj{testutil::random_vec(gen, basis.n_vars(), 1.5)};
  TrajectorySamples samples = evaluate(traj, basis);
  PolarVariables polar = best_fit_polar(samples, obstacles, limits);
  Eigen::VectorXd slack = Eigen::VectorXd::Zero(sys.tau.size());
  Eigen::VectorXd e = compute_e(polar, obstacles, limits, slack, sys.tau);
  CHECK(e.size() == sys.F.rows());

  // Dense residual through the stacked matrices...
  Eigen::VectorXd r_tilde = sys.F_tilde * traj.coeffs - e.head(sys.F_tilde.rows());

  // ...must equal a hand evaluation of each element.
  const int n_p = basis.n_p, n_o = 4, axis_rows = (n_o + 2) * n_p;
  double max_err = 0.0;
  for (int j = 0; j < n_o; ++j) {
    for (int t = 0; t < n_p; ++t) {
      const Obstacle& o = obstacles[j];
      const double sa = std::sin(polar.alpha_o(t, j)), ca = std::cos(polar.alpha_o(t, j));
      const double sb = std::sin(polar.beta_o(t, j)), cb = std::cos(polar.beta_o(t, j));
      const double d = polar.d_o(t, j);
      max_err = std::max(max_err, std::abs(r_tilde[0 * axis_rows + j * n_p + t] -
                                           (samples.pos(t, 0) - (o.cx[t] + o.a * d * ca * sb))));
      max_err = std::max(max_err, std::abs(r_tilde[1 * axis_rows + j * n_p + t] -
                                           (samples.pos(t, 1) - (o.cy[t] + o.a * d * sa * sb))));
      max_err = std::max(max_err, std::abs(r_tilde[2 * axis_rows + j * n_p + t] -
                                           (samples.pos(t, 2) - (o.cz[t] + o.b * d * cb))));
    }
  }
  for (int t = 0; t < n_p; ++t) {
    const double sb = std::sin(polar.beta_v[t]), cb = std::cos(polar.beta_v[t]);
    const double vm = limits.v_max * polar.d_v[t];
    max_err = std::max(max_err, std::abs(r_tilde[0 * axis_rows + n_o * n_p + t] -
                                         (samples.vel(t, 0) - vm * std::cos(polar.alpha_v[t]) * sb)));
    max_err = std::max(max_err, std::abs(r_tilde[2 * axis_rows + n_o * n_p + t] -
                                         (samples.vel(t, 2) - vm * cb)));
  }
  CHECK(max_err <= 1e-10);

  // And the G block encodes the box bounds.
  Eigen::VectorXd g_res = sys.G * traj.coeffs - sys.tau;
  for (int t = 0; t < n_p; ++t) {
    CHECK(std::abs(g_res[t] - (limits.s_min[0] - samples.pos(t, 0))) <= 1e-10);
    CHECK(std::abs(g_res[n_p + t] - (samples.pos(t, 0) - limits.s_max[0])) <= 1e-10);
  }
}

TEST_CASE("AM updates never increase the stacked objective (spherical obstacles)") {
  BasisSet basis = build_basis(20, 6, 0.0, 3.0);
  Limits limits;
  limits.v_max = 1.5;
  limits.a_max = 2.5;
  auto gen = testutil::rng(59);
  std::uniform_real_distribution<double> ud(-3.0, 3.0);
  std::uniform_real_distribution<double> uang(0.0, kPi);
  std::uniform_real_distribution<double> ud01(0.0, 1.0);

  std::vector<Obstacle> obstacles;
  for (int j = 0; j < 3; ++j) {
    obstacles.push_back(static_sphere({ud(gen), ud(gen), ud(gen)}, 0.8, basis.n_p));
  }
  PolarConstraintSystem sys = build_constraint_system(basis, obstacles, limits);

  for (int rep = 0; rep < 30; ++rep) {
    Trajectory traj{testutil::random_vec(gen, basis.n_vars(), 1.0)};
    PolarVariables polar = PolarVariables::zero(basis.n_p, 3);
    polar.alpha_o = Eigen::ArrayXXd::NullaryExpr(basis.n_p, 3, [&]() { return ud(gen); });
    polar.beta_o = Eigen::ArrayXXd::NullaryExpr(basis.n_p, 3, [&]() { return uang(gen); });
    polar.d_o = 1.0 + Eigen::ArrayXXd::NullaryExpr(basis.n_p, 3, [&]() { return ud01(gen); });
    polar.alpha_v = Eigen::ArrayXd::NullaryExpr(basis.n_p, [&]() { return ud(gen); });
    polar.beta_v = Eigen::ArrayXd::NullaryExpr(basis.n_p, [&]() { return uang(gen); });
    polar.d_v = Eigen::ArrayXd::NullaryExpr(basis.n_p, [&]() { return ud01(gen); });
    polar.alpha_a = Eigen::ArrayXd::NullaryExpr(basis.n_p, [&]() { return ud(gen); });
    polar.beta_a = Eigen::ArrayXd::NullaryExpr(basis.n_p, [&]() { return uang(gen); });
    polar.d_a = Eigen::ArrayXd::NullaryExpr(basis.n_p, [&]() { return ud01(gen); });

    TrajectorySamples samples = evaluate(traj, basis);
    auto objective = [&](const PolarVariables& p) {
      Eigen::VectorXd e = compute_e_tilde(p, obstacles, limits);
      return (sys.F_tilde * traj.coeffs - e).squaredNorm();
    };

    const double l0 = objective(polar);
    update_alpha(polar, samples, obstacles);
    const double l1 = objective(polar);
    CHECK(l1 <= l0 + 1e-9);
    update_beta(polar, samples, obstacles);
    const double l2 = objective(polar);
    CHECK(l2 <= l1 + 1e-9);
    update_d(polar, samples, obstacles, limits);
    const double l3 = objective(polar);
    CHECK(l3 <= l2 + 1e-9);
  }
}

TEST_CASE("residual: trivial feasible and infeasible cases") {
  BasisSet basis = build_basis(40, 10, 0.0, 8.0);
  Limits limits;
  limits.v_max = 2.0;
  limits.a_max = 2.0;
  limits.s_min << -20, -20, -20;
  limits.s_max << 20, 20, 20;
  std::vector<Obstacle> obstacles{static_sphere({0, 5, 0}, 1.0, basis.n_p)};

  BoundaryState start;
  start.pos << -4, 0, 0;
  start.vel << 1, 0, 0;
  Eigen::Vector3d goal(4, 0, 0);
  const int n_c = basis.coeffs_per_axis();
  Trajectory line;
  line.coeffs.setZero(basis.n_vars());
  line.coeffs[0] = start.pos.x();
  line.coeffs[1] = goal.x() - start.pos.x();
  CHECK(residual(line, obstacles, limits, basis) <= 1e-6);

  Trajectory through;
  through.coeffs.setZero(basis.n_vars());
  through.coeffs[n_c] = 0.0;
  through.coeffs[n_c + 1] = 10.0;  // y runs 0 -> 10 straight through (0, 5)
  CHECK(residual(through, obstacles, limits, basis) > 0.1);
}

TEST_CASE("residual zero iff direct constraint checks pass") {
  BasisSet basis = build_basis(25, 8, 0.0, 6.0);
  auto gen = testutil::rng(61);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  Limits limits;
  limits.v_max = 2.0;
  limits.a_max = 3.0;
  limits.s_min << -12, -12, -12;
  limits.s_max << 12, 12, 12;
  std::vector<Obstacle> obstacles{static_sphere({0.5, 0.5, 0}, 0.8, basis.n_p),
                                  static_sphere({-2, 1, 0.5}, 1.2, basis.n_p)};

  auto direct_violation = [&](const Trajectory& traj) {
    TrajectorySamples s = evaluate(traj, basis);
    double worst = 0.0;
    for (int t = 0; t < basis.n_p; ++t) {
      for (const Obstacle& o : obstacles) {
        const double dx = s.pos(t, 0) - o.cx[t], dy = s.pos(t, 1) - o.cy[t],
                     dz = s.pos(t, 2) - o.cz[t];
        const double q = std::sqrt((dx * dx + dy * dy) / (o.a * o.a) + dz * dz / (o.b * o.b));
        worst = std::max(worst, o.a * (1.0 - q));  // meters of penetration along a
      }
      worst = std::max(worst, s.vel.row(t).norm() - limits.v_max);
      worst = std::max(worst, s.acc.row(t).norm() - limits.a_max);
      for (int ax = 0; ax < 3; ++ax) {
        worst = std::max(worst, limits.s_min[ax] - s.pos(t, ax));
        worst = std::max(worst, s.pos(t, ax) - limits.s_max[ax]);
      }
    }
    return worst;
  };

  int feasible_seen = 0, infeasible_seen = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Trajectory traj;
    traj.coeffs = testutil::random_vec(gen, basis.n_vars(), rep % 2 ? 0.15 : 2.0);
    traj.coeffs[0] += 4.0 * ud(gen) + 5.0;  // random offset, often clear of obstacles
    const double r = residual(traj, obstacles, limits, basis);
    const bool direct_ok = direct_violation(traj) <= 1e-6;
    if (direct_ok) {
      ++feasible_seen;
      CHECK(r <= 1e-6);
    } else {
      ++infeasible_seen;
      CHECK(r > 1e-6);
    }
  }
  CHECK(feasible_seen > 10);
  CHECK(infeasible_seen > 10);
}

TEST_CASE("residual is invariant under rigid translation") {
  BasisSet basis = build_basis(30, 8, 0.0, 5.0);
  auto gen = testutil::rng(67);
  Limits limits;
  limits.v_max = 2.0;
  limits.a_max = 3.0;
  limits.s_min << -6, -6, -6;
  limits.s_max << 6, 6, 6;
  std::vector<Obstacle> obstacles{static_sphere({1, 0, 0}, 0.9, basis.n_p)};

  for (int rep = 0; rep < 20; ++rep) {
    Trajectory traj{testutil::random_vec(gen, basis.n_vars(), 1.0)};
    Eigen::Vector3d shift = testutil::random_vec(gen, 3, 10.0);

    Trajectory moved = traj;
    const int n_c = basis.coeffs_per_axis();
    for (int ax = 0; ax < 3; ++ax) moved.coeffs[ax * n_c] += shift[ax];
    std::vector<Obstacle> moved_obs = obstacles;
    moved_obs[0].cx.array() += shift.x();
    moved_obs[0].cy.array() += shift.y();
    moved_obs[0].cz.array() += shift.z();
    Limits moved_limits = limits;
    moved_limits.s_min += shift;
    moved_limits.s_max += shift;

    const double r0 = residual(traj, obstacles, limits, basis);
    const double r1 = residual(moved, moved_obs, moved_limits, basis);
    CHECK(std::abs(r0 - r1) <= 1e-9 * std::max(1.0, r0));
  }
}

TEST_CASE("dynamic obstacle propagation follows its velocity") {
  BasisSet basis = build_basis(11, 4, 2.0, 4.0);
  Obstacle o = make_obstacle({1, 2, 3}, 0.4, 0.4, {0.5, -0.25, 0.0}, basis);
  CHECK(o.cx[0] == doctest::Approx(1.0));
  CHECK(o.cx[10] == doctest::Approx(2.0));   // +0.5 m/s over 2 s
  CHECK(o.cy[10] == doctest::Approx(1.5));
  CHECK(o.cz[5] == doctest::Approx(3.0));
}
