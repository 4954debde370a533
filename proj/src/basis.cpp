#include "priest/basis.hpp"

#include <stdexcept>

namespace priest {

BasisSet build_basis(int n_p, int degree, double t0, double tf) {
  if (degree < 0 || n_p < degree + 1 || n_p < 2) {
    throw std::invalid_argument("build_basis: need n_p >= degree+1 and n_p >= 2");
  }
  if (!(tf > t0)) {
    throw std::invalid_argument("build_basis: need tf > t0");
  }

  BasisSet basis;
  basis.n_p = n_p;
  basis.degree = degree;
  basis.t0 = t0;
  basis.tf = tf;
  basis.t_grid = Eigen::VectorXd::LinSpaced(n_p, t0, tf);

  const int n_c = degree + 1;
  const double T = tf - t0;
  basis.P.setZero(n_p, n_c);
  basis.Pdot.setZero(n_p, n_c);
  basis.Pddot.setZero(n_p, n_c);

  for (int i = 0; i < n_p; ++i) {
    const double s = (basis.t_grid[i] - t0) / T;
    double sk = 1.0;  // s^k
    for (int k = 0; k < n_c; ++k) {
      basis.P(i, k) = sk;
      sk *= s;
    }
    double skm1 = 1.0;  // s^(k-1)
    for (int k = 1; k < n_c; ++k) {
      basis.Pdot(i, k) = k * skm1 / T;
      skm1 *= s;
    }
    double skm2 = 1.0;  // s^(k-2)
    for (int k = 2; k < n_c; ++k) {
      basis.Pddot(i, k) = k * (k - 1) * skm2 / (T * T);
      skm2 *= s;
    }
  }
  return basis;
}

TrajectorySamples evaluate(const Trajectory& traj, const BasisSet& basis) {
  const int n_c = basis.coeffs_per_axis();
  if (traj.coeffs.size() != 3 * n_c) {
    throw std::invalid_argument("evaluate: coefficient count mismatch");
  }
  TrajectorySamples out;
  out.pos.resize(basis.n_p, 3);
  out.vel.resize(basis.n_p, 3);
  out.acc.resize(basis.n_p, 3);
  for (int ax = 0; ax < 3; ++ax) {
    const auto c = traj.coeffs.segment(ax * n_c, n_c);
    out.pos.col(ax).noalias() = basis.P * c;
    out.vel.col(ax).noalias() = basis.Pdot * c;
    out.acc.col(ax).noalias() = basis.Pddot * c;
  }
  return out;
}

BoundaryConstraints build_boundary_system(const BasisSet& basis,
                                          const BoundaryState& start,
                                          const Eigen::Vector3d& goal) {
  if (basis.degree < 3) {
    throw std::invalid_argument(
        "build_boundary_system: degree < 3 cannot satisfy 4 equality rows per axis");
  }
  const int n_c = basis.coeffs_per_axis();
  const int last = basis.n_p - 1;

  BoundaryConstraints bc;
  bc.A.setZero(12, 3 * n_c);
  bc.b_eq.resize(12);
  for (int ax = 0; ax < 3; ++ax) {
    const int r = 4 * ax;
    const int c = ax * n_c;
    bc.A.block(r + 0, c, 1, n_c) = basis.P.row(0);
    bc.A.block(r + 1, c, 1, n_c) = basis.Pdot.row(0);
    bc.A.block(r + 2, c, 1, n_c) = basis.Pddot.row(0);
    bc.A.block(r + 3, c, 1, n_c) = basis.P.row(last);
    bc.b_eq[r + 0] = start.pos[ax];
    bc.b_eq[r + 1] = start.vel[ax];
    bc.b_eq[r + 2] = start.acc[ax];
    bc.b_eq[r + 3] = goal[ax];
  }
  return bc;
}

Eigen::VectorXd fit_min_norm(const BoundaryConstraints& bc) {
  // A A^T is 12x12 and nonsingular for any valid basis.
  Eigen::MatrixXd AAt = bc.A * bc.A.transpose();
  return bc.A.transpose() * AAt.ldlt().solve(bc.b_eq);
}

Trajectory fit_to_waypoints(const BasisSet& basis, const BoundaryConstraints& bc,
                            const Eigen::MatrixXd& waypoints) {
  if (waypoints.rows() != basis.n_p || waypoints.cols() != 3) {
    throw std::invalid_argument("fit_to_waypoints: waypoints must be n_p x 3");
  }
  const int n_c = basis.coeffs_per_axis();
  const int n_v = 3 * n_c;
  const int m = static_cast<int>(bc.A.rows());

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n_v, n_v);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n_v);
  const Eigen::MatrixXd PtP = basis.P.transpose() * basis.P;
  for (int ax = 0; ax < 3; ++ax) {
    H.block(ax * n_c, ax * n_c, n_c, n_c) = PtP;
    g.segment(ax * n_c, n_c) = basis.P.transpose() * waypoints.col(ax);
  }

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n_v + m, n_v + m);
  kkt.topLeftCorner(n_v, n_v) = H;
  kkt.topRightCorner(n_v, m) = bc.A.transpose();
  kkt.bottomLeftCorner(m, n_v) = bc.A;
  Eigen::VectorXd rhs(n_v + m);
  rhs << g, bc.b_eq;

  Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);
  Trajectory traj;
  traj.coeffs = sol.head(n_v);
  return traj;
}

}  // namespace priest
