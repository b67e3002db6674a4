#include "clqr/linearize.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "clqr/dynamics.hpp"
#include "clqr/errors.hpp"

namespace clqr {

LinearSystem linearize(const RobotModel& model, const FullState& op_point, const VectorXd& tau0,
                       const ContactSet& contacts, const FdSteps& steps) {
  const int n = model.n();
  const int nu = model.n_u();
  if (tau0.size() != nu) throw std::invalid_argument("tau0 has wrong length");

  if (!contacts.empty()) {
    const ContactKinematics kin = contact_kinematics(model, op_point.q, op_point.v, contacts);
    const double viol = (kin.jacobian * op_point.v).lpNorm<Eigen::Infinity>();
    if (viol >= 1e-8)
      throw InconsistentOperatingPointError(
          "operating point violates the contact constraint at velocity level (|J v| = " +
          std::to_string(viol) + ")");
  }

  auto qdd_of = [&](const VectorXd& q, const VectorXd& v, const VectorXd& u) {
    return constrained_forward_dynamics(model, q, v, tau0 + u, contacts).qdd;
  };

  MatrixXd A = MatrixXd::Zero(2 * n, 2 * n);
  MatrixXd B = MatrixXd::Zero(2 * n, nu);
  // Position derivative is velocity, exactly.
  A.topRightCorner(n, n).setIdentity();

  const VectorXd u0 = VectorXd::Zero(nu);
  for (int i = 0; i < 2 * n; ++i) {
    const double xi = i < n ? op_point.q[i] : op_point.v[i - n];
    const double h = steps.state_rel * std::max(1.0, std::abs(xi));
    VectorXd qp = op_point.q, qm = op_point.q, vp = op_point.v, vm = op_point.v;
    if (i < n) {
      qp[i] += h;
      qm[i] -= h;
    } else {
      vp[i - n] += h;
      vm[i - n] -= h;
    }
    A.block(n, i, n, 1) = (qdd_of(qp, vp, u0) - qdd_of(qm, vm, u0)) / (2.0 * h);
  }
  for (int j = 0; j < nu; ++j) {
    const double h = steps.torque;
    VectorXd up = u0, um = u0;
    up[j] += h;
    um[j] -= h;
    B.block(n, j, n, 1) = (qdd_of(op_point.q, op_point.v, up) - qdd_of(op_point.q, op_point.v, um)) / (2.0 * h);
  }

  return {std::move(A), std::move(B), {op_point, tau0, contacts}};
}

MatrixXd nullspace_basis(const MatrixXd& constraint, int cols) {
  if (constraint.rows() == 0) return MatrixXd::Identity(cols, cols);
  if (constraint.cols() != cols) throw std::invalid_argument("constraint matrix has wrong width");

  Eigen::JacobiSVD<MatrixXd> svd(constraint, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] >= kNullspaceRankTolerance * smax && sv[i] > 0.0) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

ReducedSystem reduce(const LinearSystem& sys, const MatrixXd& N, const MatrixXd& Q,
                     const MatrixXd& R) {
  const auto sym_err = [](const MatrixXd& M) {
    return (M - M.transpose()).lpNorm<Eigen::Infinity>();
  };
  const double qs = std::max(1.0, Q.lpNorm<Eigen::Infinity>());
  const double rs = std::max(1.0, R.lpNorm<Eigen::Infinity>());
  if (Q.rows() != Q.cols() || sym_err(Q) > 1e-10 * qs)
    throw std::invalid_argument("Q must be symmetric");
  if (R.rows() != R.cols() || sym_err(R) > 1e-10 * rs)
    throw std::invalid_argument("R must be symmetric");
  if (Q.rows() != sys.A.rows()) throw std::invalid_argument("Q has wrong dimension");
  if (R.rows() != sys.B.cols()) throw std::invalid_argument("R has wrong dimension");

  Eigen::SelfAdjointEigenSolver<MatrixXd> qe(Q, Eigen::EigenvaluesOnly);
  if (qe.eigenvalues().minCoeff() < -1e-10 * qs)
    throw std::invalid_argument("Q must be positive semidefinite");
  Eigen::LLT<MatrixXd> rllt(R);
  if (rllt.info() != Eigen::Success)
    throw std::invalid_argument("R must be positive definite");

  ReducedSystem red;
  red.N = N;
  red.A_m = N.transpose() * sys.A * N;
  red.B_m = N.transpose() * sys.B;
  red.Q_m = N.transpose() * Q * N;
  red.Q_m = 0.5 * (red.Q_m + red.Q_m.transpose()).eval();
  red.R_m = R;
  return red;
}

}  // namespace clqr
