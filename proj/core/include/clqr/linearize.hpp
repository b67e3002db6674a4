#pragma once

#include <Eigen/Core>

#include "clqr/contact.hpp"
#include "clqr/model.hpp"

namespace clqr {

/// Operating point of a linearization: a contact-consistent state with the
/// feedforward torque that holds it.
struct OperatingPoint {
  FullState state;
  VectorXd tau0;  // n_u
  ContactSet contacts;
};

/// LTI system  ẋ = Ax + Bu  around an operating point, x = (δq, δv).
/// Rows 1..n of A are exactly [0 I] and of B exactly 0.
struct LinearSystem {
  MatrixXd A;  // 2n x 2n
  MatrixXd B;  // 2n x n_u
  OperatingPoint op_point;
};

/// Minimal system obtained by projecting onto the constraint nullspace.
struct ReducedSystem {
  MatrixXd N;    // 2n x r, orthonormal columns spanning ker(constraint matrix)
  MatrixXd A_m;  // r x r
  MatrixXd B_m;  // r x n_u
  MatrixXd Q_m;  // r x r
  MatrixXd R_m;  // n_u x n_u
};

struct FdSteps {
  double state_rel = 1e-5;  // h = state_rel * max(1, |x_i|)
  double torque = 1e-4;
};

/// Central finite-difference linearization of the constrained dynamics
/// f(x, u) = (v, qdd(q, v, tau0 + u, contacts)). The operating point must
/// satisfy the contact constraint at velocity level (|J_c v|_inf < 1e-8);
/// violating points raise InconsistentOperatingPointError.
LinearSystem linearize(const RobotModel& model, const FullState& op_point, const VectorXd& tau0,
                       const ContactSet& contacts, const FdSteps& steps = {});

/// Orthonormal basis of the kernel of `constraint` via SVD. Rank counts
/// singular values >= 1e-10 * sigma_max. An empty constraint yields the
/// identity.
MatrixXd nullspace_basis(const MatrixXd& constraint, int cols);

/// Projects (A, B, Q, R) into the minimal system per
/// A_m = N^T A N, B_m = N^T B, Q_m = N^T Q N, R_m = R.
ReducedSystem reduce(const LinearSystem& sys, const MatrixXd& N, const MatrixXd& Q,
                     const MatrixXd& R);

inline constexpr double kNullspaceRankTolerance = 1e-10;

}  // namespace clqr
