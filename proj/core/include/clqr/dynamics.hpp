#pragma once

#include <Eigen/Core>

#include "clqr/model.hpp"

namespace clqr {

/// Joint-space inertia matrix M(q), computed with the composite-rigid-body
/// algorithm. Symmetric positive definite for any tree with positive masses.
MatrixXd mass_matrix(const RobotModel& model, const VectorXd& q);

/// Combined Coriolis/centrifugal and gravity term C(q,v)v + g(q), computed by
/// recursive Newton-Euler with zero joint acceleration. At v = 0 this is the
/// gravity vector.
VectorXd nonlinear_effects(const RobotModel& model, const VectorXd& q, const VectorXd& v);

/// Generalized force required to realize acceleration `a` at (q, v).
VectorXd inverse_dynamics(const RobotModel& model, const VectorXd& q, const VectorXd& v,
                          const VectorXd& a);

struct EePose {
  Vector2d position;
  double pitch;  // absolute frame angle, rad
};

struct EeKinematics {
  EePose pose;
  MatrixXd jacobian;   // rows = the endeffector's constrainable directions
  VectorXd jdot_times_v;  // dJ/dt * v for the same rows
  Vector2d velocity;   // linear velocity of the point
  double pitch_rate;
};

/// Pose, direction Jacobian and J̇v of one endeffector frame.
EeKinematics endeffector_kinematics(const RobotModel& model, const VectorXd& q,
                                    const VectorXd& v, int ee);
/// Position-only convenience overload (v = 0).
EeKinematics endeffector_kinematics(const RobotModel& model, const VectorXd& q, int ee);

/// Center of mass of the whole robot and its Jacobian (2 x n).
Vector2d center_of_mass(const RobotModel& model, const VectorXd& q);
MatrixXd com_jacobian(const RobotModel& model, const VectorXd& q);
Vector2d com_velocity(const RobotModel& model, const VectorXd& q, const VectorXd& v);

/// Total mechanical energy (kinetic + gravitational potential).
double total_energy(const RobotModel& model, const VectorXd& q, const VectorXd& v);

}  // namespace clqr
