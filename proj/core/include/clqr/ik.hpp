#pragma once

#include <Eigen/Core>
#include <optional>

#include "clqr/model.hpp"

namespace clqr {

/// Task targets for whole-body inverse kinematics: CoM position plus the pose
/// (x, z, pitch) of each foot frame endeffector.
struct IkTargets {
  Vector2d com;
  struct FootTarget {
    int frame_ee;
    Vector2d position;
    double pitch = 0.0;
  };
  std::vector<FootTarget> feet;
};

struct IkOptions {
  double tolerance = 1e-6;     // task residual stop, m
  double failure_residual = 1e-3;
  int max_iterations = 200;
  double damping = 1e-3;
};

struct IkResult {
  VectorXd q;
  double residual;
  int iterations;
};

/// Damped least-squares IK from q_seed. Throws UnreachableTargetError when the
/// residual stays above options.failure_residual after max_iterations.
IkResult inverse_kinematics(const RobotModel& model, const IkTargets& targets,
                            const VectorXd& q_seed, const IkOptions& options = {});

}  // namespace clqr
