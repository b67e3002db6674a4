#include "clqr/ik.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "clqr/dynamics.hpp"
#include "clqr/errors.hpp"

namespace clqr {

namespace {

// Stacked task residual and Jacobian: CoM (x, z) then each foot (x, z, pitch).
void task_residual(const RobotModel& model, const IkTargets& targets, const VectorXd& q,
                   VectorXd& r, MatrixXd& J) {
  const int rows = 2 + 3 * static_cast<int>(targets.feet.size());
  r.resize(rows);
  J.resize(rows, model.n());
  r.head<2>() = targets.com - center_of_mass(model, q);
  J.topRows<2>() = com_jacobian(model, q);
  int row = 2;
  for (const auto& ft : targets.feet) {
    const EeKinematics kin = endeffector_kinematics(model, q, ft.frame_ee);
    r.segment<2>(row) = ft.position - kin.pose.position;
    r[row + 2] = std::remainder(ft.pitch - kin.pose.pitch, 2.0 * M_PI);
    // Frame endeffectors expose (x, z, pitch) in that order.
    J.middleRows(row, 3) = kin.jacobian;
    row += 3;
  }
}

}  // namespace

IkResult inverse_kinematics(const RobotModel& model, const IkTargets& targets,
                            const VectorXd& q_seed, const IkOptions& options) {
  if (q_seed.size() != model.n()) throw std::invalid_argument("q_seed has wrong length");
  for (const auto& ft : targets.feet) {
    const auto& dirs = model.endeffectors().at(ft.frame_ee).directions;
    if (dirs.size() != 3 || dirs[0] != Direction::X || dirs[1] != Direction::Z ||
        dirs[2] != Direction::Pitch)
      throw std::invalid_argument("IK foot target endeffector must expose (x, z, pitch)");
  }

  VectorXd q = q_seed;
  VectorXd r;
  MatrixXd J;
  int it = 0;
  double res = std::numeric_limits<double>::infinity();
  for (; it < options.max_iterations; ++it) {
    task_residual(model, targets, q, r, J);
    res = r.lpNorm<Eigen::Infinity>();
    if (res < options.tolerance) break;
    // Damped least squares step.
    const MatrixXd JJt = J * J.transpose() +
                         options.damping * options.damping *
                             MatrixXd::Identity(r.size(), r.size());
    q += J.transpose() * JJt.ldlt().solve(r);
  }
  if (res > options.failure_residual)
    throw UnreachableTargetError(
        "inverse kinematics could not reach the target (residual " + std::to_string(res) + " m)",
        res);
  return {q, res, it};
}

}  // namespace clqr
