#pragma once

#include <Eigen/Core>
#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "clqr/contact.hpp"
#include "clqr/model.hpp"

namespace clqr {

/// Static force distribution result.
struct ForceDistribution {
  VectorXd tau_ff;  // n_u
  VectorXd f_c;     // contact forces realizing the requested split
};

/// Feedforward torque for static equilibrium (qdd = 0 at v = 0) with the
/// vertical contact force of each foot pinned to split[foot] * total weight,
/// solved as an equality-constrained least squares over the contact forces.
/// Splits must be >= 0 and sum to 1; a positive split on a foot without
/// active contacts is invalid.
ForceDistribution distribute_contact_forces(const RobotModel& model, const VectorXd& q,
                                            const ContactSet& contacts,
                                            const std::map<int, double>& split);

enum class GaitMode { Stand, WalkInPlace, Walk, SideToSide };

struct StepParams {
  GaitMode mode = GaitMode::Stand;
  double ssp = 1.5;          // single support duration, s
  double dsp = 1.8;          // double support duration, s
  double step_length = 0.0;  // forward advance per step, m
  double step_height = 0.05; // swing apex, m
  double touchdown_speed = 0.05;  // downward speed at touchdown, m/s
  double lead_in = 2.0;      // quiet double support before the first step, s
  double lead_out = 2.0;     // quiet double support after the last step, s
};

struct PreviewWeights {
  double zmp_error = 1.0;
  double jerk = 1e-6;
  double horizon_s = 1.6;
};

/// Offline reference trajectories, all series sampled at dt.
struct Plan {
  double dt = 1e-3;
  VectorXd zmp_ref;                 // m
  MatrixXd com_traj;                // T x 3: CoM x position, velocity, acceleration
  double com_height = 0.0;          // constant model CoM height used by preview
  MatrixXd foot_traj[2];            // per foot, T x 4: x, z, xdot, zdot (ankle)
  MatrixXd q_ref, v_ref;            // T x n joint-space references
  MatrixXd tau_ff;                  // T x n_u
  std::vector<std::array<bool, 2>> contact_schedule;  // per-foot planned contact
  StepParams step_params;
  std::vector<std::pair<int, double>> footsteps;  // (foot, planned x) per touchdown

  int length() const { return static_cast<int>(zmp_ref.size()); }
  double duration() const { return length() * dt; }
  int index(double t) const;

  FullState reference_state(const RobotModel& model, double t) const;
  VectorXd feedforward(double t) const;
  std::array<bool, 2> planned_contact(double t) const;
  /// Plan lookup for contact estimation: whether contact (and swing) is
  /// expected for each foot anywhere within [t - window, t + window].
  std::array<bool, 2> contact_possible(double t, double window) const;
  std::array<bool, 2> swing_possible(double t, double window) const;
};

/// CoM trajectory for the cart-table model tracking zmp_ref by preview
/// control (discrete LQR with integral action plus preview gains over
/// `weights.horizon_s`). Returns T x 3 (position, velocity, acceleration).
MatrixXd zmp_preview_com(const VectorXd& zmp_ref, double z_com, double dt, double horizon_s,
                         const PreviewWeights& weights, double com0 = 0.0);

/// Footsteps + ZMP reference + CoM preview + swing splines + IK + force
/// distribution, per the configured gait mode. Throws if the planned ZMP ever
/// leaves the support polygon implied by the contact schedule (5 mm margin)
/// or if IK fails.
Plan build_walk_plan(const RobotModel& model, const StepParams& params, int n_steps, double dt,
                     const PreviewWeights& preview = {});

}  // namespace clqr
