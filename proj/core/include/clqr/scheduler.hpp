#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "clqr/contact.hpp"
#include "clqr/controller.hpp"
#include "clqr/model.hpp"

namespace clqr {

/// Per-foot contact estimate with hysteresis state.
struct ContactEstimate {
  std::array<bool, 2> in_contact{false, false};
  std::array<double, 2> normal_force{0.0, 0.0};
};

struct ContactEstimatorConfig {
  double f_on = 0.0;   // N; force above which a foot may become in contact
  double f_off = 0.0;  // N; force below which a foot may become free
  double window_s = 0.3;
};

/// Plan window flags, per foot: whether the plan expects contact (swing)
/// anywhere within +-window_s of now.
struct PlanWindow {
  std::array<bool, 2> contact_possible{true, true};
  std::array<bool, 2> swing_possible{false, false};
};

/// One estimator update: a foot becomes in-contact when its measured normal
/// force exceeds f_on AND the plan expects contact within the window; it
/// becomes free when the force drops below f_off AND the plan expects swing
/// within the window. f_on > f_off gives hysteresis.
ContactEstimate estimate_contact(const std::array<double, 2>& measured_normal,
                                 const PlanWindow& window, const ContactEstimatorConfig& cfg,
                                 const ContactEstimate& prev);

/// Keyframe controllers plus the diagonal joint-space PD fallback used while
/// blending across contact switches.
struct KeyframeLibrary {
  std::vector<LqrController> controllers;
  MatrixXd pd_fallback;  // n_u x 2n, zeros outside the two joint diagonals

  static MatrixXd pd_gain_matrix(const RobotModel& model, double kp, double kd);
};

/// Among controllers whose contact set matches the estimated feet-in-contact
/// set, returns the index minimizing |q_joints - q0_joints|_2; ties go to the
/// lower library index. Throws NoMatchingKeyframeError when nothing matches.
int select_controller(const RobotModel& model, const KeyframeLibrary& lib,
                      const std::array<bool, 2>& feet_in_contact, const VectorXd& q);

/// Piecewise-linear gain blend through the PD fallback:
/// [0, t_half]: K_prev -> K_pd, [t_half, 2 t_half]: K_pd -> K_next.
/// `done` once t >= 2 t_half. Feedforward/setpoint ownership switches to the
/// next controller at t_half (reported via `use_next`).
struct BlendResult {
  MatrixXd K;
  bool done;
  bool use_next;
};
BlendResult blend_gains(const MatrixXd& K_prev, const MatrixXd& K_next, const MatrixXd& K_pd,
                        double t_since_switch, double t_half);

double gain_distance(const MatrixXd& K_a, const MatrixXd& K_b);

/// Control-loop gain scheduling state machine: tracks the active keyframe,
/// starts a PD blend whenever the matched contact set changes, and swaps
/// directly between same-contact keyframes.
class GainScheduler {
 public:
  GainScheduler(const RobotModel& model, KeyframeLibrary lib, double t_half);

  struct Active {
    MatrixXd K;
    int controller = -1;   // active keyframe id
    bool blending = false;
    bool fallback = false; // no keyframe matched; PD fallback engaged
  };

  /// One control tick. `t` is the loop time used for the blend clock.
  Active update(const std::array<bool, 2>& feet_in_contact, const VectorXd& q, double t);

  const KeyframeLibrary& library() const { return lib_; }
  int switch_count() const { return switch_count_; }

 private:
  const RobotModel& model_;
  KeyframeLibrary lib_;
  double t_half_;
  int active_ = -1;
  int blend_target_ = -1;
  double blend_start_ = 0.0;
  bool blending_ = false;
  MatrixXd blend_from_;
  int switch_count_ = 0;
};

}  // namespace clqr
