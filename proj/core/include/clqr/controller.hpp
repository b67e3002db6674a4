#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "clqr/contact.hpp"
#include "clqr/linearize.hpp"
#include "clqr/model.hpp"

namespace clqr {

/// One keyframe LQR controller: linearization state, feedforward torque and
/// the full-space gain K = K_m N^T mapped back from the minimal system.
struct LqrController {
  FullState x0;     // linearization state
  VectorXd tau0;    // feedforward, n_u
  MatrixXd K;       // n_u x 2n full-space gain
  ContactSet contacts;
  std::string label;
  MatrixXd P_m;     // Riccati solution on the minimal system, kept for diagnostics
  MatrixXd N;       // nullspace basis used at synthesis (diagnostics)
};

/// LQR weights in the full state space: Q = diag(q_pos I_n, q_vel I_n),
/// R = r I_{n_u}. The paper's robot weights are unpublished; these defaults
/// are tuned once on the default biped.
struct LqrWeights {
  double q_pos = 100.0;
  double q_vel = 1.0;
  double r = 0.01;

  MatrixXd Q(int n) const;
  MatrixXd R(int n_u) const;
};

/// Full pipeline for one key pose: feedforward from static force
/// distribution, contact-consistent linearization, nullspace reduction, CARE
/// solve, and gain back-mapping.
LqrController synthesize(const RobotModel& model, const FullState& pose, const ContactSet& contacts,
                         const MatrixXd& Q, const MatrixXd& R, const std::string& label);

/// tau = tau0 - K (x - x0), with the base pitch deviation wrapped.
VectorXd control(const RobotModel& model, const LqrController& ctrl, const FullState& x);

enum class Stance { Double, Left, Right };

/// Declarative key pose: stance feet at their nominal placement, CoM above
/// com_x (default: support center) shifted by com_shift, zero velocity.
struct KeyframePoseSpec {
  std::string label;
  Stance stance = Stance::Double;
  std::optional<double> com_x;
  double com_shift = 0.0;
};

struct KeyframeSpec {
  LqrWeights weights;
  std::vector<KeyframePoseSpec> poses;
};

/// Contact set of every contact point of the stance feet.
ContactSet stance_contacts(const RobotModel& model, Stance stance);

/// Resolves a pose spec into a full configuration by inverse kinematics from
/// the model's nominal stance.
FullState build_keyframe_pose(const RobotModel& model, const KeyframePoseSpec& spec);

/// Synthesizes one controller per pose spec.
std::vector<LqrController> synthesize_library(const RobotModel& model, const KeyframeSpec& spec);

/// Keyframe library serialization (documented JSON schema, gains row-major).
struct KeyframeLibraryFile {
  std::vector<LqrController> controllers;
};
void save_keyframes(const RobotModel& model, const std::vector<LqrController>& controllers,
                    const std::string& path);
std::vector<LqrController> load_keyframes(const RobotModel& model, const std::string& path);

}  // namespace clqr
