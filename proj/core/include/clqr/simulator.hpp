#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clqr/contact.hpp"
#include "clqr/controller.hpp"
#include "clqr/model.hpp"
#include "clqr/planner.hpp"
#include "clqr/scheduler.hpp"

namespace clqr {

/// Rectangular force pulse applied to a link frame origin.
struct ImpulseDisturbance {
  double time = 0.0;       // s
  std::string body;        // link name
  Vector2d direction = Vector2d::UnitX();
  double impulse = 0.0;    // N s
  double duration = 0.1;   // s
};

/// Prescribed sinusoidal motion of one (extra, unmodeled) joint, tracked in
/// simulation by a local stiff PD. Stand-in for the paper's 10 kg torso mass
/// moved through sinusoids, unknown to the balance controller.
struct TorsoSineDisturbance {
  std::string joint;       // link name in the simulation model
  double amplitude = 0.1;  // rad
  double frequency = 0.2;  // Hz
  double kp = 4000.0;
  double kd = 200.0;
};

struct SensorNoise {
  double velocity = 0.01;  // rad/s (or m/s) std dev on every velocity channel
  double force = 1.0;      // N std dev on per-foot normal force
};

struct ContactThresholds {
  double f_on_fraction = 0.05;   // of robot weight
  double f_off_fraction = 0.02;
  double window_s = 0.3;
};

struct Scenario {
  std::string name;
  std::string model_file;              // control model (JSON)
  std::string sim_model_file;          // optional extended simulation model
  std::optional<KeyframeSpec> keyframes;
  std::string keyframes_file;          // alternatively, a synthesized library
  StepParams gait;
  int n_steps = 0;
  PreviewWeights preview;
  std::vector<ImpulseDisturbance> impulses;
  std::optional<TorsoSineDisturbance> torso_sine;
  SensorNoise noise;
  double filter_cutoff_hz = 40.0;
  double dt_sim = 1e-4;
  double dt_control = 1e-3;
  double duration = 10.0;
  std::uint64_t seed = 0;
  bool blending = true;
  double blend_t_half = 0.05;
  double pd_kp = 50.0;
  double pd_kd = 5.0;
  ContactThresholds contact;
  double fall_fraction = 0.5;  // of nominal CoM height
};

Scenario load_scenario(const std::string& path);

/// Currently active bilateral constraints with the values they pin.
struct ActiveContacts {
  ContactSet set;
  VectorXd anchors;  // one target value per constraint row
};

/// One semi-implicit physics step: qdd from the constrained dynamics,
/// v += qdd dt, q += v dt, then drift correction back onto the contact
/// manifold once position drift exceeds 1e-6.
struct StepResult {
  FullState state;
  VectorXd contact_forces;
};
StepResult step(const RobotModel& model, const FullState& state, const VectorXd& tau,
                const ActiveContacts& contacts, double dt_sim,
                const VectorXd& generalized_ext = VectorXd());

/// Touchdown/liftoff logic. A planned swing foot becomes a simulation contact
/// once its height reaches the ground with downward velocity (inelastic
/// impulse zeroes the constrained velocity); a foot leaves contact when its
/// planned flag has cleared AND its normal force is non-positive.
struct TransitionResult {
  FullState state;             // post-impulse state
  std::array<bool, 2> active_feet;
  ActiveContacts contacts;
  std::array<bool, 2> touched; // feet that activated this step
  bool changed = false;
};
TransitionResult contact_transition(const RobotModel& model, const FullState& state,
                                    const std::array<bool, 2>& plan_flags,
                                    const std::array<double, 2>& foot_normal_force,
                                    const std::array<bool, 2>& active_feet);

/// Simulation output time series, sampled at dt_control, plus event lists.
struct SwitchEvent {
  double time;
  int from, to;
  bool contact_change;
};
struct TouchdownEvent {
  double time;
  int foot;
  double x;
  double planned_x;
};

struct Trace {
  std::vector<std::string> columns;
  MatrixXd data;  // ticks x columns
  double dt = 1e-3;
  bool fall = false;
  double fall_time = -1.0;
  double nominal_com_height = 0.0;
  double robot_weight = 0.0;
  std::vector<SwitchEvent> switches;
  std::vector<TouchdownEvent> touchdowns;
  double applied_impulse = 0.0;  // integral of injected disturbance force

  int col(const std::string& name) const;
  int rows() const { return static_cast<int>(data.rows()); }
};

/// Runs the full control loop: filtered noisy measurements, contact
/// estimation, keyframe selection/blending, LQR feedback around the plan
/// reference plus plan feedforward, inner physics steps with disturbances.
/// Deterministic for a given seed. A fall (CoM below fall_fraction of
/// nominal) terminates the trace with the fall flag set.
Trace run_scenario(const Scenario& scenario);

struct Metrics {
  double rmse_com_x = 0.0;
  double rmse_com_z = 0.0;
  double peak_base_error = 0.0;
  bool fall = false;
  double fall_time = -1.0;
  double max_switch_jump = 0.0;   // max per-tick torque step inside switch windows
  std::vector<double> switch_jumps;
  double max_footstep_error = 0.0;
  int cop_violations = 0;         // ticks with CoP outside the active support polygon
  int estimator_mismatches = 0;   // estimated double support while a sim foot is >1cm up
  double applied_impulse = 0.0;
  double min_normal_force = 0.0;  // most negative held-contact normal force seen
};

Metrics metrics(const Trace& trace, const Plan& plan, double blend_t_half);

/// The plan actually used by run_scenario for a scenario (exposed so tools
/// and tests can compute metrics without re-deriving configuration).
Plan build_scenario_plan(const RobotModel& model, const Scenario& scenario);

}  // namespace clqr
