#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace clqr {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

enum class JointType { FloatingBase, Revolute, Prismatic };

/// One rigid body of the planar kinematic tree. The link frame sits at the
/// joint that connects it to its parent; `anchor` is that joint's position in
/// the parent frame. For the floating base the anchor is unused and the frame
/// pose is given directly by the first three generalized coordinates
/// (x, z, pitch).
struct Link {
  std::string name;
  int parent = -1;  // index into links; -1 for the root
  JointType joint = JointType::Revolute;
  Vector2d anchor = Vector2d::Zero();  // joint position in parent frame, m
  Vector2d axis = Vector2d::UnitX();   // prismatic direction in joint frame
  double mass = 0.0;                   // kg
  Vector2d com = Vector2d::Zero();     // center of mass in link frame, m
  double inertia = 0.0;                // rotational inertia about com, kg m^2
};

enum class Direction { X = 0, Z = 1, Pitch = 2 };

/// A frame of interest on a link (contact point, ankle frame, ...) with the
/// subset of directions that may be constrained or targeted.
struct Endeffector {
  std::string name;
  int link = 0;
  Vector2d offset = Vector2d::Zero();  // in link frame
  std::vector<Direction> directions;   // constrainable directions
};

/// Grouping of contact points under one foot, used by the planner, the
/// scheduler and the simulator. Purely metadata over the generic tree.
struct Foot {
  std::string name;
  std::vector<int> contact_ees;  // endeffector ids carrying ground contacts
  int frame_ee = -1;             // endeffector id of the foot (ankle) frame
};

/// Nominal stance shipped with a robot file: ankle targets and a reference
/// joint configuration used to seed inverse kinematics.
struct NominalStance {
  Vector2d left_foot = Vector2d::Zero();
  Vector2d right_foot = Vector2d::Zero();
  double base_height = 0.0;
  VectorXd q;  // full nominal configuration, length n (may be refined by IK)
};

/// Planar floating-base robot. Immutable after construction; all dynamics
/// operations are pure functions of (model, state).
class RobotModel {
 public:
  RobotModel(std::vector<Link> links, std::vector<Endeffector> endeffectors,
             std::vector<Foot> feet = {}, double gravity = 9.81,
             std::vector<std::string> unactuated_joints = {});

  const std::vector<Link>& links() const { return links_; }
  const std::vector<Endeffector>& endeffectors() const { return endeffectors_; }
  const std::vector<Foot>& feet() const { return feet_; }

  int n() const { return n_; }            // total DoF
  int n_base() const { return n_base_; }  // unactuated base coordinates (0 or 3)
  int n_u() const { return n_ - static_cast<int>(unactuated_.size()) - n_base_; }

  double gravity() const { return gravity_; }
  double total_mass() const { return total_mass_; }

  /// First generalized-coordinate index of link i's joint.
  int coord_start(int link) const { return coord_start_[link]; }
  int joint_dofs(int link) const { return links_[link].joint == JointType::FloatingBase ? 3 : 1; }

  /// Actuation selector S (n_u x n): each row picks one actuated coordinate.
  const MatrixXd& selector() const { return selector_; }
  /// Coordinate index of the k-th actuated joint.
  int actuated_coord(int k) const { return actuated_coords_[k]; }
  const std::vector<int>& actuated_coords() const { return actuated_coords_; }

  int endeffector_id(const std::string& name) const;
  int foot_id(const std::string& name) const;
  int link_id(const std::string& name) const;

  bool has_floating_base() const { return n_base_ == 3; }
  /// Index of the base pitch coordinate (valid only with a floating base).
  int pitch_coord() const { return 2; }

  std::string name;
  NominalStance nominal;

 private:
  std::vector<Link> links_;
  std::vector<Endeffector> endeffectors_;
  std::vector<Foot> feet_;
  std::vector<int> coord_start_;
  std::vector<int> actuated_coords_;
  std::vector<std::string> unactuated_;
  MatrixXd selector_;
  double gravity_;
  double total_mass_;
  int n_ = 0;
  int n_base_ = 0;
};

/// Full robot state: generalized coordinates and velocities.
struct FullState {
  VectorXd q;
  VectorXd v;

  static FullState Zero(int n) { return {VectorXd::Zero(n), VectorXd::Zero(n)}; }
  VectorXd stacked() const {
    VectorXd x(q.size() + v.size());
    x << q, v;
    return x;
  }
};

/// Deviation x - x0 with the base pitch component wrapped to (-pi, pi].
VectorXd state_deviation(const RobotModel& model, const FullState& x, const FullState& x0);

/// Loads a robot model from the documented JSON schema.
RobotModel load_model(const std::string& path);

}  // namespace clqr
