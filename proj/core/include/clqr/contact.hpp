#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "clqr/model.hpp"

namespace clqr {

/// Set of constrained endeffector directions. Each entry pins a subset of one
/// endeffector's directions; rows stack in entry order.
struct ContactEntry {
  int ee = -1;
  std::vector<Direction> directions;
};

class ContactSet {
 public:
  ContactSet() = default;
  ContactSet(const RobotModel& model, std::vector<ContactEntry> entries);

  const std::vector<ContactEntry>& entries() const { return entries_; }
  int rows() const { return m_; }
  bool empty() const { return m_ == 0; }

  /// Human-readable label of constraint row r, e.g. "heel_l.z".
  std::string row_name(const RobotModel& model, int r) const;

  /// All constrainable directions of every contact endeffector of `foot_ids`
  /// (feet listed by model foot index).
  static ContactSet for_feet(const RobotModel& model, const std::vector<int>& foot_ids);

  bool operator==(const ContactSet& other) const;

 private:
  std::vector<ContactEntry> entries_;
  int m_ = 0;
};

/// Stacked contact Jacobian J_c (rows x n) with its J̇v product and current
/// endeffector direction values.
struct ContactKinematics {
  MatrixXd jacobian;      // m x n
  VectorXd jdot_times_v;  // m
  VectorXd values;        // current position/angle of each constrained direction
};

ContactKinematics contact_kinematics(const RobotModel& model, const VectorXd& q, const VectorXd& v,
                                     const ContactSet& contacts);

/// Block matrix [[J_c, 0], [J̇_c, J_c]] (2m x 2n) enforcing zero velocity and
/// zero acceleration of the constrained directions.
MatrixXd constraint_matrix(const RobotModel& model, const VectorXd& q, const VectorXd& v,
                           const ContactSet& contacts);

struct ConstrainedDynamicsResult {
  VectorXd qdd;  // n
  VectorXd f_c;  // contact forces, one per constraint row
};

/// Forward dynamics subject to the contact constraints: solves
///   [[M, -J^T], [J, 0]] [qdd; f] = [S^T tau - nle; -J̇v]
/// through the Schur complement on the contact block. Redundant-but-consistent
/// constraint sets (e.g. a rigid flat foot pinned at heel and toe) are solved
/// with minimum-norm contact forces; an inconsistent rank-deficient system
/// raises RankDeficiencyError naming the offending rows.
ConstrainedDynamicsResult constrained_forward_dynamics(const RobotModel& model, const VectorXd& q,
                                                       const VectorXd& v, const VectorXd& tau,
                                                       const ContactSet& contacts,
                                                       const VectorXd& generalized_ext = VectorXd());

/// Pivot threshold (relative to the largest pivot) below which constraint
/// directions are treated as dependent.
inline constexpr double kContactRankTolerance = 1e-10;

}  // namespace clqr
