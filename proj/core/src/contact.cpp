#include "clqr/contact.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <set>
#include <sstream>

#include "clqr/dynamics.hpp"
#include "clqr/errors.hpp"

namespace clqr {

ContactSet::ContactSet(const RobotModel& model, std::vector<ContactEntry> entries)
    : entries_(std::move(entries)) {
  std::set<std::pair<int, int>> seen;
  m_ = 0;
  for (const ContactEntry& e : entries_) {
    if (e.ee < 0 || e.ee >= static_cast<int>(model.endeffectors().size()))
      throw std::invalid_argument("contact entry references unknown endeffector id " +
                                  std::to_string(e.ee));
    const auto& avail = model.endeffectors()[e.ee].directions;
    for (Direction d : e.directions) {
      if (std::find(avail.begin(), avail.end(), d) == avail.end())
        throw std::invalid_argument("endeffector '" + model.endeffectors()[e.ee].name +
                                    "' does not expose the requested direction");
      if (!seen.insert({e.ee, static_cast<int>(d)}).second)
        throw std::invalid_argument("duplicate (endeffector, direction) pair in contact set");
      ++m_;
    }
  }
  if (m_ >= model.n())
    throw std::invalid_argument("contact set has m >= n (" + std::to_string(m_) + " rows)");
}

std::string ContactSet::row_name(const RobotModel& model, int r) const {
  int k = 0;
  for (const ContactEntry& e : entries_) {
    for (Direction d : e.directions) {
      if (k == r) {
        const char* dn = d == Direction::X ? "x" : (d == Direction::Z ? "z" : "pitch");
        return model.endeffectors()[e.ee].name + "." + dn;
      }
      ++k;
    }
  }
  return "row" + std::to_string(r);
}

ContactSet ContactSet::for_feet(const RobotModel& model, const std::vector<int>& foot_ids) {
  std::vector<ContactEntry> entries;
  for (int f : foot_ids) {
    const Foot& foot = model.feet().at(f);
    for (int ee : foot.contact_ees)
      entries.push_back({ee, model.endeffectors()[ee].directions});
  }
  return ContactSet(model, std::move(entries));
}

bool ContactSet::operator==(const ContactSet& other) const {
  if (m_ != other.m_ || entries_.size() != other.entries_.size()) return false;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].ee != other.entries_[i].ee) return false;
    if (entries_[i].directions != other.entries_[i].directions) return false;
  }
  return true;
}

ContactKinematics contact_kinematics(const RobotModel& model, const VectorXd& q, const VectorXd& v,
                                     const ContactSet& contacts) {
  ContactKinematics out;
  out.jacobian = MatrixXd::Zero(contacts.rows(), model.n());
  out.jdot_times_v = VectorXd::Zero(contacts.rows());
  out.values = VectorXd::Zero(contacts.rows());
  int r = 0;
  for (const ContactEntry& e : contacts.entries()) {
    const EeKinematics kin = endeffector_kinematics(model, q, v, e.ee);
    const auto& avail = model.endeffectors()[e.ee].directions;
    for (Direction d : e.directions) {
      const int src = static_cast<int>(std::find(avail.begin(), avail.end(), d) - avail.begin());
      out.jacobian.row(r) = kin.jacobian.row(src);
      out.jdot_times_v[r] = kin.jdot_times_v[src];
      out.values[r] = d == Direction::X   ? kin.pose.position.x()
                      : d == Direction::Z ? kin.pose.position.y()
                                          : kin.pose.pitch;
      ++r;
    }
  }
  return out;
}

MatrixXd constraint_matrix(const RobotModel& model, const VectorXd& q, const VectorXd& v,
                           const ContactSet& contacts) {
  const int n = model.n();
  const int m = contacts.rows();
  MatrixXd C = MatrixXd::Zero(2 * m, 2 * n);
  if (m == 0) return C;

  const ContactKinematics kin = contact_kinematics(model, q, v, contacts);
  C.topLeftCorner(m, n) = kin.jacobian;
  C.bottomRightCorner(m, n) = kin.jacobian;

  // J̇_c = sum_k dJ/dq_k * v_k, the coordinate derivatives taken by central
  // difference. Exactly zero at v = 0.
  MatrixXd Jdot = MatrixXd::Zero(m, n);
  const double h = 1e-6;
  for (int k = 0; k < n; ++k) {
    if (v[k] == 0.0) continue;
    VectorXd qp = q, qm = q;
    qp[k] += h;
    qm[k] -= h;
    const MatrixXd Jp = contact_kinematics(model, qp, v, contacts).jacobian;
    const MatrixXd Jm = contact_kinematics(model, qm, v, contacts).jacobian;
    Jdot += ((Jp - Jm) / (2.0 * h)) * v[k];
  }
  C.bottomLeftCorner(m, n) = Jdot;
  return C;
}

ConstrainedDynamicsResult constrained_forward_dynamics(const RobotModel& model, const VectorXd& q,
                                                       const VectorXd& v, const VectorXd& tau,
                                                       const ContactSet& contacts,
                                                       const VectorXd& generalized_ext) {
  const int n = model.n();
  if (tau.size() != model.n_u()) throw std::invalid_argument("tau has wrong length");
  if (generalized_ext.size() != 0 && generalized_ext.size() != n)
    throw std::invalid_argument("generalized_ext has wrong length");

  VectorXd b = model.selector().transpose() * tau - nonlinear_effects(model, q, v);
  if (generalized_ext.size() == n) b += generalized_ext;

  const MatrixXd M = mass_matrix(model, q);
  Eigen::LLT<MatrixXd> Mllt(M);
  if (Mllt.info() != Eigen::Success)
    throw std::runtime_error("mass matrix is not positive definite");

  ConstrainedDynamicsResult out;
  if (contacts.empty()) {
    out.qdd = Mllt.solve(b);
    out.f_c = VectorXd();
    return out;
  }

  const ContactKinematics kin = contact_kinematics(model, q, v, contacts);
  const MatrixXd& J = kin.jacobian;
  const int m = contacts.rows();

  // Schur complement on the force block: G f = J M^-1 b + J̇v.
  const MatrixXd MinvJt = Mllt.solve(J.transpose());
  const MatrixXd G = J * MinvJt;
  const VectorXd rhs = J * Mllt.solve(b) + kin.jdot_times_v;

  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(G);
  cod.setThreshold(kContactRankTolerance);
  // A second decomposition with the threshold applied; Eigen computes the rank
  // lazily, so re-run after setting it.
  cod.compute(G);
  const VectorXd f = cod.solve(rhs);

  if (cod.rank() < m) {
    // Redundant rows are fine as long as the right-hand side is consistent
    // (the default flat foot pins heel and toe of one rigid body and is
    // structurally rank deficient). Small velocity-drift inconsistency is
    // absorbed by the least-squares solve.
    const double scale = std::max(1.0, rhs.norm());
    if ((G * f - rhs).norm() > 1e-6 * scale) {
      // Name the dependent rows: the pivots rejected by the rank-revealing
      // factorization, mapped back through its column permutation.
      const auto& perm = cod.colsPermutation();
      std::ostringstream msg;
      msg << "contact constraint rows are rank deficient with an inconsistent "
             "right-hand side; dependent rows:";
      for (int i = cod.rank(); i < m; ++i) {
        msg << " " << contacts.row_name(model, perm.indices()[i]);
      }
      throw RankDeficiencyError(msg.str());
    }
  }

  out.qdd = Mllt.solve(b + J.transpose() * f);
  out.f_c = f;
  return out;
}

}  // namespace clqr
