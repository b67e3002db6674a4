#include "clqr/dynamics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace clqr {

namespace {

inline Vector2d perp(const Vector2d& p) { return {-p.y(), p.x()}; }
inline double cross2(const Vector2d& a, const Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }
inline Eigen::Matrix2d rot(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  return R;
}

// Per-link workspace for the world-frame kinematics passes. Positions use the
// (x, z) plane with z up; angles are counterclockwise, gravity acts along -z.
struct Kin {
  std::vector<double> phi, omega, alpha;
  std::vector<Vector2d> r, rdot, rddot;  // link frame origin
  std::vector<Vector2d> c, cdot, cddot;  // link center of mass
  std::vector<Vector2d> axis_world;      // prismatic axis direction (unit)
};

void check_q(const RobotModel& m, const VectorXd& q) {
  if (q.size() != m.n()) throw std::invalid_argument("q has wrong length");
  if (!q.allFinite()) throw std::invalid_argument("q has non-finite entries");
}

void check_qv(const RobotModel& m, const VectorXd& q, const VectorXd& v) {
  check_q(m, q);
  if (v.size() != m.n()) throw std::invalid_argument("v has wrong length");
  if (!v.allFinite()) throw std::invalid_argument("v has non-finite entries");
}

// Forward pass. `a` may be empty (positions/velocities only). When
// `gravity_offset` is true the root picks up the +g fictitious acceleration so
// gravity appears in the Newton-Euler force balance.
Kin forward_pass(const RobotModel& m, const VectorXd& q, const VectorXd* v, const VectorXd* a,
                 bool gravity_offset) {
  const auto& links = m.links();
  const size_t nl = links.size();
  Kin k;
  k.phi.resize(nl);
  k.r.resize(nl);
  k.c.resize(nl);
  k.axis_world.assign(nl, Vector2d::Zero());
  if (v) {
    k.omega.resize(nl);
    k.rdot.resize(nl);
    k.cdot.resize(nl);
  }
  if (a) {
    k.alpha.resize(nl);
    k.rddot.resize(nl);
    k.cddot.resize(nl);
  }
  const Vector2d g_off = gravity_offset ? Vector2d(0.0, m.gravity()) : Vector2d::Zero();

  for (size_t i = 0; i < nl; ++i) {
    const Link& l = links[i];
    const int ci = m.coord_start(static_cast<int>(i));
    if (l.parent < 0) {
      if (l.joint == JointType::FloatingBase) {
        k.phi[i] = q[ci + 2];
        k.r[i] = {q[ci], q[ci + 1]};
        if (v) {
          k.omega[i] = (*v)[ci + 2];
          k.rdot[i] = {(*v)[ci], (*v)[ci + 1]};
        }
        if (a) {
          k.alpha[i] = (*a)[ci + 2];
          k.rddot[i] = Vector2d((*a)[ci], (*a)[ci + 1]) + g_off;
        }
      } else if (l.joint == JointType::Revolute) {
        k.phi[i] = q[ci];
        k.r[i] = l.anchor;
        if (v) {
          k.omega[i] = (*v)[ci];
          k.rdot[i] = Vector2d::Zero();
        }
        if (a) {
          k.alpha[i] = (*a)[ci];
          k.rddot[i] = g_off;
        }
      } else {  // prismatic root
        k.phi[i] = 0.0;
        k.axis_world[i] = l.axis.normalized();
        k.r[i] = l.anchor + q[ci] * k.axis_world[i];
        if (v) {
          k.omega[i] = 0.0;
          k.rdot[i] = (*v)[ci] * k.axis_world[i];
        }
        if (a) {
          k.alpha[i] = 0.0;
          k.rddot[i] = (*a)[ci] * k.axis_world[i] + g_off;
        }
      }
    } else {
      const size_t p = static_cast<size_t>(l.parent);
      const Eigen::Matrix2d Rp = rot(k.phi[p]);
      if (l.joint == JointType::Revolute) {
        k.phi[i] = k.phi[p] + q[ci];
        k.r[i] = k.r[p] + Rp * l.anchor;
        const Vector2d d = k.r[i] - k.r[p];
        if (v) {
          k.omega[i] = k.omega[p] + (*v)[ci];
          k.rdot[i] = k.rdot[p] + k.omega[p] * perp(d);
        }
        if (a) {
          k.alpha[i] = k.alpha[p] + (*a)[ci];
          k.rddot[i] = k.rddot[p] + k.alpha[p] * perp(d) - k.omega[p] * k.omega[p] * d;
        }
      } else {  // prismatic
        k.phi[i] = k.phi[p];
        const Vector2d u = Rp * l.axis.normalized();
        k.axis_world[i] = u;
        k.r[i] = k.r[p] + Rp * l.anchor + q[ci] * u;
        const Vector2d d = k.r[i] - k.r[p];
        if (v) {
          k.omega[i] = k.omega[p];
          k.rdot[i] = k.rdot[p] + k.omega[p] * perp(d) + (*v)[ci] * u;
        }
        if (a) {
          k.alpha[i] = k.alpha[p];
          k.rddot[i] = k.rddot[p] + k.alpha[p] * perp(d) - k.omega[p] * k.omega[p] * d +
                       (*a)[ci] * u + 2.0 * k.omega[p] * (*v)[ci] * perp(u);
        }
      }
    }

    const Vector2d rc = rot(k.phi[i]) * l.com;
    k.c[i] = k.r[i] + rc;
    if (v) k.cdot[i] = k.rdot[i] + k.omega[i] * perp(rc);
    if (a) k.cddot[i] = k.rddot[i] + k.alpha[i] * perp(rc) - k.omega[i] * k.omega[i] * rc;
  }
  return k;
}

}  // namespace

VectorXd inverse_dynamics(const RobotModel& m, const VectorXd& q, const VectorXd& v,
                          const VectorXd& a) {
  check_qv(m, q, v);
  if (a.size() != m.n()) throw std::invalid_argument("a has wrong length");
  const Kin k = forward_pass(m, q, &v, &a, /*gravity_offset=*/true);

  // Backward Newton-Euler. f[i], n[i]: wrench transmitted from the parent to
  // link i through joint i (force applied at the link frame origin r[i]).
  const auto& links = m.links();
  const int nl = static_cast<int>(links.size());
  std::vector<Vector2d> f(nl);
  std::vector<double> nq(nl);
  for (int i = 0; i < nl; ++i) {
    f[i] = links[i].mass * k.cddot[i];
    nq[i] = links[i].inertia * k.alpha[i];
  }
  VectorXd tau = VectorXd::Zero(m.n());
  for (int i = nl - 1; i >= 0; --i) {
    const Link& l = links[i];
    // Moment balance about the link com, then shift the couple to r[i].
    nq[i] -= cross2(k.r[i] - k.c[i], f[i]);
    const int ci = m.coord_start(i);
    if (l.joint == JointType::FloatingBase) {
      tau[ci] = f[i].x();
      tau[ci + 1] = f[i].y();
      tau[ci + 2] = nq[i];
    } else if (l.joint == JointType::Revolute) {
      tau[ci] = nq[i];
    } else {
      tau[ci] = f[i].dot(k.axis_world[i]);
    }
    if (l.parent >= 0) {
      const int p = l.parent;
      f[p] += f[i];
      // f[i] acts at r[i]; express its moment about the parent com, where the
      // parent's own balance will be taken.
      nq[p] += nq[i] + cross2(k.r[i] - k.c[p], f[i]);
    }
  }
  return tau;
}

VectorXd nonlinear_effects(const RobotModel& m, const VectorXd& q, const VectorXd& v) {
  return inverse_dynamics(m, q, v, VectorXd::Zero(m.n()));
}

MatrixXd mass_matrix(const RobotModel& m, const VectorXd& q) {
  check_q(m, q);
  const Kin k = forward_pass(m, q, nullptr, nullptr, false);
  const auto& links = m.links();
  const int nl = static_cast<int>(links.size());
  const int n = m.n();

  // Composite inertia of each subtree, taken about the world origin:
  // mass, first moment h = m*c, and scalar inertia Io = Ic + m*|c|^2.
  std::vector<double> cm(nl), cIo(nl);
  std::vector<Vector2d> ch(nl);
  for (int i = 0; i < nl; ++i) {
    cm[i] = links[i].mass;
    ch[i] = links[i].mass * k.c[i];
    cIo[i] = links[i].inertia + links[i].mass * k.c[i].squaredNorm();
  }

  // Joint motion subspaces about the world origin, 3 rows: (omega, vx, vz).
  auto joint_subspace = [&](int i) -> Eigen::Matrix<double, 3, Eigen::Dynamic> {
    const Link& l = links[i];
    if (l.joint == JointType::FloatingBase) {
      Eigen::Matrix<double, 3, Eigen::Dynamic> S(3, 3);
      S.setZero();
      S(1, 0) = 1.0;                    // x translation
      S(2, 1) = 1.0;                    // z translation
      S(0, 2) = 1.0;                    // rotation about the base origin
      S.block<2, 1>(1, 2) = -perp(k.r[i]);
      return S;
    }
    Eigen::Matrix<double, 3, Eigen::Dynamic> S(3, 1);
    if (l.joint == JointType::Revolute) {
      S(0, 0) = 1.0;
      S.block<2, 1>(1, 0) = -perp(k.r[i]);
    } else {
      S(0, 0) = 0.0;
      S.block<2, 1>(1, 0) = k.axis_world[i];
    }
    return S;
  };

  MatrixXd M = MatrixXd::Zero(n, n);
  for (int i = nl - 1; i >= 0; --i) {
    // Spatial force produced by unit motion of joint i against the composite
    // inertia of subtree i: F = I_O * s.
    const auto Si = joint_subspace(i);
    const Vector2d ph = perp(ch[i]);
    auto apply_inertia = [&](const Eigen::Vector3d& s) -> Eigen::Vector3d {
      Eigen::Vector3d F;
      F[0] = cIo[i] * s[0] + ph.dot(s.tail<2>());
      F.tail<2>() = ph * s[0] + cm[i] * s.tail<2>();
      return F;
    };
    const int ci = m.coord_start(i);
    for (int a = 0; a < Si.cols(); ++a) {
      const Eigen::Vector3d F = apply_inertia(Si.col(a));
      // Diagonal block.
      for (int b = 0; b < Si.cols(); ++b) M(ci + b, ci + a) = Si.col(b).dot(F);
      // Ancestors.
      int j = links[i].parent;
      while (j >= 0) {
        const auto Sj = joint_subspace(j);
        const int cj = m.coord_start(j);
        for (int b = 0; b < Sj.cols(); ++b) {
          const double val = Sj.col(b).dot(F);
          M(cj + b, ci + a) = val;
          M(ci + a, cj + b) = val;
        }
        j = links[j].parent;
      }
    }
    if (links[i].parent >= 0) {
      const int p = links[i].parent;
      cm[p] += cm[i];
      ch[p] += ch[i];
      cIo[p] += cIo[i];
    }
  }
  return 0.5 * (M + M.transpose());
}

EeKinematics endeffector_kinematics(const RobotModel& m, const VectorXd& q, const VectorXd& v,
                                    int ee) {
  check_qv(m, q, v);
  if (ee < 0 || ee >= static_cast<int>(m.endeffectors().size()))
    throw std::invalid_argument("unknown endeffector id " + std::to_string(ee));
  const Endeffector& e = m.endeffectors()[ee];
  const VectorXd zero = VectorXd::Zero(m.n());
  // Acceleration pass with qdd = 0 and no gravity offset gives the bias
  // acceleration J̇v of any point directly.
  const Kin k = forward_pass(m, q, &v, &zero, /*gravity_offset=*/false);

  const int L = e.link;
  const Vector2d ro = rot(k.phi[L]) * e.offset;
  const Vector2d p = k.r[L] + ro;
  const Vector2d pdot = k.rdot[L] + k.omega[L] * perp(ro);
  const Vector2d pbias = k.rddot[L] + k.alpha[L] * perp(ro) - k.omega[L] * k.omega[L] * ro;

  const int rows = static_cast<int>(e.directions.size());
  MatrixXd J = MatrixXd::Zero(rows, m.n());
  VectorXd jdv = VectorXd::Zero(rows);

  // Columns: walk the chain from the endeffector link to the root.
  for (int j = L; j >= 0; j = m.links()[j].parent) {
    const Link& l = m.links()[j];
    const int cj = m.coord_start(j);
    for (int r = 0; r < rows; ++r) {
      const Direction d = e.directions[r];
      if (l.joint == JointType::FloatingBase) {
        if (d == Direction::X) {
          J(r, cj) = 1.0;
          J(r, cj + 2) = perp(p - k.r[j]).x();
        } else if (d == Direction::Z) {
          J(r, cj + 1) = 1.0;
          J(r, cj + 2) = perp(p - k.r[j]).y();
        } else {
          J(r, cj + 2) = 1.0;
        }
      } else if (l.joint == JointType::Revolute) {
        if (d == Direction::X)
          J(r, cj) = perp(p - k.r[j]).x();
        else if (d == Direction::Z)
          J(r, cj) = perp(p - k.r[j]).y();
        else
          J(r, cj) = 1.0;
      } else {  // prismatic
        if (d == Direction::X)
          J(r, cj) = k.axis_world[j].x();
        else if (d == Direction::Z)
          J(r, cj) = k.axis_world[j].y();
      }
    }
  }
  for (int r = 0; r < rows; ++r) {
    switch (e.directions[r]) {
      case Direction::X: jdv[r] = pbias.x(); break;
      case Direction::Z: jdv[r] = pbias.y(); break;
      case Direction::Pitch: jdv[r] = 0.0; break;  // planar: alpha is linear in qdd
    }
  }

  EeKinematics out;
  out.pose = {p, k.phi[L]};
  out.jacobian = std::move(J);
  out.jdot_times_v = std::move(jdv);
  out.velocity = pdot;
  out.pitch_rate = k.omega[L];
  return out;
}

EeKinematics endeffector_kinematics(const RobotModel& m, const VectorXd& q, int ee) {
  return endeffector_kinematics(m, q, VectorXd::Zero(m.n()), ee);
}

Vector2d center_of_mass(const RobotModel& m, const VectorXd& q) {
  check_q(m, q);
  const Kin k = forward_pass(m, q, nullptr, nullptr, false);
  Vector2d c = Vector2d::Zero();
  for (size_t i = 0; i < m.links().size(); ++i) c += m.links()[i].mass * k.c[i];
  return c / m.total_mass();
}

MatrixXd com_jacobian(const RobotModel& m, const VectorXd& q) {
  check_q(m, q);
  const Kin k = forward_pass(m, q, nullptr, nullptr, false);
  MatrixXd J = MatrixXd::Zero(2, m.n());
  const auto& links = m.links();
  for (size_t i = 0; i < links.size(); ++i) {
    // Contribution of link i's com to each ancestor joint column.
    for (int j = static_cast<int>(i); j >= 0; j = links[j].parent) {
      const Link& l = links[j];
      const int cj = m.coord_start(j);
      const double w = links[i].mass / m.total_mass();
      if (l.joint == JointType::FloatingBase) {
        J(0, cj) += w;
        J(1, cj + 1) += w;
        J.col(cj + 2).head<2>() += w * perp(k.c[i] - k.r[j]);
      } else if (l.joint == JointType::Revolute) {
        J.col(cj).head<2>() += w * perp(k.c[i] - k.r[j]);
      } else {
        J.col(cj).head<2>() += w * k.axis_world[j];
      }
    }
  }
  return J;
}

Vector2d com_velocity(const RobotModel& m, const VectorXd& q, const VectorXd& v) {
  check_qv(m, q, v);
  const Kin k = forward_pass(m, q, &v, nullptr, false);
  Vector2d cd = Vector2d::Zero();
  for (size_t i = 0; i < m.links().size(); ++i) cd += m.links()[i].mass * k.cdot[i];
  return cd / m.total_mass();
}

double total_energy(const RobotModel& m, const VectorXd& q, const VectorXd& v) {
  check_qv(m, q, v);
  const Kin k = forward_pass(m, q, &v, nullptr, false);
  double E = 0.0;
  for (size_t i = 0; i < m.links().size(); ++i) {
    const Link& l = m.links()[i];
    E += 0.5 * (l.mass * k.cdot[i].squaredNorm() + l.inertia * k.omega[i] * k.omega[i]);
    E += l.mass * m.gravity() * k.c[i].y();
  }
  return E;
}

}  // namespace clqr
