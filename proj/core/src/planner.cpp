#include "clqr/planner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "clqr/dynamics.hpp"
#include "clqr/errors.hpp"
#include "clqr/ik.hpp"

namespace clqr {

ForceDistribution distribute_contact_forces(const RobotModel& model, const VectorXd& q,
                                            const ContactSet& contacts,
                                            const std::map<int, double>& split) {
  const int n = model.n();
  const int m = contacts.rows();
  if (m == 0) throw std::invalid_argument("distribute_contact_forces: empty contact set");

  double sum = 0.0;
  for (const auto& [foot, s] : split) {
    if (foot < 0 || foot >= static_cast<int>(model.feet().size()))
      throw std::invalid_argument("distribute_contact_forces: unknown foot id");
    if (s < 0.0) throw std::invalid_argument("distribute_contact_forces: negative split");
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("distribute_contact_forces: split fractions must sum to 1");

  // Map each constraint row to (foot, vertical?) for the split bookkeeping.
  std::vector<int> row_foot(m, -1);
  std::vector<bool> row_vertical(m, false);
  {
    int r = 0;
    for (const ContactEntry& e : contacts.entries()) {
      int foot_of_ee = -1;
      for (size_t f = 0; f < model.feet().size(); ++f) {
        const auto& ces = model.feet()[f].contact_ees;
        if (std::find(ces.begin(), ces.end(), e.ee) != ces.end()) foot_of_ee = static_cast<int>(f);
      }
      for (Direction d : e.directions) {
        row_foot[r] = foot_of_ee;
        row_vertical[r] = (d == Direction::Z);
        ++r;
      }
    }
  }

  std::vector<int> vertical_count(model.feet().size(), 0);
  for (int r = 0; r < m; ++r)
    if (row_foot[r] >= 0 && row_vertical[r]) ++vertical_count[row_foot[r]];
  for (const auto& [foot, s] : split)
    if (s > 0.0 && vertical_count[foot] == 0)
      throw std::invalid_argument("distribute_contact_forces: foot '" + model.feet()[foot].name +
                                  "' has a positive split but no active vertical contact");

  const VectorXd nle = nonlinear_effects(model, q, VectorXd::Zero(n));
  const ContactKinematics kin = contact_kinematics(model, q, VectorXd::Zero(n), contacts);
  const double weight = model.total_mass() * model.gravity();

  // Equality constraints: the unactuated rows of S^T tau + J^T f = nle (torque
  // cannot reach them), plus one vertical-sum row per split foot.
  std::vector<int> unactuated;
  {
    std::vector<bool> actuated(n, false);
    for (int c : model.actuated_coords()) actuated[c] = true;
    for (int i = 0; i < n; ++i)
      if (!actuated[i]) unactuated.push_back(i);
  }
  const int n_eq = static_cast<int>(unactuated.size() + split.size());
  MatrixXd A = MatrixXd::Zero(n_eq, m);
  VectorXd b = VectorXd::Zero(n_eq);
  int row = 0;
  for (int i : unactuated) {
    A.row(row) = kin.jacobian.col(i).transpose();
    b[row] = nle[i];
    ++row;
  }
  for (const auto& [foot, s] : split) {
    for (int r = 0; r < m; ++r)
      if (row_foot[r] == foot && row_vertical[r]) A(row, r) = 1.0;
    b[row] = s * weight;
    ++row;
  }

  // Target: even vertical spread per split foot, zero tangential forces.
  VectorXd f_tgt = VectorXd::Zero(m);
  for (int r = 0; r < m; ++r) {
    if (row_foot[r] < 0 || !row_vertical[r]) continue;
    auto it = split.find(row_foot[r]);
    if (it != split.end()) f_tgt[r] = it->second * weight / vertical_count[row_foot[r]];
  }

  // min |f - f_tgt| s.t. A f = b.
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(A);
  const VectorXd f = f_tgt + cod.solve(b - A * f_tgt);
  if ((A * f - b).lpNorm<Eigen::Infinity>() > 1e-8 * std::max(1.0, b.lpNorm<Eigen::Infinity>()))
    throw std::invalid_argument(
        "distribute_contact_forces: requested split is statically infeasible at this pose");

  ForceDistribution out;
  out.f_c = f;
  out.tau_ff = model.selector() * (nle - kin.jacobian.transpose() * f);
  return out;
}

int Plan::index(double t) const {
  const int i = static_cast<int>(std::llround(t / dt));
  return std::clamp(i, 0, length() - 1);
}

FullState Plan::reference_state(const RobotModel& model, double t) const {
  const int i = index(t);
  FullState s;
  s.q = q_ref.row(i).transpose();
  s.v = v_ref.row(i).transpose();
  (void)model;
  return s;
}

VectorXd Plan::feedforward(double t) const { return tau_ff.row(index(t)).transpose(); }

std::array<bool, 2> Plan::planned_contact(double t) const { return contact_schedule[index(t)]; }

std::array<bool, 2> Plan::contact_possible(double t, double window) const {
  const int lo = index(t - window), hi = index(t + window);
  std::array<bool, 2> out{false, false};
  for (int i = lo; i <= hi; ++i)
    for (int f = 0; f < 2; ++f) out[f] = out[f] || contact_schedule[i][f];
  return out;
}

std::array<bool, 2> Plan::swing_possible(double t, double window) const {
  const int lo = index(t - window), hi = index(t + window);
  std::array<bool, 2> out{false, false};
  for (int i = lo; i <= hi; ++i)
    for (int f = 0; f < 2; ++f) out[f] = out[f] || !contact_schedule[i][f];
  return out;
}

namespace {

// Quintic between (p0, v0, a0) and (p1, v1, a1) over [0, T].
struct Quintic {
  double c[6];
  Quintic(double T, double p0, double v0, double a0, double p1, double v1, double a1) {
    c[0] = p0;
    c[1] = v0;
    c[2] = a0 / 2.0;
    const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
    const double d = p1 - p0 - v0 * T - a0 * T2 / 2.0;
    const double dv = v1 - v0 - a0 * T;
    const double da = a1 - a0;
    c[3] = (20.0 * d - 8.0 * dv * T + da * T2) / (2.0 * T3);
    c[4] = (-30.0 * d + 14.0 * dv * T - 2.0 * da * T2) / (2.0 * T4);
    c[5] = (12.0 * d - 6.0 * dv * T + da * T2) / (2.0 * T5);
  }
  double pos(double t) const {
    return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
  }
  double vel(double t) const {
    return c[1] + t * (2 * c[2] + t * (3 * c[3] + t * (4 * c[4] + t * 5 * c[5])));
  }
};

double cosine_ramp(double s) {  // 0 -> 1 with zero end slopes
  s = std::clamp(s, 0.0, 1.0);
  return 0.5 * (1.0 - std::cos(M_PI * s));
}

struct PhasedSeries {
  VectorXd zmp;
  std::vector<std::array<bool, 2>> schedule;
  MatrixXd foot[2];  // x, z, xd, zd
  std::vector<std::pair<int, double>> footsteps;
};

}  // namespace

Plan build_walk_plan(const RobotModel& model, const StepParams& params, int n_steps, double dt,
                     const PreviewWeights& preview) {
  if (params.ssp <= 0.0 || params.dsp <= 0.0)
    throw std::invalid_argument("build_walk_plan: SSP and DSP must be positive");
  if (model.feet().size() != 2) throw std::invalid_argument("build_walk_plan: biped expected");
  if (n_steps < 0) throw std::invalid_argument("build_walk_plan: negative step count");

  // Nominal stance: feet at their shipped placement, CoM over the center.
  const Vector2d foot0 = model.nominal.left_foot;
  const Vector2d foot1 = model.nominal.right_foot;
  const double com_z = center_of_mass(model, model.nominal.q).y();
  const double center = 0.5 * (foot0.x() + foot1.x());

  IkTargets nominal_targets;
  nominal_targets.com = {center, com_z};
  nominal_targets.feet = {{model.feet()[0].frame_ee, foot0, 0.0},
                          {model.feet()[1].frame_ee, foot1, 0.0}};
  const IkResult nominal_ik = inverse_kinematics(model, nominal_targets, model.nominal.q);

  // ---- timeline ----------------------------------------------------------
  const bool stepping = params.mode == GaitMode::Walk || params.mode == GaitMode::WalkInPlace;
  double duration = params.lead_in + params.lead_out;
  if (params.mode == GaitMode::SideToSide)
    duration += n_steps * (params.ssp + params.dsp) + params.dsp;
  else if (stepping)
    duration += n_steps * (params.ssp + params.dsp) + params.dsp;
  const int T = std::max(1, static_cast<int>(std::llround(duration / dt)));

  PhasedSeries ph;
  ph.zmp = VectorXd::Constant(T, center);
  ph.schedule.assign(T, {true, true});
  for (int f = 0; f < 2; ++f) {
    ph.foot[f] = MatrixXd::Zero(T, 4);
    ph.foot[f].col(0).setConstant(f == 0 ? foot0.x() : foot1.x());
    ph.foot[f].col(1).setConstant(f == 0 ? foot0.y() : foot1.y());
  }

  // Foot center x used as the ZMP dwell target (feet track their own x).
  std::array<double, 2> foot_x{foot0.x(), foot1.x()};
  const std::array<double, 2> foot_z{foot0.y(), foot1.y()};

  auto fill_zmp_segment = [&](double t0, double t1, double z0, double z1, bool ramp) {
    const int i0 = std::clamp(static_cast<int>(std::llround(t0 / dt)), 0, T);
    const int i1 = std::clamp(static_cast<int>(std::llround(t1 / dt)), 0, T);
    for (int i = i0; i < i1; ++i) {
      const double s = (i - i0) / std::max(1.0, static_cast<double>(i1 - i0));
      ph.zmp[i] = ramp ? z0 + (z1 - z0) * cosine_ramp(s) : z1;
    }
  };
  auto fill_zmp_tail = [&](double t0, double value) {
    const int i0 = std::clamp(static_cast<int>(std::llround(t0 / dt)), 0, T);
    for (int i = i0; i < T; ++i) ph.zmp[i] = value;
  };

  if (params.mode == GaitMode::Stand || n_steps == 0) {
    // Quiet double support throughout.
  } else if (params.mode == GaitMode::SideToSide) {
    double t = params.lead_in;
    double zmp_now = center;
    int dwell_foot = 0;
    for (int k = 0; k < n_steps; ++k) {
      fill_zmp_segment(t, t + params.dsp, zmp_now, foot_x[dwell_foot], true);
      zmp_now = foot_x[dwell_foot];
      t += params.dsp;
      fill_zmp_segment(t, t + params.ssp, zmp_now, zmp_now, false);
      t += params.ssp;
      dwell_foot = 1 - dwell_foot;
    }
    fill_zmp_segment(t, t + params.dsp, zmp_now, center, true);
    fill_zmp_tail(t + params.dsp, center);
  } else {
    // Walking (in place or forward): DSP shifts the ZMP onto the stance foot,
    // SSP dwells there while the other foot swings.
    double t = params.lead_in;
    double zmp_now = center;
    int swing = 0;  // left swings first
    for (int k = 0; k < n_steps; ++k) {
      const int stance = 1 - swing;
      fill_zmp_segment(t, t + params.dsp, zmp_now, foot_x[stance], true);
      zmp_now = foot_x[stance];
      t += params.dsp;

      const double target_x =
          params.mode == GaitMode::Walk ? foot_x[stance] + params.step_length : foot_x[swing];
      const double start_x = foot_x[swing];
      const int i0 = std::clamp(static_cast<int>(std::llround(t / dt)), 0, T);
      const int i1 = std::clamp(static_cast<int>(std::llround((t + params.ssp) / dt)), 0, T);
      const double Tss = (i1 - i0) * dt;
      const Quintic qx(Tss, start_x, 0.0, 0.0, target_x, 0.0, 0.0);
      const Quintic qz_up(Tss / 2.0, foot_z[swing], 0.0, 0.0, foot_z[swing] + params.step_height,
                          0.0, 0.0);
      const Quintic qz_down(Tss / 2.0, foot_z[swing] + params.step_height, 0.0, 0.0, foot_z[swing],
                            -params.touchdown_speed, 0.0);
      for (int i = i0; i < i1; ++i) {
        const double ts = (i - i0) * dt;
        ph.schedule[i][swing] = false;
        ph.foot[swing](i, 0) = qx.pos(ts);
        ph.foot[swing](i, 2) = qx.vel(ts);
        if (ts < Tss / 2.0) {
          ph.foot[swing](i, 1) = qz_up.pos(ts);
          ph.foot[swing](i, 3) = qz_up.vel(ts);
        } else {
          ph.foot[swing](i, 1) = qz_down.pos(ts - Tss / 2.0);
          ph.foot[swing](i, 3) = qz_down.vel(ts - Tss / 2.0);
        }
      }
      foot_x[swing] = target_x;
      for (int i = i1; i < T; ++i) {
        ph.foot[swing](i, 0) = target_x;
        ph.foot[swing](i, 1) = foot_z[swing];
        ph.foot[swing](i, 2) = 0.0;
        ph.foot[swing](i, 3) = 0.0;
      }
      ph.footsteps.emplace_back(swing, target_x);
      t += params.ssp;
      swing = stance;
    }
    const double end_center = 0.5 * (foot_x[0] + foot_x[1]);
    fill_zmp_segment(t, t + params.dsp, zmp_now, end_center, true);
    fill_zmp_tail(t + params.dsp, end_center);
  }

  // ---- CoM preview --------------------------------------------------------
  Plan plan;
  plan.dt = dt;
  plan.step_params = params;
  plan.zmp_ref = ph.zmp;
  plan.com_height = com_z;
  plan.com_traj = zmp_preview_com(ph.zmp, com_z, dt, preview.horizon_s, preview, center);
  plan.contact_schedule = ph.schedule;
  plan.foot_traj[0] = ph.foot[0];
  plan.foot_traj[1] = ph.foot[1];
  plan.footsteps = ph.footsteps;

  // ---- support polygon check (5 mm margin) --------------------------------
  // Support interval from the active feet; contact points are the foot
  // endeffectors at their planned placement.
  const double margin = 0.005;
  auto support_of = [&](int i) -> std::pair<double, double> {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int f = 0; f < 2; ++f) {
      if (!ph.schedule[i][f]) continue;
      const Foot& foot = model.feet()[f];
      for (int ee : foot.contact_ees) {
        // Offset of the contact point from the ankle frame along x (feet stay
        // flat in all planned gaits).
        const double dx = model.endeffectors()[ee].offset.x() -
                          model.endeffectors()[foot.frame_ee].offset.x();
        const double px = ph.foot[f](i, 0) + dx;
        lo = std::min(lo, px);
        hi = std::max(hi, px);
      }
    }
    return {lo, hi};
  };
  for (int i = 0; i < T; ++i) {
    const auto [lo, hi] = support_of(i);
    if (ph.zmp[i] < lo + margin || ph.zmp[i] > hi - margin) {
      std::ostringstream msg;
      msg << "planned ZMP " << ph.zmp[i] << " at t=" << i * dt
          << " violates the support polygon [" << lo << ", " << hi << "] with 5 mm margin";
      throw std::invalid_argument(msg.str());
    }
  }

  // ---- joint-space references via IK --------------------------------------
  const int n = model.n();
  plan.q_ref = MatrixXd::Zero(T, n);
  VectorXd q_seed = nominal_ik.q;
  for (int i = 0; i < T; ++i) {
    IkTargets targets;
    targets.com = {plan.com_traj(i, 0), com_z};
    targets.feet = {{model.feet()[0].frame_ee, {ph.foot[0](i, 0), ph.foot[0](i, 1)}, 0.0},
                    {model.feet()[1].frame_ee, {ph.foot[1](i, 0), ph.foot[1](i, 1)}, 0.0}};
    const IkResult ik = inverse_kinematics(model, targets, q_seed);
    plan.q_ref.row(i) = ik.q.transpose();
    q_seed = ik.q;
  }
  plan.v_ref = MatrixXd::Zero(T, n);
  for (int i = 0; i < T; ++i) {
    const int a = std::max(0, i - 1), b = std::min(T - 1, i + 1);
    plan.v_ref.row(i) = (plan.q_ref.row(b) - plan.q_ref.row(a)) / ((b - a) * dt);
  }

  // Reference continuity guard (5 rad/s budget per joint).
  for (int i = 1; i < T; ++i) {
    const double dq = (plan.q_ref.row(i) - plan.q_ref.row(i - 1)).lpNorm<Eigen::Infinity>();
    if (dq > 5.0 * dt)
      throw std::invalid_argument("build_walk_plan: IK reference jumps by " + std::to_string(dq) +
                                  " at t=" + std::to_string(i * dt));
  }

  // ---- feedforward torques -------------------------------------------------
  plan.tau_ff = MatrixXd::Zero(T, model.n_u());
  for (int i = 0; i < T; ++i) {
    std::vector<int> feet_now;
    for (int f = 0; f < 2; ++f)
      if (ph.schedule[i][f]) feet_now.push_back(f);
    const ContactSet contacts = ContactSet::for_feet(model, feet_now);

    std::map<int, double> split;
    if (feet_now.size() == 1) {
      split[feet_now[0]] = 1.0;
    } else {
      // Weight shift follows the planned ZMP between the foot centers.
      const double x0 = ph.foot[0](i, 0), x1 = ph.foot[1](i, 0);
      double s1 = std::abs(x1 - x0) < 1e-9 ? 0.5 : (ph.zmp[i] - x0) / (x1 - x0);
      s1 = std::clamp(s1, 0.0, 1.0);
      split[0] = 1.0 - s1;
      split[1] = s1;
    }
    plan.tau_ff.row(i) =
        distribute_contact_forces(model, plan.q_ref.row(i).transpose(), contacts, split)
            .tau_ff.transpose();
  }

  return plan;
}

}  // namespace clqr
