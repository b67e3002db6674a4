#include "clqr/scheduler.hpp"

#include <cmath>
#include <limits>

#include "clqr/errors.hpp"

namespace clqr {

ContactEstimate estimate_contact(const std::array<double, 2>& measured_normal,
                                 const PlanWindow& window, const ContactEstimatorConfig& cfg,
                                 const ContactEstimate& prev) {
  ContactEstimate out = prev;
  for (int f = 0; f < 2; ++f) {
    if (!std::isfinite(measured_normal[f]))
      throw std::invalid_argument("estimate_contact: non-finite force");
    out.normal_force[f] = measured_normal[f];
    if (!prev.in_contact[f]) {
      if (measured_normal[f] > cfg.f_on && window.contact_possible[f]) out.in_contact[f] = true;
    } else {
      if (measured_normal[f] < cfg.f_off && window.swing_possible[f]) out.in_contact[f] = false;
    }
  }
  return out;
}

MatrixXd KeyframeLibrary::pd_gain_matrix(const RobotModel& model, double kp, double kd) {
  const int n = model.n();
  const int nu = model.n_u();
  MatrixXd K = MatrixXd::Zero(nu, 2 * n);
  for (int k = 0; k < nu; ++k) {
    const int c = model.actuated_coord(k);
    K(k, c) = kp;
    K(k, n + c) = kd;
  }
  return K;
}

namespace {

std::array<bool, 2> feet_of_contacts(const RobotModel& model, const ContactSet& contacts) {
  std::array<bool, 2> feet{false, false};
  for (const ContactEntry& e : contacts.entries()) {
    for (size_t f = 0; f < model.feet().size() && f < 2; ++f) {
      const auto& ces = model.feet()[f].contact_ees;
      if (std::find(ces.begin(), ces.end(), e.ee) != ces.end()) feet[f] = true;
    }
  }
  return feet;
}

}  // namespace

int select_controller(const RobotModel& model, const KeyframeLibrary& lib,
                      const std::array<bool, 2>& feet_in_contact, const VectorXd& q) {
  if (lib.controllers.empty()) throw std::invalid_argument("empty keyframe library");
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < lib.controllers.size(); ++i) {
    const LqrController& c = lib.controllers[i];
    if (feet_of_contacts(model, c.contacts) != feet_in_contact) continue;
    double d2 = 0.0;
    for (int k : model.actuated_coords()) {
      const double e = q[k] - c.x0.q[k];
      d2 += e * e;
    }
    const double d = std::sqrt(d2);
    if (d < best_dist - 1e-15) {  // strict improvement; ties keep lower index
      best_dist = d;
      best = static_cast<int>(i);
    }
  }
  if (best < 0)
    throw NoMatchingKeyframeError("no keyframe matches contact state (left=" +
                                  std::to_string(feet_in_contact[0]) +
                                  ", right=" + std::to_string(feet_in_contact[1]) + ")");
  return best;
}

BlendResult blend_gains(const MatrixXd& K_prev, const MatrixXd& K_next, const MatrixXd& K_pd,
                        double t_since_switch, double t_half) {
  if (t_half <= 0.0) throw std::invalid_argument("blend_gains: t_half must be positive");
  BlendResult out;
  const double t = t_since_switch;
  if (t >= 2.0 * t_half) {
    out.K = K_next;
    out.done = true;
    out.use_next = true;
    return out;
  }
  out.done = false;
  if (t < t_half) {
    const double s = t / t_half;
    out.K = (1.0 - s) * K_prev + s * K_pd;
    out.use_next = false;
  } else {
    const double s = t / t_half - 1.0;
    out.K = (1.0 - s) * K_pd + s * K_next;
    out.use_next = true;
  }
  return out;
}

double gain_distance(const MatrixXd& K_a, const MatrixXd& K_b) {
  if (K_a.rows() != K_b.rows() || K_a.cols() != K_b.cols())
    throw std::invalid_argument("gain_distance: shape mismatch");
  return (K_a - K_b).norm();
}

GainScheduler::GainScheduler(const RobotModel& model, KeyframeLibrary lib, double t_half)
    : model_(model), lib_(std::move(lib)), t_half_(t_half) {
  if (lib_.controllers.empty()) throw std::invalid_argument("empty keyframe library");
}

GainScheduler::Active GainScheduler::update(const std::array<bool, 2>& feet_in_contact,
                                            const VectorXd& q, double t) {
  Active out;
  int selected;
  try {
    selected = select_controller(model_, lib_, feet_in_contact, q);
  } catch (const NoMatchingKeyframeError&) {
    out.K = lib_.pd_fallback;
    out.controller = active_;
    out.fallback = true;
    return out;
  }

  if (active_ < 0) {
    active_ = selected;
    out.K = lib_.controllers[active_].K;
    out.controller = active_;
    return out;
  }

  const auto feet_of = [&](int i) { return feet_of_contacts(model_, lib_.controllers[i].contacts); };

  if (!blending_) {
    if (selected != active_) {
      if (feet_of(selected) != feet_of(active_)) {
        // Contact change: blend through the PD fallback.
        blending_ = true;
        blend_from_ = lib_.controllers[active_].K;
        blend_target_ = selected;
        blend_start_ = t;
        ++switch_count_;
      } else {
        // Same contact set: gains are close, swap directly.
        active_ = selected;
        ++switch_count_;
      }
    }
  } else if (selected != blend_target_ && feet_of(selected) != feet_of(blend_target_)) {
    // Re-switch mid-blend: restart from the current effective gain.
    const BlendResult cur = blend_gains(blend_from_, lib_.controllers[blend_target_].K,
                                        lib_.pd_fallback, t - blend_start_, t_half_);
    blend_from_ = cur.K;
    blend_target_ = selected;
    blend_start_ = t;
    ++switch_count_;
  }

  if (blending_) {
    const BlendResult res = blend_gains(blend_from_, lib_.controllers[blend_target_].K,
                                        lib_.pd_fallback, t - blend_start_, t_half_);
    out.K = res.K;
    out.blending = !res.done;
    out.controller = res.use_next ? blend_target_ : active_;
    if (res.done) {
      active_ = blend_target_;
      blending_ = false;
    }
    return out;
  }

  out.K = lib_.controllers[active_].K;
  out.controller = active_;
  return out;
}

}  // namespace clqr
