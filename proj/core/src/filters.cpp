#include "clqr/filters.hpp"

#include <cmath>
#include <stdexcept>

namespace clqr {

LowPassFilter::LowPassFilter(double cutoff_hz, double sample_hz, int channels)
    : channels_(channels) {
  if (cutoff_hz <= 0.0 || cutoff_hz >= 0.5 * sample_hz)
    throw std::invalid_argument("low-pass cutoff must lie in (0, fs/2)");
  // Bilinear transform of the analog Butterworth prototype.
  const double wc = std::tan(M_PI * cutoff_hz / sample_hz);
  const double k = std::sqrt(2.0);
  const double norm = 1.0 / (1.0 + k * wc + wc * wc);
  b0_ = wc * wc * norm;
  b1_ = 2.0 * b0_;
  b2_ = b0_;
  a1_ = 2.0 * (wc * wc - 1.0) * norm;
  a2_ = (1.0 - k * wc + wc * wc) * norm;
  z_ = Eigen::MatrixXd::Zero(channels, 2);
}

void LowPassFilter::reset() {
  z_.setZero();
  primed_ = false;
}

Eigen::VectorXd LowPassFilter::step(const Eigen::VectorXd& x) {
  if (x.size() != channels_) throw std::invalid_argument("filter channel count mismatch");
  if (!primed_) {
    // Steady-state initialization: as if x had been applied forever.
    for (int c = 0; c < channels_; ++c) {
      z_(c, 0) = (b1_ - a1_) * x[c];
      z_(c, 1) = (b2_ - a2_) * x[c];
    }
    primed_ = true;
  }
  Eigen::VectorXd y(channels_);
  for (int c = 0; c < channels_; ++c) {
    const double out = b0_ * x[c] + z_(c, 0);
    z_(c, 0) = b1_ * x[c] - a1_ * out + z_(c, 1);
    z_(c, 1) = b2_ * x[c] - a2_ * out;
    y[c] = out;
  }
  return y;
}

double GaussianNoise::sample() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller on uniforms built from the raw 64-bit engine output.
  double u1 = 0.0;
  do {
    u1 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  } while (u1 <= 0.0);
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

Eigen::VectorXd GaussianNoise::sample(int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = sample();
  return v;
}

}  // namespace clqr
