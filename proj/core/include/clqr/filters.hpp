#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace clqr {

/// Discrete second-order Butterworth low-pass (bilinear transform), one state
/// per channel. Initialized to steady state on the first sample to avoid a
/// startup transient.
class LowPassFilter {
 public:
  LowPassFilter() = default;
  LowPassFilter(double cutoff_hz, double sample_hz, int channels);

  Eigen::VectorXd step(const Eigen::VectorXd& x);
  void reset();

 private:
  double b0_ = 1.0, b1_ = 0.0, b2_ = 0.0, a1_ = 0.0, a2_ = 0.0;
  Eigen::MatrixXd z_;  // channels x 2 (direct form II transposed)
  bool primed_ = false;
  int channels_ = 0;
};

/// Deterministic Gaussian stream: mt19937_64 (bit-exact by the standard) with
/// Box-Muller, so traces are byte-identical across platforms for a given seed.
class GaussianNoise {
 public:
  explicit GaussianNoise(std::uint64_t seed) : engine_(seed) {}

  double sample();
  Eigen::VectorXd sample(int n);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace clqr
