#include <Eigen/Dense>
#include <cmath>

#include "clqr/planner.hpp"

namespace clqr {

namespace {

using Eigen::Matrix3d;
using Eigen::Matrix4d;
using Eigen::RowVector3d;
using Eigen::RowVector4d;
using Eigen::Vector3d;
using Eigen::Vector4d;

}  // namespace

MatrixXd zmp_preview_com(const VectorXd& zmp_ref, double z_com, double dt, double horizon_s,
                         const PreviewWeights& weights, double com0) {
  if (horizon_s < 0.5) throw std::invalid_argument("preview horizon must be at least 0.5 s");
  if (z_com <= 0.0) throw std::invalid_argument("CoM height must be positive");
  if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
  const int T = static_cast<int>(zmp_ref.size());
  if (T == 0) return MatrixXd(0, 3);

  const double g = 9.81;

  // Cart-table dynamics with jerk input: x = (c, cdot, cddot), p = c - z/g cddot.
  Matrix3d A;
  A << 1.0, dt, dt * dt / 2.0, 0.0, 1.0, dt, 0.0, 0.0, 1.0;
  Vector3d B(dt * dt * dt / 6.0, dt * dt / 2.0, dt);
  RowVector3d C(1.0, 0.0, -z_com / g);

  // Incremental system with integrated tracking error (Katayama form).
  Matrix4d At = Matrix4d::Zero();
  At(0, 0) = 1.0;
  At.block<1, 3>(0, 1) = C * A;
  At.block<3, 3>(1, 1) = A;
  Vector4d Bt;
  Bt << C * B, B;
  Matrix4d Qt = Matrix4d::Zero();
  Qt(0, 0) = weights.zmp_error;
  const double R = weights.jerk;

  // DARE by fixed-point iteration; the augmented system is 4x4 and stabilizable.
  Matrix4d P = Qt;
  for (int it = 0; it < 100000; ++it) {
    const double denom = R + Bt.dot(P * Bt);
    const Matrix4d Pn =
        Qt + At.transpose() * (P - P * Bt * (Bt.transpose() * P) / denom) * At;
    const double diff = (Pn - P).cwiseAbs().maxCoeff();
    P = Pn;
    if (diff < 1e-13 * std::max(1.0, P.cwiseAbs().maxCoeff())) break;
  }

  const double denom = R + Bt.dot(P * Bt);
  const RowVector4d Kt = (Bt.transpose() * P * At) / denom;
  const double Ki = Kt[0];
  const RowVector3d Kx = Kt.tail<3>();

  // Preview gains over the horizon: G(1) = -Ki, then the closed-loop adjoint
  // recursion.
  const int Np = std::max(1, static_cast<int>(std::round(horizon_s / dt)));
  const Matrix4d Acl = At - Bt * Kt;
  VectorXd G(Np);
  G[0] = -Ki;
  Vector4d xi = -Acl.transpose() * P * Vector4d::UnitX();
  for (int l = 1; l < Np; ++l) {
    G[l] = Bt.dot(xi) / denom;
    xi = Acl.transpose() * xi;
  }

  auto ref_at = [&](int k) { return zmp_ref[std::min(k, T - 1)]; };

  MatrixXd out(T, 3);
  Vector3d x(com0, 0.0, 0.0);
  double integral = 0.0;
  double u = 0.0;
  for (int k = 0; k < T; ++k) {
    out(k, 0) = x[0];
    out(k, 1) = x[1];
    out(k, 2) = x[2];
    const double p = C * x;
    integral += p - ref_at(k);
    double preview = 0.0;
    for (int l = 1; l <= Np; ++l) preview += G[l - 1] * ref_at(k + l);
    u = -Ki * integral - Kx * x - preview;
    x = A * x + B * u;
  }
  return out;
}

}  // namespace clqr
