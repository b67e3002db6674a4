#include "clqr/care.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <sstream>

#include "clqr/errors.hpp"

namespace clqr {

MatrixXd solve_lyapunov(const MatrixXd& F, const MatrixXd& W) {
  const int n = static_cast<int>(F.rows());
  if (F.cols() != n || W.rows() != n || W.cols() != n)
    throw std::invalid_argument("solve_lyapunov: dimension mismatch");

  Eigen::RealSchur<MatrixXd> schur(F);
  const MatrixXd& T = schur.matrixT();  // upper quasi-triangular
  const MatrixXd& U = schur.matrixU();
  const MatrixXd Wt = U.transpose() * W * U;

  // Solve T Y + Y T^T + Wt = 0 by column blocks, last block first.
  MatrixXd Y = MatrixXd::Zero(n, n);
  int k = n - 1;
  while (k >= 0) {
    const bool pair = k > 0 && std::abs(T(k, k - 1)) > 0.0;
    const int k0 = pair ? k - 1 : k;
    const int bs = pair ? 2 : 1;

    // rhs_K = -Wt_K - sum_{J > K} Y_J (T_{K,J})^T, J indexing column blocks.
    MatrixXd rhs = -Wt.block(0, k0, n, bs);
    if (k + 1 <= n - 1)
      rhs.noalias() -= Y.middleCols(k + 1, n - 1 - k) * T.block(k0, k + 1, bs, n - 1 - k).transpose();

    if (bs == 1) {
      MatrixXd lhs = T + T(k0, k0) * MatrixXd::Identity(n, n);
      Y.col(k0) = lhs.partialPivLu().solve(rhs.col(0));
    } else {
      MatrixXd lhs(2 * n, 2 * n);
      const MatrixXd I = MatrixXd::Identity(n, n);
      lhs << T + T(k0, k0) * I, T(k0, k0 + 1) * I, T(k0 + 1, k0) * I, T + T(k0 + 1, k0 + 1) * I;
      Eigen::VectorXd stacked(2 * n);
      stacked << rhs.col(0), rhs.col(1);
      const Eigen::VectorXd y = lhs.partialPivLu().solve(stacked);
      Y.col(k0) = y.head(n);
      Y.col(k0 + 1) = y.tail(n);
    }
    k = k0 - 1;
  }

  MatrixXd P = U * Y * U.transpose();
  return 0.5 * (P + P.transpose());
}

double spectral_abscissa(const MatrixXd& M) {
  Eigen::EigenSolver<MatrixXd> es(M, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

namespace {

// Uncontrollable unstable eigenvalues by the PBH test: rank [A - lambda I, B].
std::string pbh_unstable_modes(const MatrixXd& A, const MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  Eigen::EigenSolver<MatrixXd> es(A, /*computeEigenvectors=*/false);
  std::ostringstream out;
  for (int i = 0; i < n; ++i) {
    const std::complex<double> lam = es.eigenvalues()[i];
    if (lam.real() < 0.0) continue;
    Eigen::MatrixXcd pencil(n, n + B.cols());
    pencil << A.cast<std::complex<double>>() - lam * Eigen::MatrixXcd::Identity(n, n),
        B.cast<std::complex<double>>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] < 1e-8 * sv[0]) {
      if (out.tellp() > 0) out << ", ";
      out << lam.real();
      if (std::abs(lam.imag()) > 0.0) out << (lam.imag() > 0 ? "+" : "") << lam.imag() << "i";
    }
  }
  return out.str();
}

// Bass-style stabilization: K0 = B^T Z^+ with
// (A + beta I) Z + Z (A + beta I)^T = 2 B B^T, beta beyond the spectral radius.
MatrixXd initial_stabilizing_gain(const MatrixXd& A, const MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  if (spectral_abscissa(A) < 0.0) return MatrixXd::Zero(B.cols(), n);

  const double beta = A.norm() + 1.0;
  const MatrixXd F = -(A + beta * MatrixXd::Identity(n, n));
  const MatrixXd Z = solve_lyapunov(F, 2.0 * B * B.transpose());

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Z);
  const VectorXd ev = es.eigenvalues();
  const double tol = std::max(ev.maxCoeff(), 0.0) * 1e-12;
  MatrixXd Zpinv = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    if (ev[i] > tol) Zpinv += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() / ev[i];
  return B.transpose() * Zpinv;
}

}  // namespace

double care_residual(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R,
                     const MatrixXd& P) {
  const MatrixXd AtP = A.transpose() * P;
  const MatrixXd PBRB = P * B * R.llt().solve(B.transpose() * P);
  const MatrixXd res = AtP + AtP.transpose() - PBRB + Q;
  const double denom =
      std::max(1.0, 2.0 * AtP.norm() + PBRB.norm() + Q.norm());
  return res.norm() / denom;
}

MatrixXd solve_care(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  if (A.cols() != n || B.rows() != n) throw std::invalid_argument("solve_care: A/B dimension mismatch");
  if (Q.rows() != n || Q.cols() != n) throw std::invalid_argument("solve_care: Q dimension mismatch");
  if (R.rows() != m || R.cols() != m) throw std::invalid_argument("solve_care: R dimension mismatch");
  if ((R - R.transpose()).lpNorm<Eigen::Infinity>() > 1e-10 * std::max(1.0, R.norm()))
    throw std::invalid_argument("solve_care: R must be symmetric");
  Eigen::LLT<MatrixXd> rllt(R);
  if (rllt.info() != Eigen::Success) throw std::invalid_argument("solve_care: R must be positive definite");

  MatrixXd K = initial_stabilizing_gain(A, B);
  if (spectral_abscissa(A - B * K) >= 0.0) {
    const std::string modes = pbh_unstable_modes(A, B);
    throw SynthesisError("pair (A, B) is not stabilizable; uncontrollable unstable eigenvalues: " +
                         (modes.empty() ? std::string("(numerically marginal)") : modes));
  }

  // Newton-Kleinman: each iterate solves a Lyapunov equation for the closed
  // loop of the previous gain. Quadratic convergence from any stabilizing K.
  MatrixXd P = MatrixXd::Zero(n, n);
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 100; ++it) {
    const MatrixXd Acl = A - B * K;
    const MatrixXd W = Q + K.transpose() * R * K;
    P = solve_lyapunov(Acl.transpose(), W);
    K = rllt.solve(B.transpose() * P);
    res = care_residual(A, B, Q, R, P);
    if (res < 1e-12) break;
  }
  if (!(res < 1e-9))
    throw SynthesisError("Newton-Kleinman iteration did not converge (relative residual " +
                         std::to_string(res) + ")");
  return P;
}

}  // namespace clqr
