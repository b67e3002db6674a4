#pragma once

#include <Eigen/Core>

#include "clqr/model.hpp"

namespace clqr {

/// Solves F P + P F^T + W = 0 (continuous Lyapunov equation) by
/// Bartels-Stewart on the real Schur form of F. Requires that no two
/// eigenvalues of F sum to zero.
MatrixXd solve_lyapunov(const MatrixXd& F, const MatrixXd& W);

/// Stabilizing solution of the continuous algebraic Riccati equation
///   A^T P + P A - P B R^-1 B^T P + Q = 0
/// by Newton-Kleinman iteration, initialized from a stabilizing gain obtained
/// by eigenvalue-shifted Lyapunov stabilization. Throws SynthesisError for
/// unstabilizable pairs (the message lists the uncontrollable unstable
/// eigenvalues) and std::invalid_argument for non-PD R.
MatrixXd solve_care(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R);

/// Relative CARE residual |A^T P + P A - P B R^-1 B^T P + Q| scaled by the
/// magnitudes of its terms.
double care_residual(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R,
                     const MatrixXd& P);

/// Largest real part of the spectrum of M.
double spectral_abscissa(const MatrixXd& M);

}  // namespace clqr
