#pragma once

#include <complex>

#include <Eigen/Dense>

namespace quadspec {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

inline constexpr Complex kImagUnit{0.0, 1.0};

/// Numerical thresholds used across the library. All checks that compare a
/// residual against one of these scale it by max(1, norm of the data), so the
/// defaults behave sensibly for both tiny and large inputs.
struct Tolerances {
  double symmetry = 1e-12;       ///< symmetry / identity residuals
  double definiteness = 1e-10;   ///< strict positive/negative definiteness margins
  double structure = 1e-9;       ///< normal-form structure residuals (hard errors)
  double pairing = 1e-8;         ///< +/- eigenvalue pairing residual
  double cluster = 1e-8;         ///< eigenvalue clustering radius
  double nilpotent = 1e-12;      ///< normalized-power cutoff for nilpotency detection
  double spectral_guard = 1e-14; ///< distance below which z counts as hitting the spectrum
  double cond_cap = 1e8;         ///< eigenvector conditioning cap for diagonalization
  double gram_cond_cap = 1e12;   ///< condition cap for Gram Cholesky factorizations
};

}  // namespace quadspec
