#pragma once

#include "quadspec/common.hpp"
#include "quadspec/errors.hpp"

namespace quadspec {

// Phase-space convention, fixed once for the whole library.
//
// A phase-space point is X = (x, xi) in C^{2n} with the n position
// coordinates first. The symplectic form is
//
//     sigma((x, xi), (y, eta)) = xi . y - x . eta,
//
// i.e. sigma(X, Y) = X^T J Y with J = [[0, -I], [I, 0]] in n x n blocks.
// The Hamilton map F of a quadratic form q(X) = X^T Q X is the unique
// sigma-skew matrix with q(X, Y) = sigma(X, F Y); concretely F = J^{-1} Q
// with J^{-1} = -J.

/// The matrix J of the symplectic form, size 2n x 2n.
Mat symplectic_matrix(int n);

/// sigma(X, Y) = X^T J Y. Both vectors must have even, equal length.
Complex symplectic_product(const Vec& X, const Vec& Y);

/// A complex quadratic form q(X) = X^T Q X on C^{2n}, stored as the full
/// symmetric 2n x 2n coefficient matrix. Construction symmetrizes the input
/// and rejects matrices that are non-symmetric beyond tolerance.
class QuadraticForm {
 public:
  QuadraticForm(int n, Mat Q, double symmetry_tol = 1e-12);

  int n() const { return n_; }
  int dim() const { return 2 * n_; }
  const Mat& matrix() const { return Q_; }

  /// q(X) = X^T Q X (bilinear, no conjugation).
  Complex evaluate(const Vec& X) const;

  /// Polarized form q(X, Y) = X^T Q Y.
  Complex polarize(const Vec& X, const Vec& Y) const;

 private:
  int n_;
  Mat Q_;
};

/// Result of the ellipticity test. Never throws: callers decide what a
/// non-normalized form means for them.
struct EllipticityReport {
  bool is_normalized;  ///< Re Q positive definite beyond the tolerance margin
  double min_eig_re;   ///< smallest eigenvalue of Re Q
};

EllipticityReport check_elliptic(const QuadraticForm& q, double definiteness_tol = 1e-10);

/// Hamilton map F = J^{-1} Q together with its dimension. Eigenvalues of F
/// come in +/- pairs with equal algebraic multiplicities.
struct HamiltonMap {
  int n;
  Mat F;
};

HamiltonMap hamilton_map(const QuadraticForm& q);

struct RotationResult {
  Complex lambda;         ///< unit scalar with Re(lambda Q) positive definite
  QuadraticForm rotated;  ///< lambda * q
};

/// Finds a unit complex number lambda such that Re(lambda q) is positive
/// definite, by scanning at least `grid` angles and refining the best one.
/// Returns lambda = 1 exactly when q is already normalized. Throws
/// NoRotationFound when no angle gives definiteness.
RotationResult normalize_rotation(const QuadraticForm& q, int grid = 720,
                                  double definiteness_tol = 1e-10);

/// Closed angular sector [theta_min, theta_max] (radians) swept by
/// arg q(X) over real X != 0.
struct Sector {
  double theta_min;
  double theta_max;
};

/// Samples arg q over the real unit sphere S^{2n-1} (at least `samples`
/// quasi-uniform points, deterministic) and refines the extremes by local
/// ascent. Requires a normalized form (Re q > 0); throws NotNormalized.
Sector sector(const QuadraticForm& q, int samples = 4096);

}  // namespace quadspec
