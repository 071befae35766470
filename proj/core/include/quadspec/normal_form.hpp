#pragma once

#include <optional>
#include <vector>

#include "quadspec/common.hpp"
#include "quadspec/errors.hpp"
#include "quadspec/quadratic_form.hpp"
#include "quadspec/spectral.hpp"

namespace quadspec {

/// Basis of a complex Lagrangian plane, stored as 2n x n columns, tagged by
/// which stable manifold it represents.
struct LagrangianFrame {
  enum class Label { plus, minus };
  Mat basis;
  Label label;

  int n() const { return static_cast<int>(basis.cols()); }
};

/// Hard structural checks: independent columns, isotropy, q vanishing on the
/// span. Throws StructureViolation on failure.
void check_lagrangian(const LagrangianFrame& frame, const QuadraticForm& q,
                      const Tolerances& tol = {});

/// min over the plane's unit sphere of (1/i) sigma(X, conj X), computed as a
/// generalized Hermitian eigenproblem on the n x n form. Positive on a
/// strictly positive Lagrangian, negative on a strictly negative one.
double positivity(const LagrangianFrame& frame);

struct Eigenspace {
  Complex lambda;
  Mat basis;  ///< orthonormal columns spanning Ker (F - lambda)^{2n}
};

/// Generalized eigenspaces for every cluster center and its negative,
/// computed from a Schur decomposition with eigenvalue reordering (never by
/// powering F - lambda). Throws SchurReorderFailure if the invariance
/// residual of a reordered block is too large.
std::vector<Eigenspace> generalized_eigenspaces(const HamiltonMap& fm, const SpectralData& data,
                                                const Tolerances& tol = {});

/// Stable manifolds: Lambda+ spans the generalized eigenspaces with
/// Im lambda > 0, Lambda- those with Im lambda < 0. Frames are orthonormal.
std::pair<LagrangianFrame, LagrangianFrame> stable_manifolds(const HamiltonMap& fm,
                                                             const SpectralData& data,
                                                             const Tolerances& tol = {});

/// Graph matrix A of a plane {eta = A y}: solves for A from the frame,
/// symmetrizes, and verifies the definiteness of Im A demanded by the label
/// (negative definite for Lambda-, positive definite for Lambda+). Throws
/// VerticalPlane when the y-block of the frame is singular.
Mat graph_matrix(const LagrangianFrame& frame, const Tolerances& tol = {});

/// Real symplectic map K_R (2n x 2n, real) taking the graph of A_minus to
/// the graph of -i * Identity: the shear (y, eta) -> (y, eta - Re(A_minus) y)
/// followed by the scaling (y, eta) -> (T y, T^{-1} eta) with
/// T = (-Im A_minus)^{1/2}. Throws NotNegativeDefinite if Im A_minus is not
/// negative definite.
RealMat real_reduction(const Mat& A_minus, const Tolerances& tol = {});

struct FbiMap {
  Mat B;    ///< Cayley transform (I - i A_plus)^{-1} A_plus, symmetric, Im B related to the weight
  Mat K_T;  ///< complex symplectic matrix [[I, -iI], [-B, I + iB]]
};

/// Builds the complex canonical map sending {eta = -i y} to {x = 0} and
/// {eta = A_plus y} to {xi = 0}. Both mapping properties and symplecticity
/// are verified. Throws SingularCayley if I - i A_plus is singular.
FbiMap fbi_map(const Mat& A_plus, const Tolerances& tol = {});

/// Strictly plurisubharmonic quadratic weight on C^n, stored as the real
/// 2n x 2n Gram matrix G of the real quadratic form
/// Phi(x) = (1/2) (Re x, Im x)^T G (Re x, Im x).
struct WeightForm {
  int n = 0;
  RealMat G;

  double evaluate(const Vec& x) const;
  /// G proportional to the identity (monomials of different degree are then
  /// orthogonal in the weighted space).
  bool is_radial(double tol = 1e-12) const;
  /// Phi(x) = |x|^2 / 2, the weight in which the normalized basis is
  /// orthonormal.
  static WeightForm flat(int n);
  /// Phi(x) = c |x|^2.
  static WeightForm radial(int n, double c);
};

/// Weight Phi0(x) = (1/2)((Im x)^2 + Im(B x, x)) induced by the FBI map.
/// Throws NotConvex unless Phi0 is strictly convex.
WeightForm phi0(const Mat& B, const Tolerances& tol = {});

/// Transports q by the symplectic matrix K (new = K old): computes
/// Qt = K^{-T} Q K^{-1}, verifies that the xx and xi-xi blocks vanish, and
/// extracts M with q_t(x, xi) = (M x) . xi, i.e. Qt = (1/2)[[0, M^T],[M, 0]].
/// Throws NotNormalForm if the structure is violated.
Mat transported_form(const QuadraticForm& q, const Mat& K, const Tolerances& tol = {});

enum class JordanMode { exact, diagonalized, raw };

struct JordanizeResult {
  Mat C;           ///< change of basis on the x side; kappa_C = diag(C^{-1}, C^T)
  Mat M_out;       ///< C^{-1} M C
  WeightForm phi1; ///< Phi1(x) = Phi0(C x)
  JordanMode mode;
};

/// Basis change bringing M toward a requested shape. No general numerical
/// Jordan algorithm is attempted: `exact` trusts a user-supplied C,
/// `diagonalized` uses the eigenvector basis and fails (DefectiveNotSupplied)
/// when it is too ill-conditioned, `raw` keeps M untouched.
JordanizeResult jordanize(const Mat& M, const WeightForm& phi0_weight, JordanMode mode,
                          const std::optional<Mat>& C_user = std::nullopt,
                          const Tolerances& tol = {});

struct EllipticityConstants {
  double C0;  ///< smallest constant >= 1 with Re q_t(x, (2/i) dPhi1/dx) >= |x|^2 / C0
  double C1;  ///< smallest constant >= 1 with (1/C1)|x|^2 <= Phi1(x) <= C1 |x|^2
};

/// Computes the ellipticity constants of the reduced pair (M, Phi1). Throws
/// EllipticityViolated when the lower bound fails (non-elliptic input).
EllipticityConstants ellipticity_constants(const Mat& M, const WeightForm& phi1);

struct ReduceOptions {
  JordanMode mode = JordanMode::raw;
  std::optional<Mat> C_user;
  Tolerances tol;
};

/// Full reduction of a normalized elliptic form to q_t(x, xi) = (M x) . xi.
struct NormalFormResult {
  int n = 0;
  Mat K_total;      ///< composite symplectic map, applied oldest first
  Mat M;            ///< reduced matrix, Spec(M) = Spec(2F) in the upper half plane
  Mat B;            ///< Cayley matrix of the FBI step
  Mat C;            ///< Jordan-step basis change
  WeightForm phi0_weight;
  WeightForm phi1;  ///< final weight, equivalent to |x|^2
  double C0 = 0.0;
  double C1 = 0.0;
  JordanMode jordan_mode = JordanMode::raw;
  SpectralData spectral;

  struct Residuals {
    double symplectic = 0.0;   ///< |K^T J K - J|
    double block_xx = 0.0;     ///< size of the transported xx block
    double block_xixi = 0.0;   ///< size of the transported xi-xi block
    double spec_match = 0.0;   ///< multiset distance Spec(M) vs 2 * lambdas
    double pairing = 0.0;
  } residuals;
};

NormalFormResult reduce(const QuadraticForm& q, const ReduceOptions& opts = {});

}  // namespace quadspec
