#pragma once

#include <vector>

#include "quadspec/common.hpp"
#include "quadspec/errors.hpp"
#include "quadspec/quadratic_form.hpp"

namespace quadspec {

/// Eigenvalue data of a Hamilton map, reduced to the upper half plane.
///
/// `lambdas` holds the n eigenvalues with Im lambda > 0, repeated by
/// algebraic multiplicity and canonicalized: members of one cluster are
/// replaced by the cluster mean, and the list is sorted by (Re, Im).
/// `clusters` groups indices into `lambdas` that belong to one eigenvalue.
struct SpectralData {
  std::vector<Complex> lambdas;
  std::vector<std::vector<int>> clusters;
  double pairing_residual = 0.0;
};

/// Extracts eigenvalues of F, greedily matches them into +/- pairs
/// (minimizing |a + b|), keeps the upper-half-plane representative of each
/// pair, and clusters coincident representatives. Throws RealEigenvalue when
/// an eigenvalue sits on the real axis, PairingFailure when the pairing
/// residual exceeds tolerance.
SpectralData eigen_pairs(const HamiltonMap& fm, const Tolerances& tol = {});

/// Exact-input mode: the caller declares the upper-half-plane eigenvalues
/// (repetition = multiplicity), bypassing numerical pairing and clustering.
SpectralData declared_spectral_data(std::vector<Complex> lambdas, const Tolerances& tol = {});

/// The exact spectrum of the quantized operator inside a disc:
/// values h * sum_j (lambda_j / i) (2 nu_j + 1) over lattice points nu with
/// modulus at most R, merged when coincident.
struct SpectrumList {
  struct Point {
    Complex value;
    long multiplicity;  ///< number of lattice representations nu
  };
  std::vector<Point> points;  ///< sorted by (Re, Im)
  double h = 0.0;
  double radius = 0.0;
};

/// Enumerates the spectrum by depth-first search over the lattice with
/// pruning on the real part (each Re(lambda_j / i) > 0 makes the search
/// finite). Throws UnboundedEnumeration if some Re(lambda_j / i) <= 0.
SpectrumList spectrum(const SpectralData& data, double h, double R,
                      double merge_tol_factor = 1e-10);

/// Distance from z to the nearest enumerated spectrum point. Throws
/// EmptySpectrum on an empty list and OutOfRadius when the enumeration disc
/// cannot certify the answer (found distance exceeds R - |z|).
double dist_to_spectrum(Complex z, const SpectrumList& spec);

}  // namespace quadspec
