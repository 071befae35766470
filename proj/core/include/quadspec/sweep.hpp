#pragma once

#include <limits>
#include <vector>

#include "quadspec/common.hpp"
#include "quadspec/errors.hpp"
#include "quadspec/fock.hpp"
#include "quadspec/normal_form.hpp"
#include "quadspec/spectral.hpp"

namespace quadspec {

enum class NormMode { flat, gram };
enum class ScalingModel { inv_h, inv_h_log };

struct ZGrid {
  double re_min = 0.0, re_max = 0.0;
  double im_min = 0.0, im_max = 0.0;
  int nx = 1, ny = 1;
};

struct SweepConfig {
  std::vector<double> h_values;
  ZGrid grid;
  double K = 1.0;          // working radius driving the initial truncation
  long N_max = 64;         // hard cap on the truncation degree
  double stabilization_tol = 1e-6;
  NormMode norm_mode = NormMode::flat;
  int threads = 1;
  bool allow_small_h = false;  // h below 0.02 rejected unless set
  Tolerances tol;
};

// Everything the grid evaluation needs, prepared once: the reduced matrix,
// the weight defining the Gram geometry, the ellipticity constants, and the
// half-spectrum of the Hamilton map (eigenvalues of M are twice these).
struct SweepInput {
  int n = 0;
  Mat M;
  WeightForm phi1;
  double C0 = 1.0;
  double C1 = 1.0;
  std::vector<Complex> lambdas;
};

SweepInput make_input(const QuadraticForm& q, const ReduceOptions& opts = {});
SweepInput make_input(const Mat& M, const Tolerances& tol = {});

struct SweepRow {
  double h = 0.0;
  Complex z;
  long N_used = 0;
  long nu_total = 0;
  double resnorm_flat = 0.0;
  double resnorm_gram = std::numeric_limits<double>::quiet_NaN();
  bool has_gram = false;
  double dist_spec = 0.0;
  bool converged = false;
  bool out_of_regime = false;  // |z| > K^2 / (8 C0)
  bool spectral_hit = false;   // z landed on the truncated spectrum
};

struct SweepResult {
  SweepConfig config;
  double C0 = 1.0;
  double C1 = 1.0;
  std::vector<SweepRow> rows;
};

// Adaptive truncated-resolvent grid: for each (h, z) assembles degree blocks
// starting from min_vanishing_order(K, C1, h) capped by N_max, extends while
// the norm still moves by more than stabilization_tol, and records norms,
// the distance to the enumerated spectrum, and the regime flags. Rows are in
// deterministic grid order (h outer, then im, then re) whatever the thread
// count.
SweepResult sweep(const SweepInput& input, const SweepConfig& config);

struct ScalingFit {
  ScalingModel model = ScalingModel::inv_h;
  double A = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square misfit of log(resnorm)
  long points = 0;
};

// Least squares of log(resnorm) against 1/h (inv_h) or (1/h) log(1/h)
// (inv_h_log) over the converged rows; needs at least three of them.
ScalingFit scaling_fit(const std::vector<SweepRow>& rows, ScalingModel model,
                       bool use_gram = false);

// The degenerate two-variable case M = [[i,1],[0,i]] at h = 1/m, z = 1:
// squared norm of the resolvent applied to the first basis function of E_m,
// against the closed-form value h^{-2} sum_{j=0}^m j! m!/(m-j)!.
struct ExampleReport {
  int m = 0;
  double h = 0.0;
  double squared_norm = 0.0;
  double closed_form = 0.0;
  double rel_error = 0.0;
  double factorial = 0.0;
  bool exceeds_factorial = false;
};

ExampleReport example_case(int m);

// Contour-quadrature spectral projection for the circle of the given radius
// around z0, over the truncation to degrees below N.
struct ProjectionReport {
  double norm = 0.0;
  double norm_doubled = 0.0;
  double idempotency = 0.0;
  double stability = 0.0;  // |norm - norm_doubled|
};

ProjectionReport spectral_projection(const SweepInput& input, double h, Complex z0,
                                     double radius, int quad_points, long N,
                                     NormMode mode = NormMode::flat,
                                     const Tolerances& tol = {});

}  // namespace quadspec
