#pragma once

#include <map>
#include <vector>

#include "quadspec/common.hpp"
#include "quadspec/errors.hpp"
#include "quadspec/normal_form.hpp"

namespace quadspec {

// Basis of E_m, the homogeneous polynomials of total degree m in n complex
// variables, ordered graded-lexicographically with the lexicographically
// largest index first: for n=2, m=3 the order is (3,0),(2,1),(1,2),(0,3).
struct MultiIndexBasis {
  int n = 0;
  int m = 0;
  std::vector<std::vector<int>> indices;
  std::map<std::vector<int>, long> pos;

  long size() const { return static_cast<long>(indices.size()); }
  long position(const std::vector<int>& alpha) const;
};

long basis_dimension(int n, int m);
MultiIndexBasis enumerate_basis(int n, int m);

// Matrix of the Weyl quantization of (M x) . xi on E_m in the normalized
// monomial basis, split into its diagonal and off-diagonal parts.
struct FockBlock {
  int m = 0;
  double h = 0.0;
  MultiIndexBasis basis;
  Mat A;
  Mat D;
  Mat N_part;
};

FockBlock weyl_block(const Mat& M, double h, int m);

// Smallest p with ||N^p|| <= tol in the per-step normalized power scaling.
int nilpotent_order(const Mat& N_part, double tol = 1e-12);

// Inner products of the normalized basis functions across a contiguous
// degree range under the weight exp(-2*phi/h); in this normalization the
// entries do not depend on h. G = L L^H after an optional recorded jitter.
struct GramMatrix {
  int n = 0;
  int min_degree = 0;
  int max_degree = 0;
  std::vector<long> degree_offsets;
  std::vector<long> degree_sizes;
  Mat G;
  Mat L;
  double condition = 0.0;
  double jitter = 0.0;

  long size() const { return static_cast<long>(G.rows()); }
  long offset(int degree) const;
  Mat degree_block(int degree) const;
};

GramMatrix gram_matrix(const WeightForm& phi, double h, int min_degree, int max_degree,
                       long max_size = 4000, double cond_cap = 1e12);

// Evaluates the normalized moment table entries directly; exposed so tests
// can probe raw monomial inner products against closed forms.
class GramBuilder {
 public:
  GramBuilder(const WeightForm& phi, int n);
  // (phi_alpha, phi_beta) in the weighted space, h-independent.
  Complex normalized_entry(const std::vector<int>& alpha, const std::vector<int>& beta);

 private:
  int n_;
  int bits_;
  RealMat sigma_;
  Mat cov_yy_;
  Mat cov_yybar_;
  Complex base_;
  std::map<unsigned long long, Complex> memo_;

  unsigned long long key(const std::vector<int>& alpha, const std::vector<int>& beta) const;
  Complex entry(std::vector<int> alpha, std::vector<int> beta);
};

// Operator norm of the resolvent (z - A)^{-1} of a single block, in the
// norm where the basis is orthonormal, or in the Gram geometry of the
// block's degree when a Gram matrix is supplied.
double resolvent_block(const FockBlock& block, Complex z, const GramMatrix* gram = nullptr,
                       double guard = 1e-14);

// Finite Neumann series (z - D - N)^{-1} = sum_j ((z-D)^{-1} N)^j (z-D)^{-1},
// terminating by nilpotency.
Mat neumann_resolvent_block(const Mat& D, const Mat& N_part, Complex z, double guard = 1e-14);

// Operator norm of the Taylor truncation onto degrees < N in the weighted
// geometry, restricted to polynomials of degree <= cutoff_degree, with a
// stability flag from recomputing at cutoff_degree + 4.
struct ProjectionNorm {
  double norm = 0.0;
  double norm_refined = 0.0;
  bool converged = false;
};

ProjectionNorm projection_norm_tau(int N, const WeightForm& phi1, double h, int cutoff_degree,
                                   long max_size = 4000);

// Least integer N with N >= (2*C1*(K+1)^2*e^2 + 1)/h.
long min_vanishing_order(double K, double C1, double h);

// Approximate sup of |u| over the closed disc of radius R for a univariate
// polynomial u(x) = sum_k coeffs[k] x^k, via boundary sampling at the given
// angular resolution plus local refinement and a resolution-doubling pass.
// The result is a lower bound on the true sup.
double sup_norm_ball(const std::vector<Complex>& coeffs, double R, int resolution = 256);

}  // namespace quadspec
