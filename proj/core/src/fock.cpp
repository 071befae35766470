#include "quadspec/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace quadspec {

long MultiIndexBasis::position(const std::vector<int>& alpha) const {
  const auto it = pos.find(alpha);
  if (it == pos.end()) throw DimensionMismatch("MultiIndexBasis: index not in basis");
  return it->second;
}

long basis_dimension(int n, int m) {
  if (n < 1 || m < 0) throw ConfigError("basis_dimension: need n >= 1, m >= 0");
  // C(m+n-1, n-1), multiplied in an overflow-safe order.
  long v = 1;
  for (int k = 1; k <= n - 1; ++k) v = v * (m + k) / k;
  return v;
}

MultiIndexBasis enumerate_basis(int n, int m) {
  if (n < 1 || m < 0) throw ConfigError("enumerate_basis: need n >= 1, m >= 0");
  MultiIndexBasis b;
  b.n = n;
  b.m = m;
  std::vector<int> cur(n, 0);
  // Graded-lex with the largest leading entries first: fill component c with
  // the highest remaining degree, recurse on the rest.
  const std::function<void(int, int)> rec = [&](int c, int rest) {
    if (c == n - 1) {
      cur[c] = rest;
      b.pos.emplace(cur, static_cast<long>(b.indices.size()));
      b.indices.push_back(cur);
      return;
    }
    for (int k = rest; k >= 0; --k) {
      cur[c] = k;
      rec(c + 1, rest - k);
    }
  };
  rec(0, m);
  if (static_cast<long>(b.indices.size()) != basis_dimension(n, m))
    throw NumericalError("enumerate_basis: dimension mismatch");
  return b;
}

FockBlock weyl_block(const Mat& M, double h, int m) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n) throw DimensionMismatch("weyl_block: M must be square");
  if (h <= 0.0) throw ConfigError("weyl_block: h must be positive");

  FockBlock blk;
  blk.m = m;
  blk.h = h;
  blk.basis = enumerate_basis(n, m);
  const long S = blk.basis.size();
  blk.A = Mat::Zero(S, S);

  const Complex hoi = h / kImagUnit;  // h/i = -ih
  const Complex diag_shift = hoi * 0.5 * M.trace();

  std::vector<int> target;
  for (long c = 0; c < S; ++c) {
    const std::vector<int>& alpha = blk.basis.indices[c];
    Complex diag = diag_shift;
    for (int i = 0; i < n; ++i) diag += hoi * M(i, i) * static_cast<double>(alpha[i]);
    blk.A(c, c) += diag;
    for (int i = 0; i < n; ++i) {
      if (alpha[i] == 0) continue;
      for (int j = 0; j < n; ++j) {
        if (j == i || M(i, j) == Complex(0.0, 0.0)) continue;
        // x_j hD_i : phi_alpha -> (h/i) sqrt(alpha_i (alpha_j + 1)) phi_{alpha - e_i + e_j}
        target = alpha;
        target[i] -= 1;
        target[j] += 1;
        const long r = blk.basis.position(target);
        blk.A(r, c) += M(i, j) * hoi *
                       std::sqrt(static_cast<double>(alpha[i]) * (alpha[j] + 1.0));
      }
    }
  }

  blk.D = Mat::Zero(S, S);
  blk.D.diagonal() = blk.A.diagonal();
  blk.N_part = blk.A - blk.D;
  return blk;
}

int nilpotent_order(const Mat& N_part, double tol) {
  const long S = N_part.rows();
  if (N_part.cols() != S) throw DimensionMismatch("nilpotent_order: matrix must be square");
  const double nn = N_part.norm();
  if (nn <= tol) return 1;
  const Mat unit = N_part / nn;
  Mat power = unit;
  for (long p = 2; p <= S; ++p) {
    power = power * unit;
    const double pn = power.norm();
    // Renormalize between steps: nonzero powers of the shift part lose at
    // most a few orders of magnitude per multiplication, while the power at
    // the nilpotent order vanishes outright, so a per-step threshold stays
    // reliable on large strongly non-normal blocks.
    if (pn <= tol) return static_cast<int>(p);
    power /= pn;
  }
  throw NotNilpotent("nilpotent_order: no power up to the dimension is negligible");
}

GramBuilder::GramBuilder(const WeightForm& phi, int n) : n_(n) {
  if (phi.n != n) throw DimensionMismatch("GramBuilder: weight dimension mismatch");
  bits_ = 64 / (2 * n);

  Eigen::SelfAdjointEigenSolver<RealMat> es(phi.G, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw NotConvex("GramBuilder: weight is not strictly convex");

  // Density exp(-Y^T G Y) on R^{2n}: covariance G^{-1}/2, normalization
  // pi^n / sqrt(det G).
  Eigen::LLT<RealMat> llt(phi.G);
  if (llt.info() != Eigen::Success) throw NotConvex("GramBuilder: weight matrix not PD");
  sigma_ = llt.solve(RealMat::Identity(2 * n, 2 * n)) / 2.0;
  double root_det = 1.0;
  for (int i = 0; i < 2 * n; ++i) root_det *= llt.matrixL()(i, i);
  base_ = Complex(1.0 / root_det, 0.0);

  cov_yy_ = Mat::Zero(n, n);
  cov_yybar_ = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      cov_yy_(i, k) = Complex(sigma_(i, k) - sigma_(n + i, n + k),
                              sigma_(i, n + k) + sigma_(n + i, k));
      cov_yybar_(i, k) = Complex(sigma_(i, k) + sigma_(n + i, n + k),
                                 sigma_(n + i, k) - sigma_(i, n + k));
    }
  }
}

unsigned long long GramBuilder::key(const std::vector<int>& alpha,
                                    const std::vector<int>& beta) const {
  unsigned long long k = 0;
  for (int i = 0; i < n_; ++i) {
    k = (k << bits_) | static_cast<unsigned long long>(alpha[i]);
    k = (k << bits_) | static_cast<unsigned long long>(beta[i]);
  }
  return k;
}

Complex GramBuilder::entry(std::vector<int> alpha, std::vector<int> beta) {
  int ta = 0, tb = 0;
  for (int i = 0; i < n_; ++i) {
    ta += alpha[i];
    tb += beta[i];
  }
  if ((ta + tb) % 2 == 1) return Complex(0.0, 0.0);
  if (ta + tb == 0) return base_;
  if (ta == 0) return std::conj(entry(std::move(beta), std::move(alpha)));

  const auto memoized = [this](std::vector<int> a, std::vector<int> b) {
    const auto k = key(a, b);
    const auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    const Complex v = entry(std::move(a), std::move(b));
    memo_.emplace(k, v);
    return v;
  };

  int i = 0;
  while (alpha[i] == 0) ++i;
  const double ai = static_cast<double>(alpha[i]);
  alpha[i] -= 1;  // alpha' from here on

  Complex sum(0.0, 0.0);
  for (int k = 0; k < n_; ++k) {
    if (alpha[k] > 0) {
      std::vector<int> a2 = alpha;
      a2[k] -= 1;
      sum += cov_yy_(i, k) * std::sqrt(static_cast<double>(alpha[k]) / ai) * memoized(a2, beta);
    }
    if (beta[k] > 0) {
      std::vector<int> b2 = beta;
      b2[k] -= 1;
      sum += cov_yybar_(i, k) * std::sqrt(static_cast<double>(beta[k]) / ai) *
             memoized(alpha, b2);
    }
  }
  return sum;
}

Complex GramBuilder::normalized_entry(const std::vector<int>& alpha,
                                      const std::vector<int>& beta) {
  if (static_cast<int>(alpha.size()) != n_ || static_cast<int>(beta.size()) != n_)
    throw DimensionMismatch("GramBuilder: index length mismatch");
  const long long cap =
      bits_ >= 31 ? std::numeric_limits<int>::max() : (1LL << bits_) - 1;
  for (int i = 0; i < n_; ++i) {
    if (alpha[i] < 0 || beta[i] < 0) throw ConfigError("GramBuilder: negative index");
    if (alpha[i] > cap || beta[i] > cap)
      throw BasisTooLarge("GramBuilder: degree exceeds the moment table packing");
  }
  return entry(alpha, beta);
}

long GramMatrix::offset(int degree) const {
  if (degree < min_degree || degree > max_degree)
    throw DimensionMismatch("GramMatrix: degree outside stored range");
  return degree_offsets[degree - min_degree];
}

Mat GramMatrix::degree_block(int degree) const {
  const long off = offset(degree);
  const long sz = degree_sizes[degree - min_degree];
  return G.block(off, off, sz, sz);
}

GramMatrix gram_matrix(const WeightForm& phi, double h, int min_degree, int max_degree,
                       long max_size, double cond_cap) {
  if (h <= 0.0) throw ConfigError("gram_matrix: h must be positive");
  if (min_degree < 0 || max_degree < min_degree)
    throw ConfigError("gram_matrix: bad degree range");

  GramMatrix gm;
  gm.n = phi.n;
  gm.min_degree = min_degree;
  gm.max_degree = max_degree;

  std::vector<std::vector<int>> flat;
  for (int d = min_degree; d <= max_degree; ++d) {
    const MultiIndexBasis b = enumerate_basis(phi.n, d);
    gm.degree_offsets.push_back(static_cast<long>(flat.size()));
    gm.degree_sizes.push_back(b.size());
    flat.insert(flat.end(), b.indices.begin(), b.indices.end());
    if (static_cast<long>(flat.size()) > max_size)
      throw BasisTooLarge("gram_matrix: basis size exceeds the configured cap");
  }
  const long S = static_cast<long>(flat.size());

  GramBuilder builder(phi, phi.n);
  gm.G = Mat::Zero(S, S);
  for (long i = 0; i < S; ++i) {
    for (long j = i; j < S; ++j) {
      const Complex e = builder.normalized_entry(flat[i], flat[j]);
      gm.G(i, j) = e;
      gm.G(j, i) = std::conj(e);
    }
  }

  Eigen::SelfAdjointEigenSolver<Mat> es(gm.G, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  double lmin = es.eigenvalues().minCoeff();
  if (lmin <= 0.0 || lmax / lmin > cond_cap) {
    gm.jitter = 1e-14 * std::max(1.0, lmax);
    gm.G += gm.jitter * Mat::Identity(S, S);
    lmin += gm.jitter;
    if (lmin <= 0.0 || lmax / lmin > cond_cap)
      throw IllConditionedGram(
          "gram_matrix: Gram condition exceeds the cap; lower the degree cutoff");
  }
  gm.condition = lmax / lmin;

  Eigen::LLT<Mat> llt(gm.G);
  if (llt.info() != Eigen::Success)
    throw IllConditionedGram("gram_matrix: Cholesky failed; lower the degree cutoff");
  gm.L = llt.matrixL();
  return gm;
}

namespace {

double smallest_singular_inverse(const Mat& W, double guard, const char* what) {
  Eigen::JacobiSVD<Mat> svd(W);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(W.rows() - 1);
  if (smin <= guard * std::max(1.0, smax)) throw SpectralPointHit(what);
  return 1.0 / smin;
}

}  // namespace

double resolvent_block(const FockBlock& block, Complex z, const GramMatrix* gram,
                       double guard) {
  const long S = block.A.rows();
  const Mat Z = z * Mat::Identity(S, S) - block.A;
  if (!gram) return smallest_singular_inverse(Z, guard, "resolvent_block: z hits the block");

  const Mat Gm = gram->degree_block(block.m);
  Eigen::LLT<Mat> llt(Gm);
  if (llt.info() != Eigen::Success)
    throw IllConditionedGram("resolvent_block: degree block is not positive definite");
  const Mat L = llt.matrixL();
  const Mat Linv_h = L.adjoint().triangularView<Eigen::Upper>().solve(Mat::Identity(S, S));
  const Mat W = L.adjoint() * Z * Linv_h;
  return smallest_singular_inverse(W, guard, "resolvent_block: z hits the block");
}

Mat neumann_resolvent_block(const Mat& D, const Mat& N_part, Complex z, double guard) {
  const long S = D.rows();
  if (D.cols() != S || N_part.rows() != S || N_part.cols() != S)
    throw DimensionMismatch("neumann_resolvent_block: size mismatch");

  double scale = std::abs(z);
  for (long k = 0; k < S; ++k) scale = std::max(scale, std::abs(D(k, k)));
  Vec w(S);
  for (long k = 0; k < S; ++k) {
    const Complex d = z - D(k, k);
    if (std::abs(d) <= guard * std::max(1.0, scale))
      throw SpectralPointHit("neumann_resolvent_block: z hits the diagonal spectrum");
    w(k) = 1.0 / d;
  }

  const Mat X = w.asDiagonal() * N_part;
  Mat term = Mat(w.asDiagonal());
  Mat R = term;
  for (long j = 1; j <= S; ++j) {
    term = X * term;
    const double tn = term.norm();
    if (tn == 0.0) break;
    R += term;
    if (tn <= 1e-300) break;
  }
  return R;
}

namespace {

double truncation_norm(const Mat& Gfull, long S, long keep) {
  const Mat G = Gfull.topLeftCorner(S, S);
  Eigen::LLT<Mat> llt(G);
  if (llt.info() != Eigen::Success)
    throw IllConditionedGram("projection_norm_tau: Gram block not positive definite");
  const Mat L = llt.matrixL();
  Mat P = Mat::Zero(S, S);
  P.topLeftCorner(keep, keep) = Mat::Identity(keep, keep);
  const Mat Linv_h = L.adjoint().triangularView<Eigen::Upper>().solve(Mat::Identity(S, S));
  const Mat W = L.adjoint() * P * Linv_h;
  Eigen::JacobiSVD<Mat> svd(W);
  return svd.singularValues()(0);
}

}  // namespace

ProjectionNorm projection_norm_tau(int N, const WeightForm& phi1, double h, int cutoff_degree,
                                   long max_size) {
  if (N < 1) throw ConfigError("projection_norm_tau: N must be >= 1");
  if (cutoff_degree <= N)
    throw ConfigError("projection_norm_tau: cutoff_degree must exceed N");

  const GramMatrix big = gram_matrix(phi1, h, 0, cutoff_degree + 4, max_size);
  const long keep = big.offset(N);  // rows of degree < N
  const long S_small = big.offset(cutoff_degree) + big.degree_sizes[cutoff_degree];
  const long S_big = big.size();

  ProjectionNorm out;
  out.norm = truncation_norm(big.G, S_small, keep);
  out.norm_refined = truncation_norm(big.G, S_big, keep);
  out.converged = std::abs(out.norm - out.norm_refined) <=
                  1e-6 * std::max(1.0, std::abs(out.norm_refined));
  return out;
}

long min_vanishing_order(double K, double C1, double h) {
  if (K < 0.0 || C1 < 1.0 || h <= 0.0)
    throw ConfigError("min_vanishing_order: need K >= 0, C1 >= 1, h > 0");
  const double e2 = std::exp(2.0);
  const double bound = (2.0 * C1 * (K + 1.0) * (K + 1.0) * e2 + 1.0) / h;
  return static_cast<long>(std::ceil(bound));
}

namespace {

double poly_abs(const std::vector<Complex>& coeffs, Complex x) {
  Complex v(0.0, 0.0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return std::abs(v);
}

double refine_angle(const std::vector<Complex>& coeffs, double R, double lo, double hi) {
  // Golden-section maximization of |u(R e^{i theta})| on [lo, hi].
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = poly_abs(coeffs, std::polar(R, c));
  double fd = poly_abs(coeffs, std::polar(R, d));
  for (int it = 0; it < 120; ++it) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = poly_abs(coeffs, std::polar(R, d));
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = poly_abs(coeffs, std::polar(R, c));
    }
  }
  return std::max(fc, fd);
}

double boundary_max(const std::vector<Complex>& coeffs, double R, int resolution) {
  const double tau = 2.0 * std::acos(-1.0);
  double best = 0.0;
  double best_theta = 0.0;
  for (int k = 0; k < resolution; ++k) {
    const double theta = tau * k / resolution;
    const double v = poly_abs(coeffs, std::polar(R, theta));
    if (v > best) {
      best = v;
      best_theta = theta;
    }
  }
  const double window = tau / resolution;
  return std::max(best, refine_angle(coeffs, R, best_theta - window, best_theta + window));
}

}  // namespace

double sup_norm_ball(const std::vector<Complex>& coeffs, double R, int resolution) {
  if (R <= 0.0) throw ConfigError("sup_norm_ball: R must be positive");
  if (coeffs.empty()) return 0.0;
  const int res = std::max(8, resolution);
  return std::max(boundary_max(coeffs, R, res), boundary_max(coeffs, R, 2 * res));
}

}  // namespace quadspec
