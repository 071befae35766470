#include "quadspec/quadratic_form.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

namespace quadspec {

namespace {

RealMat real_part_sym(const Mat& Q) {
  RealMat R = Q.real();
  return RealMat((R + R.transpose()) / 2.0);
}

double min_eig_sym(const RealMat& S) {
  Eigen::SelfAdjointEigenSolver<RealMat> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

Mat symplectic_matrix(int n) {
  Mat J = Mat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    J(k, n + k) = Complex(-1.0, 0.0);
    J(n + k, k) = Complex(1.0, 0.0);
  }
  return J;
}

Complex symplectic_product(const Vec& X, const Vec& Y) {
  if (X.size() != Y.size() || X.size() % 2 != 0 || X.size() == 0)
    throw DimensionMismatch("symplectic_product: vectors must have equal even length");
  const Eigen::Index n = X.size() / 2;
  // xi . y - x . eta, bilinear (no conjugation), spelled out to avoid building J.
  const Complex a = X.tail(n).transpose() * Y.head(n);
  const Complex b = X.head(n).transpose() * Y.tail(n);
  return a - b;
}

QuadraticForm::QuadraticForm(int n, Mat Q, double symmetry_tol) : n_(n), Q_(std::move(Q)) {
  if (n_ < 1) throw DimensionMismatch("QuadraticForm: n must be >= 1");
  if (Q_.rows() != 2 * n_ || Q_.cols() != 2 * n_)
    throw DimensionMismatch("QuadraticForm: coefficient matrix must be 2n x 2n");
  const double scale = std::max(1.0, Q_.norm());
  const double asym = (Q_ - Q_.transpose()).norm();
  if (asym > symmetry_tol * scale)
    throw ConfigError("QuadraticForm: coefficient matrix non-symmetric beyond tolerance");
  // The transpose aliases Q_ during assignment, so materialize first.
  const Mat sym = (Q_ + Q_.transpose()) / 2.0;
  Q_ = sym;
}

Complex QuadraticForm::evaluate(const Vec& X) const {
  if (X.size() != dim()) throw DimensionMismatch("evaluate: point has wrong dimension");
  return X.transpose() * Q_ * X;
}

Complex QuadraticForm::polarize(const Vec& X, const Vec& Y) const {
  if (X.size() != dim() || Y.size() != dim())
    throw DimensionMismatch("polarize: point has wrong dimension");
  return X.transpose() * Q_ * Y;
}

EllipticityReport check_elliptic(const QuadraticForm& q, double definiteness_tol) {
  const double m = min_eig_sym(real_part_sym(q.matrix()));
  const double scale = std::max(1.0, q.matrix().norm());
  return EllipticityReport{m > definiteness_tol * scale, m};
}

RotationResult normalize_rotation(const QuadraticForm& q, int grid, double definiteness_tol) {
  const double scale = std::max(1.0, q.matrix().norm());
  const double margin = definiteness_tol * scale;

  if (check_elliptic(q, definiteness_tol).is_normalized)
    return RotationResult{Complex(1.0, 0.0), q};

  grid = std::max(grid, 720);
  const auto objective = [&](double theta) {
    const Complex lam = std::polar(1.0, theta);
    return min_eig_sym(real_part_sym(lam * q.matrix()));
  };

  double best_theta = 0.0, best_val = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid; ++k) {
    const double theta = -M_PI + 2.0 * M_PI * k / grid;
    const double v = objective(theta);
    if (v > best_val) {
      best_val = v;
      best_theta = theta;
    }
  }

  // Golden-section refinement of the best grid angle.
  double lo = best_theta - 2.0 * M_PI / grid;
  double hi = best_theta + 2.0 * M_PI / grid;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (objective(m1) < objective(m2))
      lo = m1;
    else
      hi = m2;
  }
  const double theta = (lo + hi) / 2.0;
  const double val = objective(theta);
  if (val <= margin) throw NoRotationFound("normalize_rotation: no angle makes Re(lambda q) positive definite");

  const Complex lam = std::polar(1.0, theta);
  return RotationResult{lam, QuadraticForm(q.n(), lam * q.matrix())};
}

HamiltonMap hamilton_map(const QuadraticForm& q) {
  const int n = q.n();
  // F = J^{-1} Q = -J Q; block rows of -J are [0, I; -I, 0].
  const Mat& Q = q.matrix();
  Mat F(2 * n, 2 * n);
  F.topRows(n) = Q.bottomRows(n);
  F.bottomRows(n) = -Q.topRows(n);
  return HamiltonMap{n, std::move(F)};
}

namespace {

// arg q(X) on the unit sphere, and its Riemannian gradient. Assumes
// Re q(X) > 0 so atan2 stays on a smooth branch.
struct SectorObjective {
  const Mat& Q;

  double value(const RealVec& X) const {
    Vec Xc = X.cast<Complex>();
    const Complex w = Xc.transpose() * Q * Xc;
    return std::atan2(w.imag(), w.real());
  }

  RealVec tangent_gradient(const RealVec& X) const {
    Vec Xc = X.cast<Complex>();
    const Complex w = Xc.transpose() * Q * Xc;
    Vec g = 2.0 * (Q * Xc) / w;
    RealVec grad = g.imag();
    grad -= grad.dot(X) * X;
    return grad;
  }
};

double refine_extremum(const SectorObjective& f, RealVec X, double direction, int iters) {
  double step = 0.1;
  double val = direction * f.value(X);
  for (int it = 0; it < iters; ++it) {
    RealVec g = direction * f.tangent_gradient(X);
    const double gn = g.norm();
    if (gn < 1e-13) break;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      RealVec Xt = X + step * g;
      Xt.normalize();
      const double vt = direction * f.value(Xt);
      if (vt > val) {
        X = Xt;
        val = vt;
        moved = true;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    if (!moved && step < 1e-16) break;
  }
  return direction * val;
}

}  // namespace

Sector sector(const QuadraticForm& q, int samples) {
  if (!check_elliptic(q).is_normalized)
    throw NotNormalized("sector: form must be normalized (Re q > 0) first");

  const int d = q.dim();
  const Mat& Q = q.matrix();
  SectorObjective f{Q};

  samples = std::max(samples, 64);
  // Deterministic quasi-uniform sphere sample: normalized Gaussian vectors
  // from a fixed-seed generator, so results are reproducible and refinable.
  std::mt19937_64 rng(0x51ec7a11u);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  constexpr int kStarts = 4;
  std::vector<std::pair<double, RealVec>> best_hi, best_lo;

  for (int s = 0; s < samples; ++s) {
    RealVec X(d);
    if (d == 2) {
      // On the circle an exact uniform angle grid beats random sampling.
      const double t = 2.0 * M_PI * s / samples;
      X << std::cos(t), std::sin(t);
    } else {
      for (int k = 0; k < d; ++k) X(k) = gauss(rng);
      if (X.norm() < 1e-12) continue;
      X.normalize();
    }
    const double v = f.value(X);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    best_hi.push_back({v, X});
    best_lo.push_back({v, X});
    std::push_heap(best_hi.begin(), best_hi.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
    if (best_hi.size() > kStarts) {
      std::pop_heap(best_hi.begin(), best_hi.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
      best_hi.pop_back();
    }
    std::push_heap(best_lo.begin(), best_lo.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
    if (best_lo.size() > kStarts) {
      std::pop_heap(best_lo.begin(), best_lo.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
      best_lo.pop_back();
    }
  }

  for (const auto& [v, X] : best_hi) hi = std::max(hi, refine_extremum(f, X, +1.0, 2000));
  for (const auto& [v, X] : best_lo) lo = std::min(lo, refine_extremum(f, X, -1.0, 2000));
  return Sector{lo, hi};
}

}  // namespace quadspec
