#include "quadspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace quadspec {

namespace {

bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

SpectralData finalize(std::vector<Complex> reps, double cluster_radius, double pairing_residual) {
  std::sort(reps.begin(), reps.end(), lex_less);

  // Chain-cluster sorted representatives, then canonicalize each cluster to
  // its mean so that coincident eigenvalues become bitwise identical.
  SpectralData out;
  out.pairing_residual = pairing_residual;
  size_t i = 0;
  while (i < reps.size()) {
    size_t j = i + 1;
    while (j < reps.size() && std::abs(reps[j] - reps[j - 1]) <= cluster_radius) ++j;
    Complex mean = std::accumulate(reps.begin() + i, reps.begin() + j, Complex(0.0, 0.0));
    mean /= static_cast<double>(j - i);
    std::vector<int> cluster;
    for (size_t k = i; k < j; ++k) {
      out.lambdas.push_back(mean);
      cluster.push_back(static_cast<int>(k));
    }
    out.clusters.push_back(std::move(cluster));
    i = j;
  }
  return out;
}

}  // namespace

SpectralData eigen_pairs(const HamiltonMap& fm, const Tolerances& tol) {
  const int n = fm.n;
  if (fm.F.rows() != 2 * n || fm.F.cols() != 2 * n)
    throw DimensionMismatch("eigen_pairs: Hamilton map must be 2n x 2n");

  Eigen::ComplexEigenSolver<Mat> es(fm.F, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigen_pairs: eigenvalue iteration failed");
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + 2 * n);

  const double scale = std::max(1.0, fm.F.norm());
  for (const Complex& l : ev)
    if (std::abs(l.imag()) <= tol.definiteness * scale)
      throw RealEigenvalue("eigen_pairs: eigenvalue on the real axis");

  // Greedy +/- pairing: repeatedly take the largest unpaired eigenvalue and
  // match it with the partner minimizing |a + b|.
  std::vector<int> order(ev.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(ev[a]) > std::abs(ev[b]); });

  std::vector<bool> used(ev.size(), false);
  std::vector<Complex> reps;
  double residual = 0.0;
  for (int idx : order) {
    if (used[idx]) continue;
    used[idx] = true;
    int best = -1;
    double best_miss = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < ev.size(); ++j) {
      if (used[j]) continue;
      const double miss = std::abs(ev[idx] + ev[j]);
      if (miss < best_miss) {
        best_miss = miss;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) throw PairingFailure("eigen_pairs: odd spectrum, nothing left to pair");
    used[best] = true;
    residual = std::max(residual, best_miss);

    const Complex pos = ev[idx].imag() > 0 ? ev[idx] : ev[best];
    const Complex neg = ev[idx].imag() > 0 ? ev[best] : ev[idx];
    if (pos.imag() <= 0 || neg.imag() >= 0)
      throw PairingFailure("eigen_pairs: pair does not straddle the real axis");
    reps.push_back((pos - neg) / 2.0);  // symmetrized representative
  }
  if (residual > tol.pairing * scale)
    throw PairingFailure("eigen_pairs: +/- pairing residual exceeds tolerance");

  return finalize(std::move(reps), tol.cluster * scale, residual);
}

SpectralData declared_spectral_data(std::vector<Complex> lambdas, const Tolerances& tol) {
  if (lambdas.empty()) throw DimensionMismatch("declared_spectral_data: empty eigenvalue list");
  double scale = 1.0;
  for (const Complex& l : lambdas) scale = std::max(scale, std::abs(l));
  for (const Complex& l : lambdas)
    if (l.imag() <= tol.definiteness * scale)
      throw RealEigenvalue("declared_spectral_data: eigenvalues must have Im > 0");
  return finalize(std::move(lambdas), tol.cluster * scale, 0.0);
}

SpectrumList spectrum(const SpectralData& data, double h, double R, double merge_tol_factor) {
  if (h <= 0.0) throw ConfigError("spectrum: h must be positive");
  if (R < 0.0) throw ConfigError("spectrum: radius must be nonnegative");
  const int n = static_cast<int>(data.lambdas.size());

  // w_j = lambda_j / i; ellipticity puts Re w_j > 0, which bounds the search.
  std::vector<Complex> w(n);
  for (int j = 0; j < n; ++j) {
    w[j] = data.lambdas[j] / kImagUnit;
    if (w[j].real() <= 0.0)
      throw UnboundedEnumeration("spectrum: Re(lambda/i) <= 0 makes the lattice sum unbounded");
  }

  // Suffix sums of the minimal contribution Re w_j * 1 for pruning.
  std::vector<double> suffix_min(n + 1, 0.0);
  for (int j = n - 1; j >= 0; --j) suffix_min[j] = suffix_min[j + 1] + w[j].real();

  const double budget = R / h;
  std::vector<Complex> values;

  // Depth-first over nu, pruning on the real part: |h sum| >= h Re(sum), so
  // any branch whose real part already exceeds R/h only contains values
  // outside the disc.
  struct Dfs {
    const std::vector<Complex>& w;
    const std::vector<double>& suffix_min;
    double budget, h, R;
    std::vector<Complex>& values;
    void run(int j, Complex acc, double racc) {
      if (j == static_cast<int>(w.size())) {
        const Complex v = h * acc;
        if (std::abs(v) <= R) values.push_back(v);
        return;
      }
      for (long nu = 0;; ++nu) {
        const double contrib = w[j].real() * (2.0 * nu + 1.0);
        if (racc + contrib + suffix_min[j + 1] > budget) break;
        run(j + 1, acc + w[j] * (2.0 * nu + 1.0), racc + contrib);
      }
    }
  };
  Dfs dfs{w, suffix_min, budget, h, R, values};
  dfs.run(0, Complex(0.0, 0.0), 0.0);

  std::sort(values.begin(), values.end(), lex_less);

  SpectrumList out;
  out.h = h;
  out.radius = R;
  const double merge_tol = merge_tol_factor * h;
  size_t i = 0;
  while (i < values.size()) {
    size_t j = i + 1;
    while (j < values.size() && std::abs(values[j] - values[j - 1]) <= merge_tol) ++j;
    out.points.push_back({values[i], static_cast<long>(j - i)});
    i = j;
  }
  return out;
}

double dist_to_spectrum(Complex z, const SpectrumList& spec) {
  if (spec.points.empty()) throw EmptySpectrum("dist_to_spectrum: empty spectrum list");
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : spec.points) d = std::min(d, std::abs(z - p.value));
  // The disc certifies the answer only if no point outside can be closer.
  if (d > spec.radius - std::abs(z))
    throw OutOfRadius("dist_to_spectrum: nearest point may lie outside the enumeration radius");
  return d;
}

}  // namespace quadspec
