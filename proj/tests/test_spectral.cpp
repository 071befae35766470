#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "quadspec/spectral.hpp"

using namespace quadspec;

namespace {

HamiltonMap oscillator_map() {
  Mat Q = 0.5 * Mat::Identity(2, 2);
  return hamilton_map(QuadraticForm(1, Q));
}

// Hamilton map of the reduced two-variable form (M x) . xi with
// M = [[i, 1], [0, i]]: Q = (1/2) [[0, M^T], [M, 0]].
HamiltonMap jordan_map() {
  Mat M(2, 2);
  M << kImagUnit, Complex(1.0, 0.0), Complex(0.0, 0.0), kImagUnit;
  Mat Q = Mat::Zero(4, 4);
  Q.topRightCorner(2, 2) = 0.5 * M.transpose();
  Q.bottomLeftCorner(2, 2) = 0.5 * M;
  return hamilton_map(QuadraticForm(2, Q));
}

}  // namespace

TEST_CASE("eigen pairs of the oscillator") {
  const SpectralData sd = eigen_pairs(oscillator_map());
  REQUIRE(sd.lambdas.size() == 1);
  CHECK(std::abs(sd.lambdas[0] - Complex(0.0, 0.5)) < 1e-14);
  CHECK(sd.pairing_residual < 1e-12);
}

TEST_CASE("eigen pairs of a defective double eigenvalue") {
  // 2F has the double eigenvalue i on the Jordan example, so the upper
  // representatives are i/2 twice. A defective pair splits by about the
  // square root of the backward error, so only the values are asserted;
  // exact multiplicity structure is the declared-input path's job.
  const SpectralData sd = eigen_pairs(jordan_map());
  REQUIRE(sd.lambdas.size() == 2);
  CHECK(std::abs(sd.lambdas[0] - Complex(0.0, 0.5)) < 1e-7);
  CHECK(std::abs(sd.lambdas[1] - Complex(0.0, 0.5)) < 1e-7);
}

TEST_CASE("clustering of a semisimple double eigenvalue") {
  // Two identical oscillators: i/2 twice, no defectiveness, one cluster.
  const SpectralData sd = eigen_pairs(hamilton_map(QuadraticForm(2, 0.5 * Mat::Identity(4, 4))));
  REQUIRE(sd.lambdas.size() == 2);
  CHECK(std::abs(sd.lambdas[0] - Complex(0.0, 0.5)) < 1e-13);
  CHECK(std::abs(sd.lambdas[1] - Complex(0.0, 0.5)) < 1e-13);
  REQUIRE(sd.clusters.size() == 1);
  CHECK(sd.clusters[0].size() == 2);
}

TEST_CASE("eigen pairs of two separated oscillators") {
  // F with eigenvalues {i, -i, 2i, -2i}: direct sum of scaled oscillators.
  Mat Q = Mat::Zero(4, 4);
  Q(0, 0) = 1.0;
  Q(2, 2) = 1.0;
  Q(1, 1) = 2.0;
  Q(3, 3) = 2.0;
  const SpectralData sd = eigen_pairs(hamilton_map(QuadraticForm(2, Q)));
  REQUIRE(sd.lambdas.size() == 2);
  CHECK(std::abs(sd.lambdas[0] - Complex(0.0, 1.0)) < 1e-12);
  CHECK(std::abs(sd.lambdas[1] - Complex(0.0, 2.0)) < 1e-12);
  CHECK(sd.clusters.size() == 2);
}

TEST_CASE("real eigenvalues are rejected") {
  // q = x.xi has Hamilton eigenvalues +-1/2 on the real axis.
  Mat Q(2, 2);
  Q << 0.0, 0.5, 0.5, 0.0;
  CHECK_THROWS_AS(eigen_pairs(hamilton_map(QuadraticForm(1, Q))), RealEigenvalue);
}

TEST_CASE("pairing symmetry under negation") {
  HamiltonMap fm = jordan_map();
  HamiltonMap neg{fm.n, -fm.F};
  const SpectralData a = eigen_pairs(fm);
  const SpectralData b = eigen_pairs(neg);
  REQUIRE(a.lambdas.size() == b.lambdas.size());
  for (size_t i = 0; i < a.lambdas.size(); ++i)
    CHECK(std::abs(a.lambdas[i] - b.lambdas[i]) < 1e-7);
}

TEST_CASE("declared data bypasses pairing") {
  const SpectralData sd = declared_spectral_data({Complex(0.0, 0.5), Complex(0.0, 0.5)});
  CHECK(sd.lambdas.size() == 2);
  CHECK(sd.clusters.size() == 1);
  CHECK(sd.pairing_residual == 0.0);
  CHECK_THROWS_AS(declared_spectral_data({Complex(1.0, 0.0)}), RealEigenvalue);
}

TEST_CASE("oscillator spectrum in a small disc") {
  const SpectralData sd = declared_spectral_data({Complex(0.0, 0.5)});
  const SpectrumList spec = spectrum(sd, 0.1, 0.55);
  REQUIRE(spec.points.size() == 6);
  for (int k = 0; k < 6; ++k) {
    CHECK(std::abs(spec.points[k].value - Complex(0.05 + 0.1 * k, 0.0)) < 1e-12);
    CHECK(spec.points[k].multiplicity == 1);
  }
}

TEST_CASE("degenerate spectrum carries lattice multiplicities") {
  // lambda_1 = lambda_2 = i/2: values h(m+1) with multiplicity m+1.
  const SpectralData sd = declared_spectral_data({Complex(0.0, 0.5), Complex(0.0, 0.5)});
  const SpectrumList spec = spectrum(sd, 0.25, 1.1);
  REQUIRE(spec.points.size() == 4);
  for (int m = 0; m < 4; ++m) {
    CHECK(std::abs(spec.points[m].value - Complex(0.25 * (m + 1), 0.0)) < 1e-12);
    CHECK(spec.points[m].multiplicity == m + 1);
  }
}

TEST_CASE("empty disc below the ground state") {
  const SpectralData sd = declared_spectral_data({Complex(0.0, 0.5)});
  CHECK(spectrum(sd, 0.1, 0.04).points.empty());
}

TEST_CASE("enumeration unbounded without decay") {
  SpectralData bad;
  bad.lambdas = {Complex(0.0, -0.5)};
  bad.clusters = {{0}};
  CHECK_THROWS_AS(spectrum(bad, 0.1, 1.0), UnboundedEnumeration);
}

TEST_CASE("enumeration exhaustive under radius doubling") {
  const SpectralData sd =
      declared_spectral_data({Complex(0.1, 0.7), Complex(-0.3, 1.1), Complex(0.05, 0.4)});
  const double h = 0.21, R = 3.0;
  const SpectrumList small = spectrum(sd, h, R);
  const SpectrumList big = spectrum(sd, h, 2.0 * R);
  std::vector<SpectrumList::Point> filtered;
  for (const auto& p : big.points)
    if (std::abs(p.value) <= R) filtered.push_back(p);
  REQUIRE(small.points.size() == filtered.size());
  for (size_t i = 0; i < filtered.size(); ++i) {
    CHECK(std::abs(small.points[i].value - filtered[i].value) < 1e-14);
    CHECK(small.points[i].multiplicity == filtered[i].multiplicity);
  }
}

TEST_CASE("total multiplicity matches a brute force box") {
  const std::vector<Complex> lambdas = {Complex(0.2, 0.6), Complex(-0.1, 0.9)};
  const SpectralData sd = declared_spectral_data(lambdas);
  const double h = 0.3, R = 4.0;
  const SpectrumList spec = spectrum(sd, h, R);
  long total = 0;
  for (const auto& p : spec.points) total += p.multiplicity;

  long brute = 0;
  const long box = static_cast<long>(R / h) + 2;
  for (long a = 0; a <= box; ++a)
    for (long b = 0; b <= box; ++b) {
      const Complex v = h * ((lambdas[0] / kImagUnit) * (2.0 * a + 1.0) +
                             (lambdas[1] / kImagUnit) * (2.0 * b + 1.0));
      if (std::abs(v) <= R) ++brute;
    }
  CHECK(total == brute);
}

TEST_CASE("spectrum stays inside the right half plane sector") {
  // For lambdas with Re(lambda/i) > 0 every point has positive real part.
  const SpectralData sd = declared_spectral_data({Complex(0.1, 0.7), Complex(0.0, 0.5)});
  const SpectrumList spec = spectrum(sd, 0.17, 3.0);
  CHECK(!spec.points.empty());
  for (const auto& p : spec.points) CHECK(p.value.real() > 0.0);
}

TEST_CASE("distance to the spectrum") {
  const SpectralData sd = declared_spectral_data({Complex(0.0, 0.5)});
  const SpectrumList spec = spectrum(sd, 0.1, 2.0);
  CHECK(dist_to_spectrum(Complex(0.2, 0.0), spec) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(dist_to_spectrum(spec.points[3].value, spec) == 0.0);
  // z = 1 against the h = 1/4 ladder h(nu + 1/2): nearest point at h/2.
  const SpectrumList unit = spectrum(declared_spectral_data({Complex(0.0, 0.5)}), 0.25, 2.0);
  CHECK(dist_to_spectrum(Complex(1.0, 0.0), unit) == doctest::Approx(0.125).epsilon(1e-12));
  // z = 1 against the degenerate lattice h(m+1): exactly on a point.
  const SpectrumList fused =
      spectrum(declared_spectral_data({Complex(0.0, 0.5), Complex(0.0, 0.5)}), 0.25, 2.0);
  CHECK(dist_to_spectrum(Complex(1.0, 0.0), fused) == 0.0);

  CHECK_THROWS_AS(dist_to_spectrum(Complex(1.99, 0.0), spec), OutOfRadius);
  SpectrumList empty;
  empty.h = 0.1;
  empty.radius = 0.04;
  CHECK_THROWS_AS(dist_to_spectrum(Complex(0.0, 0.0), empty), EmptySpectrum);
}
