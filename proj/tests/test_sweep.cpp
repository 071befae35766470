#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "quadspec/io.hpp"
#include "quadspec/sweep.hpp"

using namespace quadspec;

namespace {

SweepInput oscillator_input() {
  return make_input(QuadraticForm(1, 0.5 * Mat::Identity(2, 2)));
}

SweepConfig point_config(double h, Complex z) {
  SweepConfig cfg;
  cfg.h_values = {h};
  cfg.grid.re_min = cfg.grid.re_max = z.real();
  cfg.grid.im_min = cfg.grid.im_max = z.imag();
  cfg.grid.nx = cfg.grid.ny = 1;
  cfg.N_max = 24;
  return cfg;
}

}  // namespace

TEST_CASE("sweep input from the reduction pipeline") {
  const SweepInput in = oscillator_input();
  CHECK(in.n == 1);
  CHECK(std::abs(in.M(0, 0) - kImagUnit) < 1e-12);
  CHECK(in.C0 == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(in.C1 == doctest::Approx(4.0).epsilon(1e-10));
  REQUIRE(in.lambdas.size() == 1);
  CHECK(std::abs(in.lambdas[0] - Complex(0.0, 0.5)) < 1e-12);
  CHECK(in.phi1.is_radial());
}

TEST_CASE("sweep input from a reduced matrix") {
  Mat M(1, 1);
  M << kImagUnit;
  const SweepInput in = make_input(M);
  CHECK(in.C0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(in.C1 == doctest::Approx(2.0).epsilon(1e-12));  // flat weight: Phi = |x|^2/2
  CHECK(std::abs(in.lambdas[0] - Complex(0.0, 0.5)) < 1e-14);

  // A lower half-plane symbol already fails the ellipticity screen, which
  // runs before the eigenvalue enumeration guard.
  Mat bad(1, 1);
  bad << -kImagUnit;
  CHECK_THROWS_AS(make_input(bad), EllipticityViolated);
}

TEST_CASE("resolvent equals reciprocal distance for a normal operator") {
  const SweepInput in = oscillator_input();
  for (double h : {0.2, 0.1, 0.05}) {
    const SweepResult res = sweep(in, point_config(h, Complex(0.2, 0.0)));
    REQUIRE(res.rows.size() == 1);
    const SweepRow& row = res.rows[0];
    CHECK(row.converged);
    CHECK(row.resnorm_flat * row.dist_spec == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(row.N_used == 24);
    CHECK(row.nu_total == 24);
    CHECK_FALSE(row.has_gram);
  }
}

TEST_CASE("regime flag follows the working radius") {
  Mat M(1, 1);
  M << kImagUnit;
  const SweepInput in = make_input(M);  // C0 = 1, threshold 1/8
  SweepConfig near = point_config(0.1, Complex(0.03, 0.02));
  const SweepRow in_row = sweep(in, near).rows[0];
  CHECK_FALSE(in_row.out_of_regime);

  SweepConfig far = point_config(0.1, Complex(0.2, 0.0));
  CHECK(sweep(in, far).rows[0].out_of_regime);
}

TEST_CASE("small h needs explicit consent") {
  const SweepInput in = oscillator_input();
  SweepConfig cfg = point_config(0.01, Complex(0.2, 0.0));
  CHECK_THROWS_AS(sweep(in, cfg), ConfigError);
  cfg.allow_small_h = true;
  CHECK(sweep(in, cfg).rows.size() == 1);
}

TEST_CASE("spectral hits are reported, not fatal") {
  const SweepInput in = oscillator_input();
  const SweepResult res = sweep(in, point_config(0.1, Complex(0.25, 0.0)));
  const SweepRow& row = res.rows[0];
  CHECK(row.spectral_hit);
  CHECK(row.dist_spec == 0.0);
  CHECK(std::isinf(row.resnorm_flat));
  CHECK_FALSE(row.converged);
}

TEST_CASE("gram norms coincide with flat norms for the flat weight") {
  Mat M(1, 1);
  M << kImagUnit;
  const SweepInput in = make_input(M);
  SweepConfig cfg = point_config(0.1, Complex(0.2, 0.0));
  cfg.norm_mode = NormMode::gram;
  const SweepRow row = sweep(in, cfg).rows[0];
  CHECK(row.has_gram);
  CHECK(row.resnorm_gram == doctest::Approx(row.resnorm_flat).epsilon(1e-10));
}

TEST_CASE("row order is deterministic across thread counts") {
  const SweepInput in = oscillator_input();
  SweepConfig cfg;
  cfg.h_values = {0.2, 0.1};
  cfg.grid = {-0.4, 0.6, -0.2, 0.2, 3, 2};
  cfg.N_max = 16;
  cfg.threads = 1;
  const SweepResult one = sweep(in, cfg);
  cfg.threads = 4;
  const SweepResult four = sweep(in, cfg);
  REQUIRE(one.rows.size() == 12);
  CHECK(sweep_csv(one) == sweep_csv(four));

  // h-major, then imaginary row, then real column.
  CHECK(one.rows[0].h == 0.2);
  CHECK(one.rows[6].h == 0.1);
  CHECK(one.rows[0].z.real() == doctest::Approx(-0.4));
  CHECK(one.rows[0].z.imag() == doctest::Approx(-0.2));
  CHECK(one.rows[1].z.real() == doctest::Approx(0.1));
  CHECK(one.rows[3].z.imag() == doctest::Approx(0.2));
}

TEST_CASE("scaling fits recover synthetic laws") {
  std::vector<SweepRow> rows;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    SweepRow r;
    r.h = h;
    r.converged = true;
    r.resnorm_flat = std::exp(2.0 / h + 0.3);
    r.resnorm_gram = std::exp(1.5 * std::log(1.0 / h) / h - 0.2);
    r.has_gram = true;
    rows.push_back(r);
  }
  const ScalingFit fa = scaling_fit(rows, ScalingModel::inv_h);
  CHECK(fa.A == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(fa.intercept == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(fa.residual < 1e-9);
  CHECK(fa.points == 4);

  const ScalingFit fb = scaling_fit(rows, ScalingModel::inv_h_log, /*use_gram=*/true);
  CHECK(fb.A == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(fb.intercept == doctest::Approx(-0.2).epsilon(1e-6));
  CHECK(fb.residual < 1e-9);

  rows.resize(2);
  CHECK_THROWS_AS(scaling_fit(rows, ScalingModel::inv_h), InsufficientData);
}

TEST_CASE("worked example values") {
  const ExampleReport two = example_case(2);
  CHECK(two.h == doctest::Approx(0.5));
  CHECK(two.closed_form == doctest::Approx(28.0).epsilon(1e-14));
  CHECK(two.squared_norm == doctest::Approx(28.0).epsilon(1e-12));
  CHECK(two.rel_error < 1e-12);
  CHECK(two.exceeds_factorial);

  const ExampleReport four = example_case(4);
  CHECK(four.closed_form == doctest::Approx(11984.0).epsilon(1e-14));
  CHECK(four.squared_norm == doctest::Approx(11984.0).epsilon(1e-12));
  CHECK(four.factorial == doctest::Approx(24.0));
}

TEST_CASE("contour projection on an isolated eigenvalue") {
  const SweepInput in = oscillator_input();
  const ProjectionReport rep =
      spectral_projection(in, 0.1, Complex(0.35, 0.0), 0.05, 64, 8);
  CHECK(rep.norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.idempotency < 1e-10);
  CHECK(rep.stability < 1e-10);

  CHECK_THROWS_AS(spectral_projection(in, 0.1, Complex(0.35, 0.0), 0.1, 64, 8),
                  ContourHitsSpectrum);
  CHECK_THROWS_AS(spectral_projection(in, 0.1, Complex(0.35, 0.0), 0.1 + 5e-8, 64, 8),
                  NotSeparated);
}
