#include <benchmark/benchmark.h>

#include <random>

#include <Eigen/SVD>

#include "quadspec/fock.hpp"
#include "quadspec/normal_form.hpp"
#include "quadspec/quadratic_form.hpp"
#include "quadspec/sweep.hpp"

namespace {

using namespace quadspec;

Mat jordan(int n, Complex lambda) {
  Mat M = lambda * Mat::Identity(n, n);
  for (int k = 0; k + 1 < n; ++k) M(k, k + 1) = Complex(1.0, 0.0);
  return M;
}

QuadraticForm random_elliptic(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const int d = 2 * n;
  RealMat A(d, d), S(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      A(i, j) = g(rng);
      S(i, j) = g(rng);
    }
  RealMat re = A.transpose() * A / d + 0.2 * RealMat::Identity(d, d);
  RealMat im = 0.15 * (S + S.transpose());
  return QuadraticForm(n, re.cast<Complex>() + kImagUnit * im.cast<Complex>());
}

void BM_WeylBlock(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const Mat M = jordan(n, Complex(0.2, 1.0));
  for (auto _ : state) {
    FockBlock blk = weyl_block(M, 0.1, m);
    benchmark::DoNotOptimize(blk.A.data());
  }
  state.SetComplexityN(basis_dimension(n, m));
}

void BM_ResolventBlock(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const FockBlock blk = weyl_block(jordan(2, Complex(0.2, 1.0)), 0.1, m);
  const Complex z(-0.4, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(resolvent_block(blk, z));
}

void BM_GramMatrix(benchmark::State& state) {
  const int max_deg = static_cast<int>(state.range(0));
  WeightForm w = WeightForm::radial(2, 0.5);
  w.G(0, 1) = w.G(1, 0) = 0.12;
  for (auto _ : state) {
    GramMatrix gm = gram_matrix(w, 1.0, 0, max_deg);
    benchmark::DoNotOptimize(gm.G.data());
  }
}

void BM_Reduce(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const QuadraticForm q = random_elliptic(n, 1234u + static_cast<unsigned>(n));
  for (auto _ : state) {
    NormalFormResult nf = reduce(q);
    benchmark::DoNotOptimize(nf.M.data());
  }
}

void BM_SweepPoint(benchmark::State& state) {
  const SweepInput input = make_input(QuadraticForm(1, 0.5 * Mat::Identity(2, 2)));
  SweepConfig cfg;
  cfg.h_values = {0.1};
  cfg.grid = ZGrid{-0.4, -0.4, 0.1, 0.1, 1, 1};
  cfg.N_max = static_cast<long>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) {
    SweepResult res = sweep(input, cfg);
    benchmark::DoNotOptimize(res.rows.data());
  }
}

BENCHMARK(BM_WeylBlock)->Args({2, 8})->Args({2, 16})->Args({3, 8})->Args({3, 12});
BENCHMARK(BM_ResolventBlock)->Arg(8)->Arg(16)->Arg(24);
BENCHMARK(BM_GramMatrix)->Arg(6)->Arg(10)->Arg(14);
BENCHMARK(BM_Reduce)->Arg(1)->Arg(2)->Arg(3);
BENCHMARK(BM_SweepPoint)->Arg(16)->Arg(48);

}  // namespace

BENCHMARK_MAIN();
