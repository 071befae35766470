#include "quadspec/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace quadspec {

SweepInput make_input(const QuadraticForm& q, const ReduceOptions& opts) {
  NormalFormResult nf = reduce(q, opts);
  SweepInput in;
  in.n = nf.n;
  in.M = nf.M;
  in.phi1 = nf.phi1;
  in.C0 = nf.C0;
  in.C1 = nf.C1;
  in.lambdas = nf.spectral.lambdas;
  return in;
}

SweepInput make_input(const Mat& M, const Tolerances& tol) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n) throw DimensionMismatch("make_input: M must be square");
  SweepInput in;
  in.n = n;
  in.M = M;
  in.phi1 = WeightForm::flat(n);
  const EllipticityConstants ec = ellipticity_constants(M, in.phi1);
  in.C0 = ec.C0;
  in.C1 = ec.C1;

  Eigen::ComplexEigenSolver<Mat> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalError("make_input: eigensolve failed");
  for (int k = 0; k < n; ++k) {
    const Complex lambda = es.eigenvalues()(k) / 2.0;
    if (lambda.imag() <= tol.definiteness * std::max(1.0, M.norm()))
      throw UnboundedEnumeration("make_input: eigenvalues must lie in the upper half plane");
    in.lambdas.push_back(lambda);
  }
  std::sort(in.lambdas.begin(), in.lambdas.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return in;
}

namespace {

double nearest_distance(Complex z, const SpectrumList& spec) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : spec.points) best = std::min(best, std::abs(z - p.value));
  return best;
}

long degree_boundary(const GramMatrix& gm, long N) {
  // Rows covering degrees < N when the matrix starts at degree 0.
  if (N - 1 >= gm.max_degree) return gm.size();
  return gm.offset(static_cast<int>(N));
}

double full_gram_resolvent(const GramMatrix& full, const std::vector<Mat>& blocks, long N,
                           Complex z, double guard) {
  const long S = degree_boundary(full, N);
  Mat Z = Mat::Zero(S, S);
  long off = 0;
  for (long m = 0; m < N; ++m) {
    const long sz = blocks[m].rows();
    Z.block(off, off, sz, sz) = z * Mat::Identity(sz, sz) - blocks[m];
    off += sz;
  }
  Eigen::LLT<Mat> llt(full.G.topLeftCorner(S, S));
  if (llt.info() != Eigen::Success)
    throw IllConditionedGram("sweep: Gram slice is not positive definite");
  const Mat L = llt.matrixL();
  const Mat Linv_h = L.adjoint().triangularView<Eigen::Upper>().solve(Mat::Identity(S, S));
  const Mat W = L.adjoint() * Z * Linv_h;
  Eigen::JacobiSVD<Mat> svd(W);
  const double smin = svd.singularValues()(S - 1);
  if (smin <= guard * std::max(1.0, svd.singularValues()(0)))
    throw SpectralPointHit("sweep: z hits the truncated spectrum");
  return 1.0 / smin;
}

struct CellContext {
  const SweepInput* input;
  const SweepConfig* config;
  const std::vector<SpectrumList>* spectra;
  const std::vector<GramMatrix>* per_degree;
  const GramMatrix* full;
  bool gram_mode = false;
  bool radial = false;
};

SweepRow evaluate_cell(const CellContext& ctx, long h_index, double h, Complex z) {
  const SweepConfig& cfg = *ctx.config;
  const SweepInput& in = *ctx.input;

  SweepRow row;
  row.h = h;
  row.z = z;
  row.out_of_regime = std::abs(z) > cfg.K * cfg.K / (8.0 * in.C0);
  row.dist_spec = nearest_distance(z, (*ctx.spectra)[h_index]);

  const long N0 = min_vanishing_order(cfg.K, in.C1, h);
  const long N_init = std::max<long>(1, std::min(N0, cfg.N_max));
  const long chunk = 4;
  const long baseline_N = N_init - chunk;

  double flat_running = 0.0;
  double gram_running = 0.0;
  long nu = 0;
  bool hit = false;
  std::vector<Mat> stored;  // block matrices, kept for the cross-degree norm

  const auto eval_block = [&](long m) {
    FockBlock blk = weyl_block(in.M, h, static_cast<int>(m));
    nu += blk.basis.size();
    try {
      flat_running = std::max(flat_running,
                              resolvent_block(blk, z, nullptr, cfg.tol.spectral_guard));
      if (ctx.gram_mode && ctx.radial)
        gram_running = std::max(
            gram_running,
            resolvent_block(blk, z, &(*ctx.per_degree)[m], cfg.tol.spectral_guard));
    } catch (const SpectralPointHit&) {
      hit = true;
      return;
    }
    if (ctx.gram_mode && !ctx.radial) stored.push_back(std::move(blk.A));
  };

  double base = 0.0;
  bool have_base = false;
  long N = 0;
  for (long m = 0; m < N_init && !hit; ++m) {
    if (m == baseline_N) {
      base = flat_running;
      have_base = true;
    }
    eval_block(m);
    N = m + 1;
  }

  double cur = flat_running;
  bool converged =
      !hit && have_base && std::abs(cur - base) <= cfg.stabilization_tol * std::max(1.0, cur);
  while (!hit && !converged && N < cfg.N_max) {
    const long next_N = std::min(N + chunk, cfg.N_max);
    const double prev = cur;
    for (long m = N; m < next_N && !hit; ++m) eval_block(m);
    N = next_N;
    cur = flat_running;
    converged = !hit && std::abs(cur - prev) <= cfg.stabilization_tol * std::max(1.0, cur);
  }

  row.N_used = N;
  row.nu_total = nu;
  if (hit) {
    row.spectral_hit = true;
    row.dist_spec = 0.0;
    row.resnorm_flat = std::numeric_limits<double>::infinity();
    if (ctx.gram_mode) {
      row.resnorm_gram = std::numeric_limits<double>::infinity();
      row.has_gram = true;
    }
    row.converged = false;
    return row;
  }

  row.resnorm_flat = cur;
  row.converged = converged;
  if (ctx.gram_mode) {
    row.has_gram = true;
    if (ctx.radial) {
      row.resnorm_gram = gram_running;
    } else {
      try {
        row.resnorm_gram = full_gram_resolvent(*ctx.full, stored, N, z, cfg.tol.spectral_guard);
      } catch (const SpectralPointHit&) {
        row.spectral_hit = true;
        row.dist_spec = 0.0;
        row.resnorm_gram = std::numeric_limits<double>::infinity();
        row.converged = false;
      }
    }
  }
  return row;
}

}  // namespace

SweepResult sweep(const SweepInput& input, const SweepConfig& config) {
  if (config.h_values.empty()) throw ConfigError("sweep: no h values");
  for (double h : config.h_values) {
    if (h <= 0.0) throw ConfigError("sweep: h must be positive");
    if (h < 0.02 && !config.allow_small_h)
      throw ConfigError("sweep: h below 0.02 rejected (set allow_small_h to override)");
  }
  if (config.grid.nx < 1 || config.grid.ny < 1) throw ConfigError("sweep: grid counts must be >= 1");
  if (!(config.stabilization_tol > 0.0 && config.stabilization_tol < 1.0))
    throw ConfigError("sweep: stabilization_tol must lie in (0, 1)");
  if (config.N_max < 1) throw ConfigError("sweep: N_max must be >= 1");
  if (config.K <= 0.0) throw ConfigError("sweep: K must be positive");
  if (config.threads < 1) throw ConfigError("sweep: thread count must be >= 1");

  SweepResult out;
  out.config = config;
  out.C0 = input.C0;
  out.C1 = input.C1;

  std::vector<Complex> zs;
  zs.reserve(static_cast<size_t>(config.grid.nx) * config.grid.ny);
  for (int iy = 0; iy < config.grid.ny; ++iy) {
    const double im = config.grid.ny > 1
                          ? config.grid.im_min +
                                iy * (config.grid.im_max - config.grid.im_min) /
                                    (config.grid.ny - 1)
                          : config.grid.im_min;
    for (int ix = 0; ix < config.grid.nx; ++ix) {
      const double re = config.grid.nx > 1
                            ? config.grid.re_min +
                                  ix * (config.grid.re_max - config.grid.re_min) /
                                      (config.grid.nx - 1)
                            : config.grid.re_min;
      zs.emplace_back(re, im);
    }
  }
  double zmax = 0.0;
  for (const Complex& z : zs) zmax = std::max(zmax, std::abs(z));

  Complex ground(0.0, 0.0);
  for (const Complex& l : input.lambdas) ground += l / kImagUnit;

  const SpectralData sd = declared_spectral_data(input.lambdas, config.tol);
  std::vector<SpectrumList> spectra;
  spectra.reserve(config.h_values.size());
  for (double h : config.h_values)
    spectra.push_back(spectrum(sd, h, zmax + h * std::abs(ground) + 1.0));

  CellContext ctx;
  ctx.input = &input;
  ctx.config = &config;
  ctx.spectra = &spectra;
  ctx.gram_mode = config.norm_mode == NormMode::gram;
  ctx.radial = input.phi1.is_radial();

  std::vector<GramMatrix> per_degree;
  GramMatrix full;
  if (ctx.gram_mode) {
    // Gram entries in the normalized basis do not depend on h, so one table
    // serves every cell.
    if (ctx.radial) {
      for (long m = 0; m < config.N_max; ++m)
        per_degree.push_back(gram_matrix(input.phi1, 1.0, static_cast<int>(m),
                                         static_cast<int>(m)));
      ctx.per_degree = &per_degree;
    } else {
      full = gram_matrix(input.phi1, 1.0, 0, static_cast<int>(config.N_max - 1));
      ctx.full = &full;
    }
  }

  const size_t cells = config.h_values.size() * zs.size();
  out.rows.resize(cells);

  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const auto worker = [&]() {
    for (size_t k = next.fetch_add(1); k < cells; k = next.fetch_add(1)) {
      try {
        const size_t hi = k / zs.size();
        const size_t zi = k % zs.size();
        out.rows[k] =
            evaluate_cell(ctx, static_cast<long>(hi), config.h_values[hi], zs[zi]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int nthreads = static_cast<int>(
      std::min<size_t>(static_cast<size_t>(config.threads), std::max<size_t>(1, cells)));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

ScalingFit scaling_fit(const std::vector<SweepRow>& rows, ScalingModel model, bool use_gram) {
  std::vector<double> xs, ys;
  for (const SweepRow& r : rows) {
    if (!r.converged) continue;
    const double v = use_gram ? r.resnorm_gram : r.resnorm_flat;
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    const double invh = 1.0 / r.h;
    xs.push_back(model == ScalingModel::inv_h ? invh : invh * std::log(invh));
    ys.push_back(std::log(v));
  }
  const long pts = static_cast<long>(xs.size());
  if (pts < 3) throw InsufficientData("scaling_fit: need at least three converged rows");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (long i = 0; i < pts; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = pts * sxx - sx * sx;
  if (std::abs(det) <= 1e-300) throw InsufficientData("scaling_fit: degenerate abscissae");
  ScalingFit fit;
  fit.model = model;
  fit.points = pts;
  fit.A = (pts * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  double ss = 0.0;
  for (long i = 0; i < pts; ++i) {
    const double e = ys[i] - (fit.A * xs[i] + fit.intercept);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / pts);
  return fit;
}

ExampleReport example_case(int m) {
  if (m < 1) throw ConfigError("example_case: m must be >= 1");
  Mat M(2, 2);
  M << kImagUnit, Complex(1.0, 0.0), Complex(0.0, 0.0), kImagUnit;
  const double h = 1.0 / m;
  const Complex z(1.0, 0.0);

  const FockBlock blk = weyl_block(M, h, m);
  const long S = blk.A.rows();
  Vec rhs = Vec::Zero(S);
  rhs(blk.basis.position(std::vector<int>{m, 0})) = Complex(1.0, 0.0);
  const Vec u = (blk.A - z * Mat::Identity(S, S)).partialPivLu().solve(rhs);

  ExampleReport rep;
  rep.m = m;
  rep.h = h;
  rep.squared_norm = u.squaredNorm();

  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j <= m; ++j) {
    term *= static_cast<double>(j) * (m - j + 1);
    sum += term;
  }
  rep.closed_form = sum / (h * h);
  rep.rel_error = std::abs(rep.squared_norm - rep.closed_form) / rep.closed_form;

  double fact = 1.0;
  for (int j = 2; j <= m; ++j) fact *= j;
  rep.factorial = fact;
  rep.exceeds_factorial = std::sqrt(rep.squared_norm) >= fact;
  return rep;
}

ProjectionReport spectral_projection(const SweepInput& input, double h, Complex z0,
                                     double radius, int quad_points, long N, NormMode mode,
                                     const Tolerances& tol) {
  if (h <= 0.0) throw ConfigError("spectral_projection: h must be positive");
  if (radius <= 0.0) throw ConfigError("spectral_projection: radius must be positive");
  if (quad_points < 4) throw ConfigError("spectral_projection: need at least 4 quadrature points");
  if (N < 1) throw ConfigError("spectral_projection: N must be >= 1");

  std::vector<FockBlock> blocks;
  blocks.reserve(N);
  double scale = std::abs(z0) + radius;
  double min_annulus = std::numeric_limits<double>::infinity();
  for (long m = 0; m < N; ++m) {
    blocks.push_back(weyl_block(input.M, h, static_cast<int>(m)));
    Eigen::ComplexEigenSolver<Mat> es(blocks.back().A, /*computeEigenvectors=*/false);
    for (long k = 0; k < blocks.back().A.rows(); ++k) {
      const Complex ev = es.eigenvalues()(k);
      scale = std::max(scale, std::abs(ev));
      min_annulus = std::min(min_annulus, std::abs(std::abs(ev - z0) - radius));
    }
  }
  if (min_annulus <= 1e-12 * std::max(1.0, scale))
    throw ContourHitsSpectrum("spectral_projection: an eigenvalue lies on the contour");
  if (min_annulus <= 1e-6 * radius)
    throw NotSeparated("spectral_projection: contour passes too close to the spectrum");

  const double tau = 2.0 * std::acos(-1.0);
  const auto assemble = [&](int npts) {
    std::vector<Mat> pis;
    pis.reserve(blocks.size());
    for (const FockBlock& blk : blocks) {
      const long S = blk.A.rows();
      Mat Pi = Mat::Zero(S, S);
      for (int k = 0; k < npts; ++k) {
        const double theta = tau * k / npts;
        const Complex w = std::polar(1.0, theta);
        const Complex zk = z0 + radius * w;
        Pi += w * (zk * Mat::Identity(S, S) - blk.A).partialPivLu().solve(Mat::Identity(S, S));
      }
      Pi *= radius / npts;
      pis.push_back(std::move(Pi));
    }
    return pis;
  };

  const std::vector<Mat> pi1 = assemble(quad_points);
  const std::vector<Mat> pi2 = assemble(2 * quad_points);

  const auto flat_norm = [](const std::vector<Mat>& pis, bool idem) {
    double v = 0.0;
    for (const Mat& P : pis) {
      const Mat W = idem ? Mat(P * P - P) : P;
      Eigen::JacobiSVD<Mat> svd(W);
      v = std::max(v, svd.singularValues()(0));
    }
    return v;
  };

  ProjectionReport rep;
  if (mode == NormMode::flat) {
    rep.norm = flat_norm(pi1, false);
    rep.norm_doubled = flat_norm(pi2, false);
    rep.idempotency = flat_norm(pi1, true);
  } else {
    const bool radial = input.phi1.is_radial();
    const auto gram_norm = [&](const std::vector<Mat>& pis, bool idem) {
      double v = 0.0;
      if (radial) {
        for (size_t m = 0; m < pis.size(); ++m) {
          const GramMatrix gm =
              gram_matrix(input.phi1, 1.0, static_cast<int>(m), static_cast<int>(m));
          Eigen::LLT<Mat> llt(gm.G);
          if (llt.info() != Eigen::Success)
            throw IllConditionedGram("spectral_projection: Gram block not positive definite");
          const Mat L = llt.matrixL();
          const long S = pis[m].rows();
          const Mat Linv_h =
              L.adjoint().triangularView<Eigen::Upper>().solve(Mat::Identity(S, S));
          Mat W = L.adjoint() * pis[m] * Linv_h;
          if (idem) W = W * W - W;
          Eigen::JacobiSVD<Mat> svd(W);
          v = std::max(v, svd.singularValues()(0));
        }
        return v;
      }
      long total = 0;
      for (const Mat& P : pis) total += P.rows();
      Mat full = Mat::Zero(total, total);
      long off = 0;
      for (const Mat& P : pis) {
        full.block(off, off, P.rows(), P.rows()) = P;
        off += P.rows();
      }
      const GramMatrix gm = gram_matrix(input.phi1, 1.0, 0, static_cast<int>(N - 1));
      Eigen::LLT<Mat> llt(gm.G);
      if (llt.info() != Eigen::Success)
        throw IllConditionedGram("spectral_projection: Gram not positive definite");
      const Mat L = llt.matrixL();
      const Mat Linv_h =
          L.adjoint().triangularView<Eigen::Upper>().solve(Mat::Identity(total, total));
      Mat W = L.adjoint() * full * Linv_h;
      if (idem) W = W * W - W;
      Eigen::JacobiSVD<Mat> svd(W);
      return svd.singularValues()(0);
    };
    rep.norm = gram_norm(pi1, false);
    rep.norm_doubled = gram_norm(pi2, false);
    rep.idempotency = gram_norm(pi1, true);
  }
  rep.stability = std::abs(rep.norm - rep.norm_doubled);
  return rep;
}

}  // namespace quadspec
