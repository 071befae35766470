#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "quadspec/io.hpp"
#include "quadspec/quadratic_form.hpp"
#include "quadspec/spectral.hpp"
#include "quadspec/sweep.hpp"

namespace {

using namespace quadspec;

Complex parse_z(const std::string& s) {
  double re = 0.0, im = 0.0;
  char extra = 0;
  const int got = std::sscanf(s.c_str(), "%lf,%lf%c", &re, &im, &extra);
  if (got != 2) throw ConfigError("expected a complex value as \"re,im\", got: " + s);
  return Complex(re, im);
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty())
    std::cout << text;
  else
    write_file(path, text);
}

RunConfig require_config(const std::string& path) {
  if (path.empty()) throw ConfigError("--config is required for this command");
  return load_config(path);
}

SweepInput build_input(const RunConfig& rc) {
  switch (rc.mode) {
    case RunConfig::InputMode::form: {
      QuadraticForm q(rc.n, rc.Q);
      return make_input(q, rc.reduce_opts);
    }
    case RunConfig::InputMode::matrix:
      return make_input(rc.M, rc.sweep.tol);
    case RunConfig::InputMode::eigenvalues:
      break;
  }
  throw ConfigError("this command needs a form or matrix input");
}

SpectralData build_spectral(const RunConfig& rc) {
  switch (rc.mode) {
    case RunConfig::InputMode::form: {
      QuadraticForm q(rc.n, rc.Q);
      return eigen_pairs(hamilton_map(q), rc.sweep.tol);
    }
    case RunConfig::InputMode::matrix:
      return declared_spectral_data(make_input(rc.M, rc.sweep.tol).lambdas, rc.sweep.tol);
    case RunConfig::InputMode::eigenvalues:
      return declared_spectral_data(rc.lambdas, rc.sweep.tol);
  }
  throw ConfigError("unknown input mode");
}

NormMode parse_norm(const std::string& s) {
  if (s == "flat") return NormMode::flat;
  if (s == "gram") return NormMode::gram;
  throw ConfigError("--norm must be flat or gram");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "spectra, normal-form reduction, and truncated resolvent norms for elliptic "
      "quadratic Weyl operators"};
  app.require_subcommand(1);
  // --h is a real option here, so help must not claim the short -h.
  app.set_help_flag("--help", "print this help and exit");
  const auto add_sub = [&app](const char* name, const char* desc) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->set_help_flag("--help", "print this help and exit");
    return s;
  };

  std::string config_path, output_path, norm_override, model = "both", z_text, z0_text;
  double h_override = -1.0, radius_override = -1.0, tol_override = -1.0;
  long max_degree = -1;
  int threads_override = -1, m_value = 4, quad_points = 32;
  int exit_status = 0;

  const auto apply_overrides = [&](RunConfig& rc) {
    if (max_degree > 0) rc.sweep.N_max = max_degree;
    if (tol_override > 0) rc.sweep.stabilization_tol = tol_override;
    if (threads_override > 0) rc.sweep.threads = threads_override;
    if (!norm_override.empty()) rc.sweep.norm_mode = parse_norm(norm_override);
  };

  CLI::App* sp = add_sub("spectrum", "enumerate the spectrum inside a disc");
  sp->add_option("--config", config_path, "JSON configuration file");
  sp->add_option("--output", output_path, "write here instead of stdout");
  sp->add_option("--h", h_override, "semiclassical parameter");
  sp->add_option("--radius", radius_override, "enumeration radius");
  sp->callback([&] {
    RunConfig rc = require_config(config_path);
    const double h = h_override > 0 ? h_override : rc.spectrum_h;
    const double R = radius_override > 0 ? radius_override : rc.spectrum_radius;
    emit(spectrum_text(spectrum(build_spectral(rc), h, R)), output_path);
  });

  CLI::App* nf = add_sub("normal-form", "run the reduction pipeline, emit its report");
  nf->add_option("--config", config_path, "JSON configuration file");
  nf->add_option("--output", output_path, "write here instead of stdout");
  nf->callback([&] {
    RunConfig rc = require_config(config_path);
    if (rc.mode != RunConfig::InputMode::form)
      throw ConfigError("normal-form needs input mode \"form\"");
    QuadraticForm q(rc.n, rc.Q);
    const NormalFormResult res = reduce(q, rc.reduce_opts);
    const std::string path = !output_path.empty() ? output_path : rc.report_path;
    emit(normal_form_report_json(res), path);
  });

  CLI::App* rv = add_sub("resolvent", "truncated resolvent norm at one (h, z)");
  rv->add_option("--config", config_path, "JSON configuration file");
  rv->add_option("--output", output_path, "write here instead of stdout");
  rv->add_option("--h", h_override, "semiclassical parameter")->required();
  rv->add_option("--z", z_text, "spectral point as re,im")->required();
  rv->add_option("--max-degree", max_degree, "truncation cap");
  rv->add_option("--tol", tol_override, "stabilization tolerance");
  rv->add_option("--norm", norm_override, "flat or gram")
      ->check(CLI::IsMember({"flat", "gram"}));
  rv->callback([&] {
    RunConfig rc = require_config(config_path);
    apply_overrides(rc);
    const Complex z = parse_z(z_text);
    rc.sweep.h_values = {h_override};
    rc.sweep.grid = ZGrid{z.real(), z.real(), z.imag(), z.imag(), 1, 1};
    rc.sweep.threads = 1;
    const SweepResult res = sweep(build_input(rc), rc.sweep);
    emit(sweep_row_json(res.rows.at(0)), output_path);
  });

  CLI::App* sw = add_sub("sweep", "grid sweep of truncated resolvent norms to CSV");
  sw->add_option("--config", config_path, "JSON configuration file");
  sw->add_option("--output", output_path, "CSV path (overrides config)");
  sw->add_option("--max-degree", max_degree, "truncation cap");
  sw->add_option("--tol", tol_override, "stabilization tolerance");
  sw->add_option("--threads", threads_override, "worker count");
  sw->add_option("--norm", norm_override, "flat or gram")
      ->check(CLI::IsMember({"flat", "gram"}));
  sw->callback([&] {
    RunConfig rc = require_config(config_path);
    apply_overrides(rc);
    const SweepResult res = sweep(build_input(rc), rc.sweep);
    const std::string path = !output_path.empty() ? output_path : rc.csv_path;
    emit(sweep_csv(res), path);
  });

  CLI::App* sc = add_sub("scaling", "fit log resolvent norms against 1/h models");
  sc->add_option("--config", config_path, "JSON configuration file");
  sc->add_option("--output", output_path, "write here instead of stdout");
  sc->add_option("--z", z_text, "fixed spectral point as re,im")->required();
  sc->add_option("--model", model, "inv_h, inv_h_log, or both")
      ->check(CLI::IsMember({"inv_h", "inv_h_log", "both"}));
  sc->add_option("--max-degree", max_degree, "truncation cap");
  sc->add_option("--tol", tol_override, "stabilization tolerance");
  sc->add_option("--threads", threads_override, "worker count");
  sc->add_option("--norm", norm_override, "flat or gram")
      ->check(CLI::IsMember({"flat", "gram"}));
  sc->callback([&] {
    RunConfig rc = require_config(config_path);
    apply_overrides(rc);
    const Complex z = parse_z(z_text);
    rc.sweep.grid = ZGrid{z.real(), z.real(), z.imag(), z.imag(), 1, 1};
    const SweepResult res = sweep(build_input(rc), rc.sweep);
    const bool use_gram = rc.sweep.norm_mode == NormMode::gram;
    std::vector<ScalingFit> fits;
    if (model != "inv_h_log")
      fits.push_back(scaling_fit(res.rows, ScalingModel::inv_h, use_gram));
    if (model != "inv_h")
      fits.push_back(scaling_fit(res.rows, ScalingModel::inv_h_log, use_gram));
    emit(scaling_fits_json(fits), output_path);
  });

  CLI::App* ex = add_sub("example", "degenerate two-variable case against its closed form");
  ex->add_option("--m", m_value, "degree (h = 1/m, z = 1)")->required();
  ex->add_option("--output", output_path, "write here instead of stdout");
  ex->callback([&] {
    const ExampleReport rep = example_case(m_value);
    const bool pass = rep.rel_error < 1e-8 && rep.exceeds_factorial;
    emit(example_report_json(rep) + (pass ? "PASS\n" : "FAIL\n"), output_path);
    if (!pass) exit_status = 2;
  });

  CLI::App* pj = add_sub("projection", "contour-quadrature spectral projection norm");
  pj->add_option("--config", config_path, "JSON configuration file");
  pj->add_option("--output", output_path, "write here instead of stdout");
  pj->add_option("--h", h_override, "semiclassical parameter")->required();
  pj->add_option("--z0", z0_text, "contour center as re,im")->required();
  pj->add_option("--radius", radius_override, "contour radius")->required();
  pj->add_option("--quad-points", quad_points, "quadrature points");
  pj->add_option("--max-degree", max_degree, "truncation degree count");
  pj->add_option("--norm", norm_override, "flat or gram")
      ->check(CLI::IsMember({"flat", "gram"}));
  pj->callback([&] {
    RunConfig rc = require_config(config_path);
    apply_overrides(rc);
    const long N = max_degree > 0 ? max_degree : 8;
    const ProjectionReport rep =
        spectral_projection(build_input(rc), h_override, parse_z(z0_text), radius_override,
                            quad_points, N, rc.sweep.norm_mode, rc.sweep.tol);
    emit(projection_report_json(rep), output_path);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return exit_status;
}
