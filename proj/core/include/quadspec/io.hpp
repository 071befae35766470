#pragma once

#include <string>
#include <vector>

#include "quadspec/normal_form.hpp"
#include "quadspec/spectral.hpp"
#include "quadspec/sweep.hpp"

namespace quadspec {

// One structured JSON document drives every tool run; see README for the
// schema. Numeric matrices are nested arrays of [re, im] pairs.
struct RunConfig {
  enum class InputMode { form, matrix, eigenvalues };
  InputMode mode = InputMode::form;
  int n = 0;
  Mat Q;                         // mode form: 2n x 2n coefficient matrix
  Mat M;                         // mode matrix: n x n reduced matrix
  std::vector<Complex> lambdas;  // mode eigenvalues
  ReduceOptions reduce_opts;
  SweepConfig sweep;
  double spectrum_h = 0.1;
  double spectrum_radius = 1.0;
  std::string csv_path;
  std::string report_path;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Fixed-precision formatting shared by every emitter so output is
// byte-reproducible; infinities and NaN render as "inf"/"-inf"/"nan".
std::string format_double(double v);

// CSV with the fixed column set
// h,z_re,z_im,N_used,nu_total,resnorm_flat,log_resnorm_flat,resnorm_gram,
// dist_spec,converged,out_of_regime. The gram column is empty in flat mode.
std::string sweep_csv(const SweepResult& result);

// Row-major textual dump, "re im" pairs, one matrix row per line, with a
// leading "rows cols" line. Debugging surface, not a stable interface.
std::string matrix_text(const Mat& A);

std::string spectrum_text(const SpectrumList& spec);
std::string normal_form_report_json(const NormalFormResult& nf);
std::string scaling_fit_json(const ScalingFit& fit);
std::string scaling_fits_json(const std::vector<ScalingFit>& fits);
std::string example_report_json(const ExampleReport& rep);
std::string projection_report_json(const ProjectionReport& rep);
std::string sweep_row_json(const SweepRow& row);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace quadspec
