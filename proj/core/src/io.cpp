#include "quadspec/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace quadspec {

namespace {

using nlohmann::json;

Complex parse_complex(const json& j, const char* where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw ConfigError(std::string(where) + ": expected a number or an [re, im] pair");
}

Mat parse_matrix(const json& j, const char* where) {
  if (!j.is_array() || j.empty())
    throw ConfigError(std::string(where) + ": expected a non-empty array of rows");
  const long rows = static_cast<long>(j.size());
  long cols = -1;
  Mat A;
  for (long r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array()) throw ConfigError(std::string(where) + ": row is not an array");
    if (cols < 0) {
      cols = static_cast<long>(row.size());
      A = Mat::Zero(rows, cols);
    }
    if (static_cast<long>(row.size()) != cols)
      throw ConfigError(std::string(where) + ": ragged rows");
    for (long c = 0; c < cols; ++c) A(r, c) = parse_complex(row[c], where);
  }
  return A;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Mat& A) {
  json rows = json::array();
  for (long r = 0; r < A.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < A.cols(); ++c) row.push_back(complex_json(A(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json real_matrix_json(const RealMat& A) {
  json rows = json::array();
  for (long r = 0; r < A.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < A.cols(); ++c) row.push_back(A(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }

  RunConfig rc;
  if (!doc.contains("input") || !doc["input"].is_object())
    throw ConfigError("config: missing \"input\" object");
  const json& in = doc["input"];

  const std::string mode = in.value("mode", std::string("form"));
  if (mode == "form") {
    rc.mode = RunConfig::InputMode::form;
    if (!in.contains("Q")) throw ConfigError("config: input mode \"form\" needs \"Q\"");
    rc.Q = parse_matrix(in["Q"], "config input.Q");
    if (rc.Q.rows() != rc.Q.cols() || rc.Q.rows() % 2 != 0)
      throw ConfigError("config: Q must be square with even dimension");
    rc.n = static_cast<int>(rc.Q.rows()) / 2;
  } else if (mode == "matrix") {
    rc.mode = RunConfig::InputMode::matrix;
    if (!in.contains("M")) throw ConfigError("config: input mode \"matrix\" needs \"M\"");
    rc.M = parse_matrix(in["M"], "config input.M");
    if (rc.M.rows() != rc.M.cols()) throw ConfigError("config: M must be square");
    rc.n = static_cast<int>(rc.M.rows());
  } else if (mode == "eigenvalues") {
    rc.mode = RunConfig::InputMode::eigenvalues;
    if (!in.contains("lambdas") || !in["lambdas"].is_array() || in["lambdas"].empty())
      throw ConfigError("config: input mode \"eigenvalues\" needs a non-empty \"lambdas\"");
    for (const json& l : in["lambdas"])
      rc.lambdas.push_back(parse_complex(l, "config input.lambdas"));
    rc.n = static_cast<int>(rc.lambdas.size());
  } else {
    throw ConfigError("config: input.mode must be form, matrix, or eigenvalues");
  }

  if (doc.contains("jordan")) {
    const json& jo = doc["jordan"];
    const std::string jm = jo.value("mode", std::string("raw"));
    if (jm == "raw")
      rc.reduce_opts.mode = JordanMode::raw;
    else if (jm == "diagonalized")
      rc.reduce_opts.mode = JordanMode::diagonalized;
    else if (jm == "exact")
      rc.reduce_opts.mode = JordanMode::exact;
    else
      throw ConfigError("config: jordan.mode must be raw, diagonalized, or exact");
    if (jo.contains("C")) rc.reduce_opts.C_user = parse_matrix(jo["C"], "config jordan.C");
  }

  if (doc.contains("sweep")) {
    const json& sw = doc["sweep"];
    if (sw.contains("h_values")) {
      if (!sw["h_values"].is_array()) throw ConfigError("config: sweep.h_values must be an array");
      for (const json& h : sw["h_values"]) {
        if (!h.is_number()) throw ConfigError("config: sweep.h_values entries must be numbers");
        rc.sweep.h_values.push_back(h.get<double>());
      }
    }
    if (sw.contains("z_grid")) {
      const json& g = sw["z_grid"];
      rc.sweep.grid.re_min = g.value("re_min", 0.0);
      rc.sweep.grid.re_max = g.value("re_max", rc.sweep.grid.re_min);
      rc.sweep.grid.im_min = g.value("im_min", 0.0);
      rc.sweep.grid.im_max = g.value("im_max", rc.sweep.grid.im_min);
      rc.sweep.grid.nx = g.value("nx", 1);
      rc.sweep.grid.ny = g.value("ny", 1);
    }
    rc.sweep.K = sw.value("K", rc.sweep.K);
    rc.sweep.N_max = sw.value("N_max", rc.sweep.N_max);
    rc.sweep.stabilization_tol = sw.value("stabilization_tol", rc.sweep.stabilization_tol);
    const std::string nm = sw.value("norm", std::string("flat"));
    if (nm == "flat")
      rc.sweep.norm_mode = NormMode::flat;
    else if (nm == "gram")
      rc.sweep.norm_mode = NormMode::gram;
    else
      throw ConfigError("config: sweep.norm must be flat or gram");
    rc.sweep.threads = sw.value("threads", rc.sweep.threads);
    rc.sweep.allow_small_h = sw.value("allow_small_h", rc.sweep.allow_small_h);
  }

  if (doc.contains("spectrum")) {
    const json& sp = doc["spectrum"];
    rc.spectrum_h = sp.value("h", rc.spectrum_h);
    rc.spectrum_radius = sp.value("radius", rc.spectrum_radius);
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    rc.csv_path = o.value("csv", std::string());
    rc.report_path = o.value("report", std::string());
  }
  return rc;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out =
      "h,z_re,z_im,N_used,nu_total,resnorm_flat,log_resnorm_flat,resnorm_gram,dist_spec,"
      "converged,out_of_regime\n";
  char buf[64];
  for (const SweepRow& r : result.rows) {
    out += format_double(r.h);
    out += ',';
    out += format_double(r.z.real());
    out += ',';
    out += format_double(r.z.imag());
    out += ',';
    std::snprintf(buf, sizeof buf, "%ld,%ld,", r.N_used, r.nu_total);
    out += buf;
    out += format_double(r.resnorm_flat);
    out += ',';
    out += format_double(std::log(r.resnorm_flat));
    out += ',';
    if (r.has_gram) out += format_double(r.resnorm_gram);
    out += ',';
    out += format_double(r.dist_spec);
    out += ',';
    out += r.converged ? '1' : '0';
    out += ',';
    out += r.out_of_regime ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string matrix_text(const Mat& A) {
  std::string out;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%ld %ld\n", static_cast<long>(A.rows()),
                static_cast<long>(A.cols()));
  out += buf;
  for (long r = 0; r < A.rows(); ++r) {
    for (long c = 0; c < A.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%s%.17g %.17g", c == 0 ? "" : "  ", A(r, c).real(),
                    A(r, c).imag());
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string spectrum_text(const SpectrumList& spec) {
  std::string out;
  for (const auto& p : spec.points) {
    out += format_double(p.value.real());
    out += ' ';
    out += format_double(p.value.imag());
    out += ' ';
    out += std::to_string(p.multiplicity);
    out += '\n';
  }
  return out;
}

std::string normal_form_report_json(const NormalFormResult& nf) {
  json doc;
  doc["n"] = nf.n;
  switch (nf.jordan_mode) {
    case JordanMode::raw: doc["jordan_mode"] = "raw"; break;
    case JordanMode::diagonalized: doc["jordan_mode"] = "diagonalized"; break;
    case JordanMode::exact: doc["jordan_mode"] = "exact"; break;
  }
  doc["M"] = matrix_json(nf.M);
  doc["B"] = matrix_json(nf.B);
  doc["C"] = matrix_json(nf.C);
  doc["K_total"] = matrix_json(nf.K_total);
  doc["phi0"] = real_matrix_json(nf.phi0_weight.G);
  doc["phi1"] = real_matrix_json(nf.phi1.G);
  doc["C0"] = nf.C0;
  doc["C1"] = nf.C1;
  json lam = json::array();
  for (const Complex& l : nf.spectral.lambdas) lam.push_back(complex_json(l));
  doc["lambdas"] = lam;
  doc["residuals"] = {{"symplectic", nf.residuals.symplectic},
                      {"block_xx", nf.residuals.block_xx},
                      {"block_xixi", nf.residuals.block_xixi},
                      {"spec_match", nf.residuals.spec_match},
                      {"pairing", nf.residuals.pairing}};
  return doc.dump(2) + "\n";
}

namespace {

json scaling_fit_doc(const ScalingFit& fit) {
  json doc;
  doc["model"] = fit.model == ScalingModel::inv_h ? "inv_h" : "inv_h_log";
  doc["A"] = fit.A;
  doc["intercept"] = fit.intercept;
  doc["residual"] = fit.residual;
  doc["points"] = fit.points;
  return doc;
}

}  // namespace

std::string scaling_fit_json(const ScalingFit& fit) { return scaling_fit_doc(fit).dump(2) + "\n"; }

std::string scaling_fits_json(const std::vector<ScalingFit>& fits) {
  json arr = json::array();
  for (const ScalingFit& f : fits) arr.push_back(scaling_fit_doc(f));
  return arr.dump(2) + "\n";
}

std::string example_report_json(const ExampleReport& rep) {
  json doc;
  doc["m"] = rep.m;
  doc["h"] = rep.h;
  doc["squared_norm"] = rep.squared_norm;
  doc["closed_form"] = rep.closed_form;
  doc["rel_error"] = rep.rel_error;
  doc["factorial"] = rep.factorial;
  doc["exceeds_factorial"] = rep.exceeds_factorial;
  return doc.dump(2) + "\n";
}

std::string projection_report_json(const ProjectionReport& rep) {
  json doc;
  doc["norm"] = rep.norm;
  doc["norm_doubled"] = rep.norm_doubled;
  doc["idempotency"] = rep.idempotency;
  doc["stability"] = rep.stability;
  return doc.dump(2) + "\n";
}

std::string sweep_row_json(const SweepRow& row) {
  json doc;
  doc["h"] = row.h;
  doc["z"] = complex_json(row.z);
  doc["N_used"] = row.N_used;
  doc["nu_total"] = row.nu_total;
  doc["resnorm_flat"] = std::isfinite(row.resnorm_flat) ? json(row.resnorm_flat) : json("inf");
  if (row.has_gram)
    doc["resnorm_gram"] =
        std::isfinite(row.resnorm_gram) ? json(row.resnorm_gram) : json("inf");
  doc["dist_spec"] = row.dist_spec;
  doc["converged"] = row.converged;
  doc["out_of_regime"] = row.out_of_regime;
  doc["spectral_hit"] = row.spectral_hit;
  return doc.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw ConfigError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace quadspec
