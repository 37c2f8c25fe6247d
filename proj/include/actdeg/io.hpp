#pragma once

// JSON model files and run reports.
//
// Model file (schema "actdeg.model", version 1):
//   { "schema": "actdeg.model", "version": 1,
//     "nx": 4, "nu": 3, "nd": 1, "nz": 2,
//     "A": [[...], ...], "Bu": ..., "Bd": ..., "Cz": ..., "Dd": ...,   row-major
//     "wz": [..nz..]   optional, applied to Cz on load (Cz <- diag(wz) Cz)
//     "wd": [..nd..]   optional, disturbance scaling (default ones)
//     "labels": {"states": [...], "inputs": [...], "outputs": [...], "disturbances": [...]},
//     "trim": {"name": "value", ...}   optional, informational }
//
// Run report (schema "actdeg.report", version 1): see to_json(RunReport).
// Non-finite numbers are written as null and read back as NaN.

#include <nlohmann/json.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "actdeg/degradation.hpp"
#include "actdeg/errors.hpp"
#include "actdeg/f16.hpp"
#include "actdeg/lti.hpp"
#include "actdeg/synthesis.hpp"

namespace actdeg {

using json = nlohmann::json;

inline constexpr const char* kToolName = "actdeg";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kModelSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

namespace io {

inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline double to_number(const json& j, const std::string& what) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) throw InvalidInput(what + " must be a number");
  return j.get<double>();
}

inline json matrix(const MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int k = 0; k < m.cols(); ++k) r.push_back(number(m(i, k)));
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Row-major nested array; rejects ragged input. `cols` fixes the width of
/// an empty matrix.
inline MatrixXd to_matrix(const json& j, const std::string& what, int cols = -1) {
  if (!j.is_array()) throw InvalidInput(what + " must be an array of rows");
  const int r = static_cast<int>(j.size());
  int c = cols;
  if (r > 0) {
    if (!j[0].is_array()) throw InvalidInput(what + " must be an array of rows");
    c = static_cast<int>(j[0].size());
  }
  if (c < 0) c = 0;
  MatrixXd m(r, c);
  for (int i = 0; i < r; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != c) throw InvalidInput(what + " is ragged");
    for (int k = 0; k < c; ++k) m(i, k) = to_number(j[i][k], what);
  }
  return m;
}

inline json vector(const VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

inline VectorXd to_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidInput(what + " must be an array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = to_number(j[i], what);
  return v;
}

inline std::vector<std::string> strings(const json& j, const std::string& key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<std::vector<std::string>>();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(what + " is not valid JSON: " + e.what());
  }
}

}  // namespace io

struct ModelFile {
  StateSpace plant;  ///< Cz already multiplied by diag(wz) when wz is present
  MatrixXd Cz_raw;   ///< Cz as stored in the file
  VectorXd wz;       ///< empty when absent
  VectorXd wd;       ///< disturbance scaling; ones when absent
  std::vector<std::string> state_labels, input_labels, output_labels, disturbance_labels;
  std::map<std::string, std::string> trim;
};

inline ModelFile parse_model(const json& j) {
  try {
    if (!j.is_object()) throw InvalidInput("model must be a JSON object");
    if (j.contains("schema") && j.at("schema") != "actdeg.model") throw InvalidInput("not an actdeg model file");
    if (j.contains("version") && j.at("version").get<int>() != kModelSchemaVersion)
      throw InvalidInput("unsupported model version");
    for (const char* k : {"A", "Bu", "Bd", "Cz"})
      if (!j.contains(k)) throw InvalidInput(std::string("model is missing ") + k);
    ModelFile m;
    m.plant.A = io::to_matrix(j.at("A"), "A");
    m.plant.Bu = io::to_matrix(j.at("Bu"), "Bu");
    m.plant.Bd = io::to_matrix(j.at("Bd"), "Bd");
    m.Cz_raw = io::to_matrix(j.at("Cz"), "Cz");
    m.plant.Dd = j.contains("Dd") ? io::to_matrix(j.at("Dd"), "Dd")
                                  : MatrixXd::Zero(m.Cz_raw.rows(), m.plant.Bd.cols());
    const std::map<std::string, long> dims = {{"nx", m.plant.A.rows()},
                                              {"nu", m.plant.Bu.cols()},
                                              {"nd", m.plant.Bd.cols()},
                                              {"nz", m.Cz_raw.rows()}};
    for (const auto& [k, v] : dims)
      if (j.contains(k) && j.at(k).get<long>() != v) throw InvalidInput("declared " + k + " disagrees with the matrices");
    m.plant.Cz = m.Cz_raw;
    if (j.contains("wz")) {
      m.wz = io::to_vector(j.at("wz"), "wz");
      if (m.wz.size() != m.Cz_raw.rows()) throw InvalidInput("wz must have nz entries");
      m.plant.Cz = m.wz.asDiagonal() * m.Cz_raw;
    }
    m.plant.check();
    m.wd = j.contains("wd") ? io::to_vector(j.at("wd"), "wd") : VectorXd::Ones(m.plant.nd());
    if (m.wd.size() != m.plant.nd()) throw InvalidInput("wd must have nd entries");
    if (j.contains("labels")) {
      const auto& l = j.at("labels");
      m.state_labels = io::strings(l, "states");
      m.input_labels = io::strings(l, "inputs");
      m.output_labels = io::strings(l, "outputs");
      m.disturbance_labels = io::strings(l, "disturbances");
    }
    if (j.contains("trim"))
      for (const auto& [k, v] : j.at("trim").items()) m.trim[k] = v.is_string() ? v.get<std::string>() : v.dump();
    return m;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed model: ") + e.what());
  }
}

inline ModelFile load_model(const std::string& path) {
  return parse_model(io::parse_text(io::read_file(path), "model file '" + path + "'"));
}

inline json model_to_json(const ModelFile& m) {
  json j;
  j["schema"] = "actdeg.model";
  j["version"] = kModelSchemaVersion;
  j["nx"] = m.plant.nx();
  j["nu"] = m.plant.nu();
  j["nd"] = m.plant.nd();
  j["nz"] = m.plant.nz();
  j["A"] = io::matrix(m.plant.A);
  j["Bu"] = io::matrix(m.plant.Bu);
  j["Bd"] = io::matrix(m.plant.Bd);
  j["Cz"] = io::matrix(m.Cz_raw);
  j["Dd"] = io::matrix(m.plant.Dd);
  if (m.wz.size() > 0) j["wz"] = io::vector(m.wz);
  j["wd"] = io::vector(m.wd);
  j["labels"] = {{"states", m.state_labels},
                 {"inputs", m.input_labels},
                 {"outputs", m.output_labels},
                 {"disturbances", m.disturbance_labels}};
  if (!m.trim.empty()) j["trim"] = m.trim;
  return j;
}

inline ModelFile f16_model_file() {
  const auto f = f16::model();
  ModelFile m;
  m.plant = f.weighted();
  m.Cz_raw = f.plant.Cz;
  m.wz = f.Wz;
  m.wd = f.Wd;
  m.state_labels = f.state_labels;
  m.input_labels = f.input_labels;
  m.output_labels = f.output_labels;
  m.disturbance_labels = f.disturbance_labels;
  for (const auto& [k, v] : f.trim) m.trim[k] = v;
  return m;
}

struct RunReport {
  int schema_version = kReportSchemaVersion;
  std::string tool_version = kToolVersion;
  SynthesisSpec spec;
  SynthesisResult result;
  std::vector<std::string> actuator_labels;
  std::optional<DegradationReport> degradation;
  ValidationReport validation;
  double total_seconds = 0;
};

namespace io {

inline NormKind parse_norm_kind(const std::string& s) {
  if (s == "h2") return NormKind::h2;
  if (s == "hinf") return NormKind::hinf;
  throw InvalidInput("norm must be h2 or hinf, got '" + s + "'");
}

inline NormMethod parse_norm_method(const std::string& s) {
  for (auto m : {NormMethod::lyapunov_gramian, NormMethod::hamiltonian_bisection, NormMethod::frequency_grid})
    if (s == to_string(m)) return m;
  throw InvalidInput("unknown norm method '" + s + "'");
}

inline H2BoundConvention parse_h2_convention(const std::string& s) {
  if (s == "trace") return H2BoundConvention::trace;
  if (s == "norm") return H2BoundConvention::norm;
  throw InvalidInput("h2 bound convention must be trace or norm, got '" + s + "'");
}

inline SynthesisStatus parse_status(const std::string& s) {
  for (auto v : {SynthesisStatus::optimal, SynthesisStatus::infeasible, SynthesisStatus::numerical_failure})
    if (s == to_string(v)) return v;
  throw InvalidInput("unknown status '" + s + "'");
}

inline json spec_to_json(const SynthesisSpec& s) {
  return {{"norm", to_string(s.norm_kind)},
          {"gamma", number(s.gamma)},
          {"lambda_a", number(s.lambda_a)},
          {"lambda_wc", number(s.lambda_wc)},
          {"lambda_xf", number(s.lambda_xF)},
          {"wd", vector(s.Wd)},
          {"eps_lmi", number(s.eps_lmi)},
          {"solver_tol", number(s.solver_tol)},
          {"kappa_floor", number(s.kappa_floor)},
          {"omega_floor", number(s.omega_floor)},
          {"verify_slack", number(s.verify_slack)},
          {"h2_bound_convention", to_string(s.h2_convention)}};
}

inline SynthesisSpec spec_from_json(const json& j) {
  SynthesisSpec s;
  s.norm_kind = parse_norm_kind(j.at("norm").get<std::string>());
  s.gamma = to_number(j.at("gamma"), "gamma");
  s.lambda_a = to_number(j.at("lambda_a"), "lambda_a");
  s.lambda_wc = to_number(j.at("lambda_wc"), "lambda_wc");
  s.lambda_xF = to_number(j.at("lambda_xf"), "lambda_xf");
  s.Wd = to_vector(j.at("wd"), "wd");
  s.eps_lmi = to_number(j.at("eps_lmi"), "eps_lmi");
  s.solver_tol = to_number(j.at("solver_tol"), "solver_tol");
  s.kappa_floor = to_number(j.at("kappa_floor"), "kappa_floor");
  s.omega_floor = to_number(j.at("omega_floor"), "omega_floor");
  s.verify_slack = to_number(j.at("verify_slack"), "verify_slack");
  s.h2_convention = parse_h2_convention(j.at("h2_bound_convention").get<std::string>());
  return s;
}

}  // namespace io

inline json to_json(const RunReport& r) {
  using namespace io;
  json j;
  j["schema"] = "actdeg.report";
  j["version"] = r.schema_version;
  j["tool"] = {{"name", kToolName}, {"version", r.tool_version}};
  j["spec"] = spec_to_json(r.spec);
  j["status"] = to_string(r.result.status);
  const auto& sd = r.result.solver;
  j["solver"] = {{"backend", sd.backend},
                 {"conic_status", sd.conic_status},
                 {"message", sd.message},
                 {"iterations", sd.iterations},
                 {"primal_residual", number(sd.primal_residual)},
                 {"dual_residual", number(sd.dual_residual)},
                 {"gap", number(sd.gap)},
                 {"certificate_residual", number(sd.certificate_residual)}};
  j["actuator_labels"] = r.actuator_labels;
  if (r.result.status == SynthesisStatus::optimal) {
    j["K"] = matrix(r.result.K);
    j["V"] = matrix(r.result.V);
    j["Y"] = matrix(r.result.Y);
    if (r.result.Q.size()) j["Q"] = matrix(r.result.Q);
    if (r.result.Q1.size()) j["Q1"] = matrix(r.result.Q1);
    if (r.result.Q2.size()) j["Q2"] = matrix(r.result.Q2);
    j["objective"] = number(r.result.objective);
    j["degradation"] = {{"omega_c", vector(r.result.deg.omega_c)},
                        {"kappa_a", vector(r.result.deg.kappa_a)},
                        {"gamma_xF", number(r.result.deg.gamma_xF)}};
  }
  if (r.degradation) {
    json rows = json::array();
    for (std::size_t i = 0; i < r.degradation->rows.size(); ++i) {
      const auto& row = r.degradation->rows[i];
      json e = {{"omega_c", number(row.omega_c)}, {"xF_gain", number(row.xF_gain)}, {"noise_scale", number(row.noise_scale)}};
      if (i < r.actuator_labels.size()) e["label"] = r.actuator_labels[i];
      rows.push_back(std::move(e));
    }
    j["degradation_report"] = {{"actuators", rows},
                               {"gamma_xF", number(r.degradation->gamma_xF)},
                               {"objective", number(r.degradation->objective)}};
  }
  if (r.result.verification) {
    const auto& n = *r.result.verification;
    j["norm"] = {{"kind", to_string(n.kind)}, {"value", number(n.value)}, {"method", to_string(n.method)}};
  }
  json checks = json::array();
  for (const auto& c : r.validation.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", number(c.value)}, {"limit", number(c.limit)},
                      {"detail", c.detail}});
  j["validation"] = checks;
  j["timing"] = {{"solve_seconds", number(sd.seconds)}, {"total_seconds", number(r.total_seconds)}};
  return j;
}

inline RunReport report_from_json(const json& j) {
  using namespace io;
  try {
    if (j.value("schema", "") != "actdeg.report") throw InvalidInput("not an actdeg report");
    RunReport r;
    r.schema_version = j.at("version").get<int>();
    if (r.schema_version != kReportSchemaVersion) throw InvalidInput("unsupported report version");
    r.tool_version = j.at("tool").at("version").get<std::string>();
    r.spec = spec_from_json(j.at("spec"));
    r.result.status = parse_status(j.at("status").get<std::string>());
    const auto& s = j.at("solver");
    auto& sd = r.result.solver;
    sd.backend = s.at("backend").get<std::string>();
    sd.conic_status = s.at("conic_status").get<std::string>();
    sd.message = s.at("message").get<std::string>();
    sd.iterations = s.at("iterations").get<int>();
    sd.primal_residual = to_number(s.at("primal_residual"), "primal_residual");
    sd.dual_residual = to_number(s.at("dual_residual"), "dual_residual");
    sd.gap = to_number(s.at("gap"), "gap");
    sd.certificate_residual = to_number(s.at("certificate_residual"), "certificate_residual");
    r.actuator_labels = j.at("actuator_labels").get<std::vector<std::string>>();
    if (j.contains("K")) {
      r.result.K = to_matrix(j.at("K"), "K");
      r.result.V = to_matrix(j.at("V"), "V");
      r.result.Y = to_matrix(j.at("Y"), "Y");
      if (j.contains("Q")) r.result.Q = to_matrix(j.at("Q"), "Q");
      if (j.contains("Q1")) r.result.Q1 = to_matrix(j.at("Q1"), "Q1");
      if (j.contains("Q2")) r.result.Q2 = to_matrix(j.at("Q2"), "Q2");
      r.result.objective = to_number(j.at("objective"), "objective");
      const auto& d = j.at("degradation");
      r.result.deg.omega_c = to_vector(d.at("omega_c"), "omega_c");
      r.result.deg.kappa_a = to_vector(d.at("kappa_a"), "kappa_a");
      r.result.deg.gamma_xF = to_number(d.at("gamma_xF"), "gamma_xF");
    }
    if (j.contains("degradation_report")) {
      const auto& d = j.at("degradation_report");
      DegradationReport dr;
      for (const auto& e : d.at("actuators"))
        dr.rows.push_back({to_number(e.at("omega_c"), "omega_c"), to_number(e.at("xF_gain"), "xF_gain"),
                           to_number(e.at("noise_scale"), "noise_scale")});
      dr.gamma_xF = to_number(d.at("gamma_xF"), "gamma_xF");
      dr.objective = to_number(d.at("objective"), "objective");
      r.degradation = dr;
    }
    if (j.contains("norm")) {
      NormReport n;
      n.kind = parse_norm_kind(j.at("norm").at("kind").get<std::string>());
      n.value = to_number(j.at("norm").at("value"), "norm value");
      n.method = parse_norm_method(j.at("norm").at("method").get<std::string>());
      r.result.verification = n;
    }
    for (const auto& c : j.at("validation"))
      r.validation.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(),
                                     to_number(c.at("value"), "value"), to_number(c.at("limit"), "limit"),
                                     c.at("detail").get<std::string>()});
    sd.seconds = to_number(j.at("timing").at("solve_seconds"), "solve_seconds");
    r.total_seconds = to_number(j.at("timing").at("total_seconds"), "total_seconds");
    return r;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed report: ") + e.what());
  }
}

inline RunReport load_report(const std::string& path) {
  return report_from_json(io::parse_text(io::read_file(path), "report '" + path + "'"));
}

inline std::string serialize(const RunReport& r) { return to_json(r).dump(2) + "\n"; }

}  // namespace actdeg
