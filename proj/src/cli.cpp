#include "seclossy/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "seclossy/auxgauss.hpp"
#include "seclossy/enhance.hpp"
#include "seclossy/errors.hpp"
#include "seclossy/examples.hpp"

namespace seclossy {

using nlohmann::json;

namespace {

constexpr double kNatsPerBit = 0.69314718055994530942;

double unit(double nats, bool bits) { return bits ? nats / kNatsPerBit : nats; }

std::string fmt_num(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Writes through a sibling temporary so a failed run never leaves a partial file.
void write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw ConfigError("cannot open output file " + path);
    }
    f << content;
    if (!f) {
      throw ConfigError("cannot write output file " + path);
    }
  }
  std::filesystem::rename(tmp, path);
}

const json& require(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string(where) + ": missing key \"" + key + "\"");
  }
  return j.at(key);
}

std::vector<std::vector<double>> read_rows(const json& j, const char* what) {
  const json& rows = require(j, "rows", what);
  if (!rows.is_array() || rows.empty()) {
    throw ConfigError(std::string(what) + ": \"rows\" must be a non-empty array");
  }
  std::vector<std::vector<double>> out;
  for (const auto& row : rows) {
    if (!row.is_array()) {
      throw ConfigError(std::string(what) + ": every row must be an array");
    }
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) {
        throw ConfigError(std::string(what) + ": entries must be numbers");
      }
      r.push_back(v.get<double>());
    }
    if (!out.empty() && r.size() != out.front().size()) {
      throw ConfigError(std::string(what) + ": ragged rows");
    }
    out.push_back(std::move(r));
  }
  if (out.front().empty()) {
    throw ConfigError(std::string(what) + ": empty rows");
  }
  return out;
}

SolverOptions solver_from_json(const json& j) {
  SolverOptions s;
  if (j.is_null()) {
    return s;
  }
  if (!j.is_object()) {
    throw ConfigError("solver: expected an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) {
      throw ConfigError("solver." + key + ": expected a number");
    }
    if (key == "max_iters") s.max_iters = value.get<int>();
    else if (key == "step_init") s.step_init = value.get<double>();
    else if (key == "tol_grad") s.tol_grad = value.get<double>();
    else if (key == "tol_feas") s.tol_feas = value.get<double>();
    else if (key == "restarts") s.restarts = value.get<int>();
    else if (key == "seed") s.seed = value.get<std::uint64_t>();
    else if (key == "barrier_init") s.barrier_init = value.get<double>();
    else if (key == "barrier_final") s.barrier_final = value.get<double>();
    else throw ConfigError("solver: unknown key \"" + key + "\"");
  }
  if (s.max_iters < 1 || s.restarts < 1 || !(s.step_init > 0.0) || !(s.tol_grad > 0.0) || !(s.tol_feas > 0.0) ||
      !(s.barrier_final > 0.0) || !(s.barrier_init >= s.barrier_final)) {
    throw ConfigError("solver: iteration counts >= 1, positive tolerances, barrier_init >= barrier_final > 0");
  }
  return s;
}

json solver_to_json(const SolverOptions& s) {
  return json{{"max_iters", s.max_iters},   {"step_init", s.step_init},       {"tol_grad", s.tol_grad},
              {"tol_feas", s.tol_feas},     {"restarts", s.restarts},         {"seed", s.seed},
              {"barrier_init", s.barrier_init}, {"barrier_final", s.barrier_final}};
}

void check_distortion(const std::variant<AlignedModel, GeneralModel>& model, const SymMatrix& d) {
  if (const auto* a = std::get_if<AlignedModel>(&model)) {
    DistortionConstraint checked(*a, d);
    if (!psd_check(d).is_pd) {
      throw InfeasibleDistortion("distortion violates 0 < D (singular)");
    }
  } else {
    check_general_distortion(std::get<GeneralModel>(model), d);
  }
}

RunConfig load(const CliOptions& o, std::ostream& err) {
  if (!o.preset.empty() && !o.config_path.empty()) {
    throw ConfigError("--preset and --config are mutually exclusive");
  }
  RunConfig c = !o.preset.empty() ? preset_config(o.preset) : [&] {
    if (o.config_path.empty()) {
      throw ConfigError("--config PATH or --preset NAME is required");
    }
    return load_config(o.config_path, &err);
  }();
  if (o.seed) {
    c.solver.seed = *o.seed;
  }
  return c;
}

std::string json_target(const CliOptions& o, const RunConfig& c) {
  return !o.out_json.empty() ? o.out_json : c.outputs.json_path;
}

std::string csv_target(const CliOptions& o, const RunConfig& c) {
  return !o.out_csv.empty() ? o.out_csv : c.outputs.csv_path;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    write_file(path, content);
  }
}

struct AlignedEval {
  double r_min = 0.0;
  LeakageSolution sol;
  std::optional<EnhancedChannel> enhanced;
  double lbar = std::nan("");
  std::array<double, 4> chain{};
  bool certified = false;
};

AlignedEval evaluate_aligned(const AlignedModel& m, const SymMatrix& dm, const SolverOptions& opts, double tol) {
  const DistortionConstraint d(m, dm);
  AlignedEval e;
  e.r_min = rate_lower_bound(m, d).nats;
  e.sol = minimize_leakage(m, d, opts);
  try {
    e.enhanced = enhance(m, d, e.sol);
    e.lbar = closed_form_lbar(m, d, *e.enhanced);
    e.chain = chain_values(m, d, e.sol, *e.enhanced);
  } catch (const Error&) {
    e.enhanced.reset();
  }
  double l6 = 0.0;
  if (e.enhanced) {
    for (const auto& [name, value] : e.enhanced->property_report) {
      l6 = std::max(l6, value);
    }
  }
  e.certified = e.sol.converged && e.enhanced && certify(m, d, e.sol, tol) && l6 < tol &&
                verify_chain(m, d, e.sol, *e.enhanced, tol);
  return e;
}

json map_to_json(const std::map<std::string, double>& m) {
  json j = json::object();
  for (const auto& [k, v] : m) {
    j[k] = v;
  }
  return j;
}

}  // namespace

SymMatrix SweepSpec::at(int index) const {
  if (steps <= 1) {
    return from;
  }
  const double t = static_cast<double>(index) / static_cast<double>(steps - 1);
  return SymMatrix((1.0 - t) * from.mat() + t * to.mat());
}

SymMatrix sym_from_json(const json& j, const char* what, std::ostream* warn) {
  const auto rows = read_rows(j, what);
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (j.contains("dim") && (!j.at("dim").is_number_integer() || j.at("dim").get<long>() != n)) {
    throw ConfigError(std::string(what) + ": \"dim\" does not match the row count");
  }
  if (static_cast<Eigen::Index>(rows.front().size()) != n) {
    throw ConfigError(std::string(what) + ": matrix must be square");
  }
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j2 = 0; j2 < n; ++j2) {
      m(i, j2) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j2)];
    }
  }
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 && warn) {
    *warn << "warning: " << what << " asymmetric by " << asym << "; averaged with its transpose\n";
  }
  return SymMatrix(m);
}

json sym_to_json(const SymMatrix& m) {
  json j = matrix_to_json(m.mat());
  j["dim"] = m.dim();
  return j;
}

Matrix matrix_from_json(const json& j, const char* what) {
  const auto rows = read_rows(j, what);
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.front().size());
  if (j.contains("dim")) {
    const json& dim = j.at("dim");
    const bool ok = (dim.is_number_integer() && dim.get<long>() == r && r == c) ||
                    (dim.is_array() && dim.size() == 2 && dim[0] == r && dim[1] == c);
    if (!ok) {
      throw ConfigError(std::string(what) + ": \"dim\" does not match the rows");
    }
  }
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index k = 0; k < c; ++k) {
      m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      row.push_back(m(i, k));
    }
    rows.push_back(std::move(row));
  }
  return json{{"dim", json::array({m.rows(), m.cols()})}, {"rows", std::move(rows)}};
}

RunConfig parse_config(const json& j, std::ostream* warn) {
  if (!j.is_object()) {
    throw ConfigError("config: top level must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "model" && key != "distortion" && key != "sweep" && key != "solver" && key != "outputs") {
      throw ConfigError("config: unknown key \"" + key + "\"");
    }
  }
  const json& jm = require(j, "model", "config");
  const json& type = require(jm, "type", "model");
  if (!type.is_string()) {
    throw ConfigError("model.type must be a string");
  }

  auto build_model = [&]() -> std::variant<AlignedModel, GeneralModel> {
    try {
      if (type == "aligned") {
        return AlignedModel(sym_from_json(require(jm, "K_X", "model"), "model.K_X", warn),
                            sym_from_json(require(jm, "Sigma_Y", "model"), "model.Sigma_Y", warn),
                            sym_from_json(require(jm, "Sigma_Z", "model"), "model.Sigma_Z", warn));
      }
      if (type == "general") {
        return GeneralModel(sym_from_json(require(jm, "K_X", "model"), "model.K_X", warn),
                            matrix_from_json(require(jm, "H_Y", "model"), "model.H_Y"),
                            matrix_from_json(require(jm, "H_Z", "model"), "model.H_Z"));
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string("model: ") + e.what());
    }
    throw ConfigError("model.type must be \"aligned\" or \"general\"");
  };
  RunConfig c{build_model(), std::nullopt, std::nullopt, {}, {}};

  if (j.contains("distortion") == j.contains("sweep")) {
    throw ConfigError("config: exactly one of \"distortion\" or \"sweep\" is required");
  }
  if (j.contains("distortion")) {
    c.distortion = sym_from_json(j.at("distortion"), "distortion", warn);
  } else {
    const json& js = j.at("sweep");
    SweepSpec s;
    s.from = sym_from_json(require(js, "from", "sweep"), "sweep.from", warn);
    s.to = sym_from_json(require(js, "to", "sweep"), "sweep.to", warn);
    const json& steps = require(js, "steps", "sweep");
    if (!steps.is_number_integer() || steps.get<int>() < 1) {
      throw ConfigError("sweep.steps must be a positive integer");
    }
    s.steps = steps.get<int>();
    if (js.contains("path") && js.at("path") != "linear") {
      throw ConfigError("sweep.path: only \"linear\" is supported");
    }
    c.sweep = std::move(s);
  }
  c.solver = solver_from_json(j.value("solver", json()));
  if (j.contains("outputs")) {
    const json& jo = j.at("outputs");
    if (!jo.is_object()) {
      throw ConfigError("outputs: expected an object");
    }
    c.outputs.csv_path = jo.value("csv_path", "");
    c.outputs.json_path = jo.value("json_path", "");
  }

  const Eigen::Index n = std::visit([](const auto& m) { return m.dim(); }, c.model);
  for (const SymMatrix* d : {c.distortion ? &*c.distortion : nullptr, c.sweep ? &c.sweep->from : nullptr,
                             c.sweep ? &c.sweep->to : nullptr}) {
    if (d && d->dim() != n) {
      throw ConfigError("distortion dimension does not match the model");
    }
    if (d) {
      check_distortion(c.model, *d);
    }
  }
  return c;
}

json serialize_config(const RunConfig& c) {
  json j;
  if (const auto* a = std::get_if<AlignedModel>(&c.model)) {
    j["model"] = {{"type", "aligned"},
                  {"K_X", sym_to_json(a->k_x())},
                  {"Sigma_Y", sym_to_json(a->sigma_y())},
                  {"Sigma_Z", sym_to_json(a->sigma_z())}};
  } else {
    const auto& g = std::get<GeneralModel>(c.model);
    j["model"] = {{"type", "general"},
                  {"K_X", sym_to_json(g.k_x())},
                  {"H_Y", matrix_to_json(g.h_y())},
                  {"H_Z", matrix_to_json(g.h_z())}};
  }
  if (c.distortion) {
    j["distortion"] = sym_to_json(*c.distortion);
  }
  if (c.sweep) {
    j["sweep"] = {{"from", sym_to_json(c.sweep->from)},
                  {"to", sym_to_json(c.sweep->to)},
                  {"steps", c.sweep->steps},
                  {"path", c.sweep->path}};
  }
  j["solver"] = solver_to_json(c.solver);
  j["outputs"] = {{"csv_path", c.outputs.csv_path}, {"json_path", c.outputs.json_path}};
  return j;
}

RunConfig load_config(const std::string& path, std::ostream* warn) {
  std::ifstream f(path);
  if (!f) {
    throw ConfigError("cannot read config file " + path);
  }
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  try {
    return parse_config(j, warn);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
}

RunConfig preset_config(const std::string& name) {
  if (name == "example1-default") {
    const ScalarChannel s = example1_default();
    return RunConfig{AlignedModel(SymMatrix::scalar(s.sigx2), SymMatrix::scalar(s.sigy2), SymMatrix::scalar(s.sigz2)),
                     SymMatrix::scalar(s.d), std::nullopt, {}, {}};
  }
  if (name == "example2-default") {
    const ParallelModel p = example2_default();
    return RunConfig{parallel_as_aligned(p), parallel_distortion(p), std::nullopt, {}, {}};
  }
  std::string valid;
  for (const auto& n : preset_names()) {
    valid += (valid.empty() ? "" : ", ") + n;
  }
  throw UnknownExample("unknown preset \"" + name + "\"; valid presets: " + valid);
}

int cmd_evaluate(const CliOptions& o, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> c;
  try {
    c = load(o, err);
    if (!c->distortion) {
      if (!c->sweep) {
        throw ConfigError("evaluate needs \"distortion\"");
      }
      c->distortion = c->sweep->from;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const double tol = o.tol.value_or(1e-6);
  const bool bits = o.bits;
  json report;
  bool ok = false;
  try {
    report["units"] = bits ? "bits" : "nats";
    report["distortion"] = sym_to_json(*c->distortion);
    if (const auto* m = std::get_if<AlignedModel>(&c->model)) {
      const AlignedEval e = evaluate_aligned(*m, *c->distortion, c->solver, tol);
      report["model"] = "aligned";
      report["r_min"] = unit(e.r_min, bits);
      report["ie_min"] = unit(e.sol.value, bits);
      report["converged"] = e.sol.converged;
      report["certified"] = e.certified;
      report["iterations"] = e.sol.iterations;
      report["pair"] = {{"K_XV", sym_to_json(e.sol.pair.k_xv)}, {"K_XU", sym_to_json(e.sol.pair.k_xu)}};
      report["certificate"] = {{"M_U", sym_to_json(e.sol.certificate.m_u)},
                               {"M_D", sym_to_json(e.sol.certificate.m_d)},
                               {"M_X", sym_to_json(e.sol.certificate.m_x)},
                               {"residuals", map_to_json(e.sol.certificate.residuals)}};
      if (e.enhanced) {
        report["sigma_y_tilde"] = sym_to_json(e.enhanced->sigma_y_tilde);
        report["enhancement_residuals"] = map_to_json(e.enhanced->property_report);
        report["lbar"] = unit(e.lbar, bits);
        report["lbar_gap"] = unit(e.sol.value - e.lbar, bits);
        json chain = json::array();
        for (double v : e.chain) {
          chain.push_back(unit(v, bits));
        }
        report["chain"] = chain;
      }
      ok = e.certified;
    } else {
      const auto& g = std::get<GeneralModel>(c->model);
      const GeneralBounds b = general_bounds(g, *c->distortion, c->solver);
      report["model"] = "general";
      report["r_min"] = unit(b.r_min, bits);
      report["ie_min"] = unit(b.ie_min, bits);
      report["ie_min_hz"] = unit(b.ie_min_hz, bits);
      report["converged"] = b.converged;
      report["certified"] = b.converged;
      report["iterations"] = b.iterations;
      report["pair"] = {{"K_XV", sym_to_json(b.pair.k_xv)}, {"K_XU", sym_to_json(b.pair.k_xu)}};
      ok = b.converged;
    }
    emit(json_target(o, *c), report.dump(2) + "\n", out);
  } catch (const InfeasibleDistortion& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNotConverged;
  }
  if (!ok) {
    err << "error: solve did not certify at tolerance " << tol << "\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_sweep(const CliOptions& o, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> c;
  try {
    c = load(o, err);
    if (!c->sweep) {
      if (!c->distortion) {
        throw ConfigError("sweep needs \"sweep\" or \"distortion\"");
      }
      c->sweep = SweepSpec{*c->distortion, *c->distortion, 1, "linear"};
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const double tol = o.tol.value_or(1e-6);
  std::ostringstream csv;
  const char* u = o.bits ? "bits" : "nats";
  csv << "index,trace_D,logdet_D,R_min_" << u << ",Ie_min_" << u << ",certified,kkt_residual,lbar_gap\n";
  bool all_ok = true;
  for (int i = 0; i < c->sweep->steps; ++i) {
    const SymMatrix d = c->sweep->at(i);
    double r_min = std::nan(""), ie = std::nan(""), kkt = std::nan(""), gap = std::nan("");
    bool certified = false;
    try {
      if (const auto* m = std::get_if<AlignedModel>(&c->model)) {
        const AlignedEval e = evaluate_aligned(*m, d, c->solver, tol);
        r_min = e.r_min;
        ie = e.sol.value;
        kkt = e.sol.certificate.max_residual();
        gap = e.sol.value - e.lbar;
        certified = e.certified;
      } else {
        const GeneralBounds b = general_bounds(std::get<GeneralModel>(c->model), d, c->solver);
        r_min = b.r_min;
        ie = b.ie_min;
        certified = b.converged;
      }
    } catch (const Error& e) {
      err << "warning: sweep row " << i << ": " << e.what() << "\n";
    }
    all_ok = all_ok && certified;
    csv << i << ',' << fmt_num(d.trace()) << ',' << fmt_num(std::log(std::max(d.mat().determinant(), 0.0))) << ','
        << fmt_num(unit(r_min, o.bits)) << ',' << fmt_num(unit(ie, o.bits)) << ',' << (certified ? "true" : "false")
        << ',' << fmt_num(kkt) << ',' << fmt_num(unit(gap, o.bits)) << '\n';
  }
  try {
    emit(csv_target(o, *c), csv.str(), out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return all_ok ? kExitOk : kExitNotConverged;
}

int cmd_verify(const CliOptions& o, std::ostream& out, std::ostream& err) {
  if (o.trials < 0) {
    err << "error: --trials must be >= 0\n";
    return kExitUsage;
  }
  if (o.trials == 0) {
    out << "no-op: trials=0, no suites run\n";
    return kExitOk;
  }
  const auto results = run_verification(o.seed.value_or(20240611), o.trials, o.tol);
  bool all = true;
  for (const auto& r : results) {
    char line[256];
    std::snprintf(line, sizeof line, "%-26s %s  cases=%-5d max_residual=%.3e threshold=%.1e\n", r.name.c_str(),
                  r.passed ? "PASS" : "FAIL", r.cases, r.max_residual, r.threshold);
    out << line;
    all = all && r.passed;
  }
  return all ? kExitOk : kExitVerifyFailed;
}

int cmd_examples(const CliOptions& o, std::ostream& out, std::ostream& err) {
  const std::string& name = o.example_name;
  if (name != "example1" && name != "example2" && name != "all") {
    err << "error: unknown example \"" << name << "\"; valid names: example1, example2, all\n";
    return kExitUsage;
  }
  const bool bits = o.bits;
  json doc;
  doc["units"] = bits ? "bits" : "nats";
  std::ostringstream table;
  char line[256];
  auto row = [&](const char* ex, const char* functional, double value, std::optional<double> gap,
                 const char* verdict) {
    char gap_text[32] = "-";
    if (gap) {
      std::snprintf(gap_text, sizeof gap_text, "%.6g", unit(*gap, bits));
    }
    std::snprintf(line, sizeof line, "%-9s %-14s %12.5f %14s  %s\n", ex, functional, unit(value, bits), gap_text,
                  verdict);
    table << line;
    doc[ex][functional] = {{"value", unit(value, bits)},
                           {"gap", gap ? json(unit(*gap, bits)) : json(nullptr)},
                           {"verdict", verdict}};
  };
  auto positivity = [](double gap) { return gap > 0.0 ? "strictly positive" : "NOT positive"; };
  std::snprintf(line, sizeof line, "%-9s %-14s %12s %14s  %s\n", "example", "functional",
                bits ? "value_bits" : "value_nats", "gap", "verdict");
  table << line;
  bool ok = true;
  try {
    if (name == "example1" || name == "all") {
      const ScalarChannel c = example1_default();
      const double mn = scalar_ie_min(c);
      const double ins = scalar_ie_ins(c);
      row("example1", "Ie_min", mn, std::nullopt, "reference");
      row("example1", "Ie_ins", ins, ins - mn, positivity(ins - mn));
      ok = ok && ins > mn;
    }
    if (name == "example2" || name == "all") {
      const ParallelModel p = example2_default();
      const ParallelValue mn = parallel_ie_min(p);
      const ParallelValue phi = parallel_ie_min_phi(p);
      const ParallelValue s = parallel_ie_min_s(p);
      row("example2", "Ie_min", mn.total, std::nullopt, "reference");
      row("example2", "Ie_min_phi", phi.total, phi.total - mn.total, positivity(phi.total - mn.total));
      row("example2", "Ie_min_S", s.total, s.total - mn.total, positivity(s.total - mn.total));
      const LeakageSolution sol =
          minimize_leakage(parallel_as_aligned(p), DistortionConstraint(parallel_as_aligned(p), parallel_distortion(p)));
      const double cross = sol.value - mn.total;
      row("example2", "vector_solver", sol.value, cross, std::abs(cross) < 1e-5 ? "matches Ie_min" : "MISMATCH");
      doc["example2"]["vector_solver"]["K_XU"] = sym_to_json(sol.pair.k_xu);
      ok = ok && phi.total > mn.total && s.total > mn.total && std::abs(cross) < 1e-5;
    }
    out << table.str();
    const std::string path = !o.out_json.empty() ? o.out_json : "examples-" + name + ".json";
    write_file(path, doc.dump(2) + "\n");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_construct(const CliOptions& o, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> c;
  try {
    c = load(o, err);
    if (!std::holds_alternative<AlignedModel>(c->model) || !c->distortion) {
      throw ConfigError("construct needs an aligned model and a \"distortion\"");
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const auto& m = std::get<AlignedModel>(c->model);
    const LeakageSolution sol = minimize_leakage(m, DistortionConstraint(m, *c->distortion), c->solver);
    const GaussianAuxRealization r = construct(m.k_x(), sol.pair);
    const AuxiliaryPair back = verify_conditional_covariances(m.k_x(), r);
    json doc{{"pair", {{"K_XV", sym_to_json(sol.pair.k_xv)}, {"K_XU", sym_to_json(sol.pair.k_xu)}}},
             {"A_V", matrix_to_json(r.a_v)},
             {"A_U", matrix_to_json(r.a_u)},
             {"A_UV", matrix_to_json(r.a_uv)},
             {"Sigma_N_tilde", sym_to_json(r.sigma_tilde_n)},
             {"W", matrix_to_json(r.w)},
             {"lambda_v", std::vector<double>(r.lambda_v.data(), r.lambda_v.data() + r.lambda_v.size())},
             {"lambda_u", std::vector<double>(r.lambda_u.data(), r.lambda_u.data() + r.lambda_u.size())},
             {"checks",
              {{"k_xv_roundtrip", (back.k_xv - sol.pair.k_xv).norm() / sol.pair.k_xv.norm()},
               {"k_xu_roundtrip", (back.k_xu - sol.pair.k_xu).norm() / sol.pair.k_xu.norm()},
               {"markov_residual", verify_markov(m.k_x(), r)}}}};
    emit(json_target(o, *c), doc.dump(2) + "\n", out);
    return sol.converged ? kExitOk : kExitNotConverged;
  } catch (const InfeasibleDistortion& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNotConverged;
  }
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian rate and leakage bounds with side information"};
  app.require_subcommand(1);
  CliOptions o;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool model_input) {
    if (model_input) {
      sub->add_option("--config", o.config_path, "JSON run configuration");
      sub->add_option("--preset", o.preset, "named configuration: example1-default, example2-default");
    }
    sub->add_option("--seed", seed, "random seed (overrides solver.seed)");
    sub->add_option("--tol", o.tol, "acceptance tolerance");
    sub->add_flag("--bits", o.bits, "report information quantities in bits");
    sub->add_option("--out-json", o.out_json, "JSON output path");
  };
  CLI::App* evaluate = app.add_subcommand("evaluate", "rate and leakage bounds at one distortion");
  add_common(evaluate, true);
  CLI::App* sweep = app.add_subcommand("sweep", "bounds along a linear distortion path, as CSV");
  add_common(sweep, true);
  sweep->add_option("--out-csv", o.out_csv, "CSV output path");
  CLI::App* verify = app.add_subcommand("verify", "run every property suite on random instances");
  add_common(verify, false);
  verify->add_option("--trials", o.trials, "random instances per suite");
  CLI::App* examples = app.add_subcommand("examples", "reproduce the scalar and parallel examples");
  add_common(examples, false);
  examples->add_option("name", o.example_name, "example1, example2 or all");
  CLI::App* constr = app.add_subcommand("construct", "export the Gaussian auxiliary realization of the optimum");
  add_common(constr, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    const int code = app.exit(e, msg, msg);
    (code == 0 ? out : err) << msg.str();
    return code == 0 ? kExitOk : kExitUsage;
  }
  for (CLI::App* sub : {evaluate, sweep, verify, examples, constr}) {
    if (sub->count("--seed") > 0) {
      o.seed = seed;
    }
  }
  if (evaluate->parsed()) return cmd_evaluate(o, out, err);
  if (sweep->parsed()) return cmd_sweep(o, out, err);
  if (verify->parsed()) return cmd_verify(o, out, err);
  if (examples->parsed()) return cmd_examples(o, out, err);
  return cmd_construct(o, out, err);
}

}  // namespace seclossy
