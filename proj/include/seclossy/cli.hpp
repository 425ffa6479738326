#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "seclossy/genmodel.hpp"
#include "seclossy/leakopt.hpp"

namespace seclossy {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNotConverged = 2, kExitVerifyFailed = 3 };

struct SweepSpec {
  SymMatrix from;
  SymMatrix to;
  int steps = 2;
  std::string path = "linear";

  /// D(t) = (1 - t) from + t to with t = index / (steps - 1); steps == 1 gives from.
  SymMatrix at(int index) const;
};

struct OutputPaths {
  std::string csv_path;
  std::string json_path;
};

struct RunConfig {
  std::variant<AlignedModel, GeneralModel> model;
  std::optional<SymMatrix> distortion;
  std::optional<SweepSpec> sweep;
  SolverOptions solver;
  OutputPaths outputs;
};

/// {"dim": n, "rows": [[...]]}; asymmetry above 1e-9 is averaged away with a warning on warn.
SymMatrix sym_from_json(const nlohmann::json& j, const char* what, std::ostream* warn = nullptr);
nlohmann::json sym_to_json(const SymMatrix& m);

/// {"dim": [rows, cols], "rows": [[...]]}; an integer dim means square.
Matrix matrix_from_json(const nlohmann::json& j, const char* what);
nlohmann::json matrix_to_json(const Matrix& m);

/// Throws ConfigError on schema violations and InfeasibleDistortion on
/// infeasible distortion or sweep endpoints.
RunConfig parse_config(const nlohmann::json& j, std::ostream* warn = nullptr);
nlohmann::json serialize_config(const RunConfig& c);
RunConfig load_config(const std::string& path, std::ostream* warn = nullptr);

/// Named configurations: "example1-default" and "example2-default".
RunConfig preset_config(const std::string& name);

struct CliOptions {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  int trials = 100;
  std::optional<double> tol;
  bool bits = false;
  std::string out_json;
  std::string out_csv;
  std::string example_name = "all";
};

int cmd_evaluate(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_verify(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_examples(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_construct(const CliOptions& o, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

struct SuiteResult {
  std::string name;
  bool passed = false;
  int cases = 0;
  double max_residual = 0.0;
  double threshold = 0.0;
};

/// Every property suite over `trials` seeded random instances. A tolerance
/// override replaces each suite's own threshold.
std::vector<SuiteResult> run_verification(std::uint64_t seed, int trials, std::optional<double> tol);

}  // namespace seclossy
