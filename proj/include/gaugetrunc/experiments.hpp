#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "gaugetrunc/analysis.hpp"

namespace gaugetrunc {

inline constexpr long kMaxPhotons = 160;
inline constexpr long kMaxMatter = 60;
inline constexpr long kMaxLevels = 40;
inline constexpr long kMaxEtaPoints = 1001;

/// Run configuration. Every field maps to a top-level JSON key of the same
/// name and to a command-line flag with dashes for underscores.
struct ExperimentConfig {
  std::string experiment = "fig1b";
  double eta_min = 0.0;
  double eta_max = 1.0;
  long eta_points = 101;
  std::vector<double> eta_values;  // overrides the uniform grid when non-empty
  std::vector<double> temperatures{0.1, 0.25, 0.5};  // units of omega
  double kappa = 0.05;
  double t_max = 200.0;
  long t_points = 201;
  double eta_dynamics = 0.5;
  long kept_levels = 2;
  long n_mat = 30;  // ceilings for the convergence schedule
  long n_ph = 60;
  long n_lev = 40;
  double mu = 70.0;
  double omega = 1.0;
  double volume = 1.0;
  long n_grid = 512;
  long basis_levels = 30;
  double exact_gauge = 1.0;
  double rel_tol = 1e-6;
  double gap_tolerance = 1e-8;
  std::string output_dir = "out";
  long seed = 0;
  long workers = 1;

  std::vector<double> eta_grid() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);

struct ConfigIssue {
  long line = 0;  // 0 when the problem is not tied to a line
  std::string key;
  std::string message;
  std::string hint;
};

struct ValidationReport {
  std::vector<ConfigIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string format(const std::string& source) const;
};

/// Parses and checks a JSON config document, starting from the defaults.
/// Unknown keys, wrong types and violated invariants become issues with the
/// line of the offending key.
ValidationReport validate_config(const std::string& text, ExperimentConfig* out = nullptr);

/// Invariant checks on an already populated config.
ValidationReport validate_config(const ExperimentConfig& cfg);

/// Apply "key" -> "raw value" overrides (values parsed by the type of the
/// key). Throws Error{ConfigError} on unknown keys or unparsable values.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Config keys in declaration order.
const std::vector<std::string>& config_keys();

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::string units;
  std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<Table> tables;
  nlohmann::json provenance;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
};

const std::vector<ExperimentInfo>& list_experiments();

/// Runs one experiment. Module errors are rethrown with the experiment name
/// prepended, keeping their code.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Text of a table as written to disk: a '#' units line, a header and one
/// line per row with every value printed as %.12e.
std::string format_csv(const Table& table);

/// Writes <dir>/<table>.csv for every table and <dir>/<experiment>.json with
/// the provenance. Returns the paths written.
std::vector<std::string> write_result(const ExperimentResult& result, const std::string& dir);

/// Calibrated matter basis for a config.
MatterBasis config_basis(const ExperimentConfig& cfg);

}  // namespace gaugetrunc
