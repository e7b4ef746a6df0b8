// Command-line runner for the figure experiments.
//
//   gaugetrunc list
//   gaugetrunc validate --config cfg.json [--n-ph 80 ...]
//   gaugetrunc run fig1b --config cfg.json [--eta-max 0.5 ...]
//   gaugetrunc dump-basis [--out basis.json]
//
// Exit codes: 0 success, 2 configuration error, 3 convergence failure,
// 1 anything else.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "gaugetrunc/error.hpp"
#include "gaugetrunc/experiments.hpp"

using namespace gaugetrunc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;
constexpr const char* kOutputEnv = "GAUGETRUNC_OUTPUT_DIR";

std::string kebab(std::string s) {
  for (char& c : s) {
    if (c == '_') c = '-';
  }
  return s;
}

struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> values;
};

void add_config_options(CLI::App* app, Overrides& o, bool with_experiment) {
  app->add_option("--config", o.config_path, "JSON config file");
  for (const auto& key : config_keys()) {
    if (key == "experiment" && !with_experiment) continue;
    app->add_option("--" + kebab(key), o.values[key], "override '" + key + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot read config file " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// Defaults, then the config file, then the output-dir environment variable,
// then flags.
ValidationReport load_config(const Overrides& o, ExperimentConfig& cfg) {
  ValidationReport report;
  if (!o.config_path.empty()) {
    report = validate_config(read_file(o.config_path), &cfg);
  }
  if (const char* env = std::getenv(kOutputEnv); env && *env) cfg.output_dir = env;
  for (const auto& [key, value] : o.values) {
    if (value.empty()) continue;
    try {
      apply_override(cfg, key, value);
    } catch (const Error& e) {
      report.issues.push_back({0, key, e.detail(), "flag --" + kebab(key)});
    }
  }
  if (report.ok()) report = validate_config(cfg);
  return report;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidSpec:
      return kExitConfig;
    case ErrorCode::CutoffCeiling:
    case ErrorCode::NotConverged:
    case ErrorCode::CalibrationFailed:
      return kExitConvergence;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauge-relativity of material truncation: experiment runner"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List the experiments");

  Overrides validate_opts;
  auto* validate = app.add_subcommand("validate", "Check a config without running");
  add_config_options(validate, validate_opts, true);

  Overrides run_opts;
  std::string experiment;
  auto* run = app.add_subcommand("run", "Run one experiment, or 'all'");
  run->add_option("experiment", experiment, "experiment name or 'all'")->required();
  add_config_options(run, run_opts, false);

  Overrides dump_opts;
  std::string dump_out;
  auto* dump = app.add_subcommand("dump-basis", "Write the calibrated matter basis as JSON");
  dump->add_option("--out", dump_out, "output file (stdout if omitted)");
  add_config_options(dump, dump_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (list->parsed()) {
      for (const auto& e : list_experiments()) {
        std::cout << e.name << "  " << e.description << "\n";
      }
      std::cout << "all  every experiment above, in order\n";
      return 0;
    }

    if (validate->parsed()) {
      ExperimentConfig cfg;
      const auto report = load_config(validate_opts, cfg);
      const std::string source = validate_opts.config_path.empty() ? "flags" : validate_opts.config_path;
      if (!report.ok()) {
        std::cerr << report.format(source);
        return kExitConfig;
      }
      std::cout << source << ": ok\n";
      return 0;
    }

    if (dump->parsed()) {
      ExperimentConfig cfg;
      const auto report = load_config(dump_opts, cfg);
      if (!report.ok()) {
        std::cerr << report.format(dump_opts.config_path.empty() ? "flags" : dump_opts.config_path);
        return kExitConfig;
      }
      const std::string text = to_json(config_basis(cfg)).dump(2) + "\n";
      if (dump_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(dump_out, std::ios::binary);
        f << text;
        if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + dump_out);
      }
      return 0;
    }

    if (run->parsed()) {
      ExperimentConfig cfg;
      run_opts.values["experiment"] = experiment;
      const auto report = load_config(run_opts, cfg);
      if (!report.ok()) {
        std::cerr << report.format(run_opts.config_path.empty() ? "flags" : run_opts.config_path);
        return kExitConfig;
      }
      std::vector<std::string> names;
      if (experiment == "all") {
        for (const auto& e : list_experiments()) names.push_back(e.name);
      } else {
        names.push_back(experiment);
      }
      for (const auto& name : names) {
        cfg.experiment = name;
        const auto result = run_experiment(cfg);
        for (const auto& path : write_result(result, cfg.output_dir)) {
          std::cout << path << "\n";
        }
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
