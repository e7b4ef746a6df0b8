#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "gaugetrunc/error.hpp"
#include "gaugetrunc/experiments.hpp"

namespace gaugetrunc {

std::vector<double> ExperimentConfig::eta_grid() const {
  if (!eta_values.empty()) return eta_values;
  std::vector<double> out;
  if (eta_points == 1) return {eta_min};
  for (long k = 0; k < eta_points; ++k) {
    out.push_back(eta_min + (eta_max - eta_min) * static_cast<double>(k) /
                                static_cast<double>(eta_points - 1));
  }
  return out;
}

namespace {

using json = nlohmann::json;

enum class Kind { Real, Integer, Text, RealList };

struct Field {
  std::string key;
  Kind kind;
  std::function<json(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const json&)> set;
};

template <typename T>
Field field(const std::string& key, Kind kind, T ExperimentConfig::*member) {
  return {key, kind, [member](const ExperimentConfig& c) { return json(c.*member); },
          [member](ExperimentConfig& c, const json& j) { c.*member = j.get<T>(); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      field("experiment", Kind::Text, &ExperimentConfig::experiment),
      field("eta_min", Kind::Real, &ExperimentConfig::eta_min),
      field("eta_max", Kind::Real, &ExperimentConfig::eta_max),
      field("eta_points", Kind::Integer, &ExperimentConfig::eta_points),
      field("eta_values", Kind::RealList, &ExperimentConfig::eta_values),
      field("temperatures", Kind::RealList, &ExperimentConfig::temperatures),
      field("kappa", Kind::Real, &ExperimentConfig::kappa),
      field("t_max", Kind::Real, &ExperimentConfig::t_max),
      field("t_points", Kind::Integer, &ExperimentConfig::t_points),
      field("eta_dynamics", Kind::Real, &ExperimentConfig::eta_dynamics),
      field("kept_levels", Kind::Integer, &ExperimentConfig::kept_levels),
      field("n_mat", Kind::Integer, &ExperimentConfig::n_mat),
      field("n_ph", Kind::Integer, &ExperimentConfig::n_ph),
      field("n_lev", Kind::Integer, &ExperimentConfig::n_lev),
      field("mu", Kind::Real, &ExperimentConfig::mu),
      field("omega", Kind::Real, &ExperimentConfig::omega),
      field("volume", Kind::Real, &ExperimentConfig::volume),
      field("n_grid", Kind::Integer, &ExperimentConfig::n_grid),
      field("basis_levels", Kind::Integer, &ExperimentConfig::basis_levels),
      field("exact_gauge", Kind::Real, &ExperimentConfig::exact_gauge),
      field("rel_tol", Kind::Real, &ExperimentConfig::rel_tol),
      field("gap_tolerance", Kind::Real, &ExperimentConfig::gap_tolerance),
      field("output_dir", Kind::Text, &ExperimentConfig::output_dir),
      field("seed", Kind::Integer, &ExperimentConfig::seed),
      field("workers", Kind::Integer, &ExperimentConfig::workers),
  };
  return f;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

bool type_matches(Kind kind, const json& j) {
  switch (kind) {
    case Kind::Real: return j.is_number();
    case Kind::Integer: return j.is_number_integer();
    case Kind::Text: return j.is_string();
    case Kind::RealList:
      return j.is_array() && std::all_of(j.begin(), j.end(),
                                         [](const json& e) { return e.is_number(); });
  }
  return false;
}

const char* kind_name(Kind kind) {
  switch (kind) {
    case Kind::Real: return "a number";
    case Kind::Integer: return "an integer";
    case Kind::Text: return "a string";
    case Kind::RealList: return "an array of numbers";
  }
  return "?";
}

long line_of_offset(const std::string& text, size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<long>(std::count(text.begin(), text.begin() + offset, '\n'));
}

long line_of_key(const std::string& text, const std::string& key) {
  if (text.empty()) return 0;
  const size_t pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

bool known_experiment(const std::string& name) {
  if (name == "all") return true;
  for (const auto& e : list_experiments()) {
    if (e.name == name) return true;
  }
  return false;
}

void check_invariants(const ExperimentConfig& c, std::vector<ConfigIssue>& out) {
  auto fail = [&](const std::string& key, const std::string& msg, const std::string& hint = "") {
    out.push_back({0, key, msg, hint});
  };
  if (!known_experiment(c.experiment)) {
    fail("experiment", "unknown experiment '" + c.experiment + "'",
         "run 'gaugetrunc list' for the catalog");
  }
  if (c.eta_values.empty()) {
    if (c.eta_points < 1) fail("eta_points", "empty eta grid", "use at least one point");
    if (c.eta_points > kMaxEtaPoints) {
      fail("eta_points", "more than " + std::to_string(kMaxEtaPoints) + " eta points");
    }
    if (!(c.eta_min >= 0.0)) fail("eta_min", "eta grid must be non-negative");
    if (!(c.eta_max >= c.eta_min)) fail("eta_max", "eta_max is below eta_min");
  } else {
    if (static_cast<long>(c.eta_values.size()) > kMaxEtaPoints) {
      fail("eta_values", "more than " + std::to_string(kMaxEtaPoints) + " eta points");
    }
    for (size_t k = 0; k < c.eta_values.size(); ++k) {
      if (!(c.eta_values[k] >= 0.0)) fail("eta_values", "eta grid must be non-negative");
      if (k > 0 && !(c.eta_values[k] > c.eta_values[k - 1])) {
        fail("eta_values", "eta grid must be strictly ascending");
        break;
      }
    }
  }
  for (double t : c.temperatures) {
    if (!(t >= 0.0)) fail("temperatures", "temperatures must be non-negative");
  }
  if (!(c.kappa >= 0.0)) fail("kappa", "kappa must be non-negative");
  if (!(c.t_max > 0.0)) fail("t_max", "t_max must be positive");
  if (c.t_points < 2 || c.t_points > 100001) fail("t_points", "t_points must be in [2, 100001]");
  if (!(c.eta_dynamics >= 0.0)) fail("eta_dynamics", "eta_dynamics must be non-negative");
  if (c.kept_levels < 1 || c.kept_levels > c.n_mat) {
    fail("kept_levels", "kept_levels must be in [1, n_mat]", "M = 1 means kept_levels = 2");
  }
  if (c.basis_levels < 4 || c.basis_levels > kMaxMatter) {
    fail("basis_levels", "basis_levels must be in [4, " + std::to_string(kMaxMatter) + "]");
  }
  if (c.n_mat < 2 || c.n_mat > std::min(kMaxMatter, c.basis_levels)) {
    fail("n_mat", "n_mat must be in [2, min(" + std::to_string(kMaxMatter) + ", basis_levels)]",
         "lower n_mat or raise basis_levels");
  }
  if (c.n_ph < 16 || c.n_ph > kMaxPhotons) {
    fail("n_ph", "n_ph must be in [16, " + std::to_string(kMaxPhotons) + "]",
         "the photon ceiling bounds memory and runtime; 60 converges every default experiment");
  }
  if (c.n_lev < 2 || c.n_lev > kMaxLevels) {
    fail("n_lev", "n_lev must be in [2, " + std::to_string(kMaxLevels) + "]",
         "the dynamics keep at most 40 eigenstates");
  }
  if (!(c.mu > 0.0)) fail("mu", "anharmonicity must be positive");
  if (!(c.omega > 0.0)) fail("omega", "omega must be positive");
  if (!(c.volume > 0.0)) fail("volume", "volume must be positive");
  if (c.n_grid < 64 || c.n_grid > 4096) fail("n_grid", "n_grid must be in [64, 4096]");
  if (!std::isfinite(c.exact_gauge)) fail("exact_gauge", "exact_gauge must be finite");
  if (!(c.rel_tol > 0.0 && c.rel_tol <= 1e-2)) fail("rel_tol", "rel_tol must be in (0, 1e-2]");
  if (!(c.gap_tolerance > 0.0)) fail("gap_tolerance", "gap_tolerance must be positive");
  if (c.output_dir.empty()) fail("output_dir", "output_dir is empty");
  if (c.workers < 1 || c.workers > 64) fail("workers", "workers must be in [1, 64]");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  json j = json::object();
  for (const auto& f : fields()) j[f.key] = f.get(cfg);
  return j;
}

std::string ValidationReport::format(const std::string& source) const {
  std::ostringstream os;
  for (const auto& i : issues) {
    os << source;
    if (i.line > 0) os << ":" << i.line;
    os << ": " << (i.key.empty() ? "" : i.key + ": ") << i.message;
    if (!i.hint.empty()) os << " (hint: " << i.hint << ")";
    os << "\n";
  }
  return os.str();
}

ValidationReport validate_config(const ExperimentConfig& cfg) {
  ValidationReport r;
  check_invariants(cfg, r.issues);
  return r;
}

ValidationReport validate_config(const std::string& text, ExperimentConfig* out) {
  ValidationReport r;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    r.issues.push_back({line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), "",
                        std::string("malformed JSON: ") + e.what(), ""});
    return r;
  }
  if (!doc.is_object()) {
    r.issues.push_back({1, "", "config must be a JSON object", ""});
    return r;
  }
  ExperimentConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    const Field* f = find_field(key);
    if (!f) {
      r.issues.push_back({line_of_key(text, key), key, "unknown key", "see README for the key list"});
      continue;
    }
    if (!type_matches(f->kind, value)) {
      r.issues.push_back({line_of_key(text, key), key,
                          std::string("expected ") + kind_name(f->kind), ""});
      continue;
    }
    f->set(cfg, value);
  }
  std::vector<ConfigIssue> inv;
  check_invariants(cfg, inv);
  for (auto& i : inv) {
    i.line = line_of_key(text, i.key);
    r.issues.push_back(i);
  }
  if (out) *out = cfg;
  return r;
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
  json j;
  try {
    switch (f->kind) {
      case Kind::Text: j = value; break;
      case Kind::RealList: {
        // Accept "0.1,0.2" as well as a JSON array.
        const std::string arr = !value.empty() && value.front() == '[' ? value : "[" + value + "]";
        j = json::parse(arr);
        break;
      }
      default: j = json::parse(value); break;
    }
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::ConfigError, "cannot parse value '" + value + "' for " + key);
  }
  if (!type_matches(f->kind, j)) {
    throw Error(ErrorCode::ConfigError,
                key + " expects " + kind_name(f->kind) + ", got '" + value + "'");
  }
  f->set(cfg, j);
}

}  // namespace gaugetrunc
