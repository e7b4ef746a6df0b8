#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixture.hpp"
#include "gaugetrunc/experiments.hpp"

using namespace gaugetrunc;
using fixture::throws_code;

namespace {

bool has_issue(const ValidationReport& r, const std::string& key) {
  for (const auto& i : r.issues) {
    if (i.key == key) return true;
  }
  return false;
}

const ConfigIssue* issue_for(const ValidationReport& r, const std::string& key) {
  for (const auto& i : r.issues) {
    if (i.key == key) return &i;
  }
  return nullptr;
}

ExperimentConfig small(const std::string& name, std::vector<double> etas) {
  ExperimentConfig c;
  c.experiment = name;
  c.eta_values = std::move(etas);
  return c;
}

long column(const Table& t, const std::string& name) {
  for (size_t j = 0; j < t.columns.size(); ++j) {
    if (t.columns[j] == name) return static_cast<long>(j);
  }
  FAIL("missing column " << name);
  return -1;
}

}  // namespace

TEST_CASE("default config is valid") {
  const ExperimentConfig c;
  CHECK(validate_config(c).ok());
  CHECK(c.kept_levels == 2);
  CHECK(c.n_mat == 30);
  CHECK(c.eta_grid().size() == 101);
  CHECK(c.eta_grid().back() == doctest::Approx(1.0));
  const auto text = to_json(c).dump(2);
  ExperimentConfig back;
  CHECK(validate_config(text, &back).ok());
  CHECK(to_json(back) == to_json(c));
}

TEST_CASE("invariant violations") {
  ExperimentConfig c;
  c.eta_points = 0;
  CHECK(has_issue(validate_config(c), "eta_points"));
  c = {};
  c.n_ph = kMaxPhotons + 1;
  const auto r = validate_config(c);
  REQUIRE(issue_for(r, "n_ph"));
  CHECK_FALSE(issue_for(r, "n_ph")->hint.empty());
  c = {};
  c.eta_values = {0.5, 0.2};
  CHECK(has_issue(validate_config(c), "eta_values"));
  c = {};
  c.kept_levels = 40;
  CHECK(has_issue(validate_config(c), "kept_levels"));
  c = {};
  c.experiment = "fig9";
  CHECK(has_issue(validate_config(c), "experiment"));
  c = {};
  c.temperatures = {-0.1};
  c.kappa = -1.0;
  c.rel_tol = 0.5;
  const auto multi = validate_config(c);
  CHECK(multi.issues.size() == 3);
}

TEST_CASE("config text diagnostics carry line numbers") {
  const std::string text = "{\n  \"experiment\": \"fig2\",\n  \"n_ph\": 500,\n  \"colour\": 1,\n  \"kappa\": \"fast\"\n}\n";
  const auto r = validate_config(text);
  REQUIRE(issue_for(r, "n_ph"));
  CHECK(issue_for(r, "n_ph")->line == 3);
  REQUIRE(issue_for(r, "colour"));
  CHECK(issue_for(r, "colour")->line == 4);
  REQUIRE(issue_for(r, "kappa"));
  CHECK(issue_for(r, "kappa")->line == 5);
  const std::string formatted = r.format("cfg.json");
  CHECK(formatted.find("cfg.json:3: n_ph:") != std::string::npos);

  const auto broken = validate_config("{\n  \"kappa\": 0.1,\n  oops\n}");
  REQUIRE(broken.issues.size() == 1);
  CHECK(broken.issues[0].line == 3);
  CHECK_FALSE(validate_config("[1, 2]").ok());
}

TEST_CASE("overrides") {
  ExperimentConfig c;
  apply_override(c, "n_ph", "80");
  apply_override(c, "eta_values", "0.1,0.2");
  apply_override(c, "temperatures", "[0.3]");
  apply_override(c, "experiment", "figS3");
  CHECK(c.n_ph == 80);
  CHECK(c.eta_values == std::vector<double>{0.1, 0.2});
  CHECK(c.temperatures == std::vector<double>{0.3});
  CHECK(c.experiment == "figS3");
  CHECK(throws_code([&] { apply_override(c, "nope", "1"); }, ErrorCode::ConfigError));
  CHECK(throws_code([&] { apply_override(c, "n_ph", "1.5"); }, ErrorCode::ConfigError));
  CHECK(throws_code([&] { apply_override(c, "kappa", "abc"); }, ErrorCode::ConfigError));
  CHECK(config_keys().front() == "experiment");
}

TEST_CASE("catalog") {
  const auto& all = list_experiments();
  CHECK(all.size() == 10);
  CHECK(all.front().name == "fig1b");
  CHECK(throws_code([] { run_experiment(small("nope", {0.0})); }, ErrorCode::ConfigError));
}

TEST_CASE("fig1b ordering") {
  const auto r = run_experiment(small("fig1b", {0.0, 0.2, 0.6, 1.0}));
  REQUIRE(r.tables.size() == 1);
  const auto& t = r.tables[0];
  CHECK(t.columns == std::vector<std::string>{"eta", "bound_coulomb", "bound_dipole"});
  for (const auto& row : t.rows) {
    if (row[0] >= 0.2) CHECK(row[2] >= row[1]);
  }
  CHECK(t.rows[0][1] == doctest::Approx(1.0));
  CHECK(r.provenance.at("convergence").at("converged") == true);
  CHECK(r.provenance.contains("config_digest"));
}

TEST_CASE("fig3 in the decoupled limit") {
  const auto r = run_experiment(small("fig3", {0.0}));
  const auto& row = r.tables[0].rows[0];
  for (int i = 0; i < 3; ++i) {
    CHECK(row[1 + i] == doctest::Approx(row[4 + i]).epsilon(1e-8));
    CHECK(row[1 + i] == doctest::Approx(row[7 + i]).epsilon(1e-8));
  }
}

TEST_CASE("figS3 stays below 0.02") {
  auto c = small("figS3", {});
  c.eta_points = 11;
  const auto r = run_experiment(c);
  CHECK(r.provenance.at("max_abs_variation").get<double>() < 0.02);
  for (const auto& row : r.tables[0].rows) {
    for (size_t j = 1; j < row.size(); ++j) CHECK(std::abs(row[j]) < 0.02);
  }
}

TEST_CASE("fig2 tables") {
  auto c = small("fig2", {0.0, 1.0});
  c.temperatures = {0.25};
  const auto r = run_experiment(c);
  REQUIRE(r.tables.size() == 2);
  const auto& inset = r.tables[1];
  CHECK(inset.name == "fig2_inset");
  const auto& strong = inset.rows[1];
  const double exact = strong[column(inset, "n_et_exact")];
  CHECK(exact == doctest::Approx(0.150590).epsilon(1e-4));
  CHECK(std::abs(strong[column(inset, "n_et_h10_as_coulomb")] - exact) >
        3.0 * std::abs(strong[column(inset, "n_et_dipole_truncated")] - exact));
  // thermal photons of the free mode
  const auto& main = r.tables[0];
  CHECK(main.rows[0][column(main, "n_et_exact_T0.25")] == doctest::Approx(1.0 / std::expm1(4.0)).epsilon(1e-6));
}

TEST_CASE("csv layout and files") {
  Table t{"demo", {"eta", "value"}, "# eta: dimensionless; value: photons", {{0.0, -0.0}, {0.5, 1.0 / 3.0}}};
  const std::string csv = format_csv(t);
  CHECK(csv == "# eta: dimensionless; value: photons\neta,value\n"
               "0.000000000000e+00,0.000000000000e+00\n5.000000000000e-01,3.333333333333e-01\n");
  const auto dir = (std::filesystem::temp_directory_path() / "gaugetrunc_unit_out").string();
  std::filesystem::remove_all(dir);
  ExperimentResult res{"demo", {t}, {{"experiment", "demo"}}};
  const auto paths = write_result(res, dir);
  REQUIRE(paths.size() == 2);
  std::ifstream f(paths[0], std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == csv);
  const auto prov = nlohmann::json::parse(std::ifstream(paths[1]));
  CHECK(prov.at("files")[0] == "demo.csv");
  std::filesystem::remove_all(dir);
}

TEST_CASE("reruns and worker count do not change output") {
  auto c = small("figS1", {0.0, 0.4, 0.8});
  const auto a = run_experiment(c);
  const auto b = run_experiment(c);
  c.workers = 3;
  const auto d = run_experiment(c);
  REQUIRE(a.tables.size() == b.tables.size());
  for (size_t k = 0; k < a.tables.size(); ++k) {
    CHECK(format_csv(a.tables[k]) == format_csv(b.tables[k]));
    CHECK(format_csv(a.tables[k]) == format_csv(d.tables[k]));
  }
  CHECK(a.provenance.dump() == b.provenance.dump());
}

TEST_CASE("basis dump") {
  ExperimentConfig c;
  c.basis_levels = 8;
  c.n_mat = 8;
  const auto b = config_basis(c);
  CHECK(b.size() == 8);
  CHECK(b.anharmonicity() == doctest::Approx(70.0).epsilon(1e-3));
  const auto j = to_json(b);
  CHECK(j.contains("spec"));
}
