#include "gaugetrunc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "gaugetrunc/error.hpp"
#include "gaugetrunc/lindblad.hpp"

namespace gaugetrunc {

namespace {

using json = nlohmann::json;

constexpr const char* kVersion = "gaugetrunc 1.0.0";

// Values of one sweep point, concatenated across the experiment's tables
// (eta excluded).
using PointFn = std::function<std::vector<double>(const LightMatterSystem&)>;

struct TableSpec {
  std::string name;
  std::vector<std::string> columns;  // without the leading eta column
  std::string units;
};

struct Setup {
  ExperimentConfig cfg;
  MatterBasis basis;
};

LightMatterSystem system_at(const Setup& s, const Cutoffs& c, double eta) {
  ModeSpec mode;
  mode.omega = s.cfg.omega;
  mode.volume = s.cfg.volume;
  mode.n_photons = c.n_photon;
  return make_system(s.basis.truncated(c.n_matter), mode, eta, s.cfg.kept_levels);
}

std::vector<long> photon_schedule(long ceiling) {
  std::vector<long> out;
  for (long n : {16L, 20L, 24L, 28L, 32L, 40L, 48L, 56L, 64L, 80L, 96L, 112L, 128L, 144L, 160L}) {
    if (n < ceiling) out.push_back(n);
  }
  out.push_back(ceiling);
  return out;
}

std::vector<long> matter_schedule(long floor, long ceiling) {
  std::vector<long> out;
  for (long n = std::max(4L, floor); n < ceiling; n += 2) out.push_back(n);
  out.push_back(ceiling);
  return out;
}

struct Converged {
  Cutoffs cutoffs;
  json report;
};

// Two-direction escalation: photons at a probe matter size, then matter at
// the photon count found, then one photon step at the final matter size to
// confirm. Repeats with the larger matter size if the confirmation fails.
Converged converge_cutoffs(const Setup& s, double eta, const PointFn& fn) {
  const auto& cfg = s.cfg;
  json rounds = json::array();
  long probe = std::min(12L, cfg.n_mat);
  probe = std::max(probe, cfg.kept_levels);
  for (int round = 0; round < 4; ++round) {
    auto at = [&](const Cutoffs& c) { return fn(system_at(s, c, eta)); };

    std::vector<Cutoffs> ph;
    for (long n : photon_schedule(cfg.n_ph)) ph.push_back({probe, n});
    const ConvergenceReport a = converge(at, ph, cfg.rel_tol);
    const long nph = a.final_cutoffs.n_photon;

    std::vector<Cutoffs> mat;
    for (long n : matter_schedule(cfg.kept_levels, cfg.n_mat)) mat.push_back({n, nph});
    const ConvergenceReport b = converge(at, mat, cfg.rel_tol);
    const Cutoffs found = b.final_cutoffs;

    json entry = {{"photon_sweep", to_json(a)}, {"matter_sweep", to_json(b)}};
    const auto sched = photon_schedule(cfg.n_ph);
    auto next = std::upper_bound(sched.begin(), sched.end(), found.n_photon);
    if (next == sched.end()) {
      entry["confirmation"] = "photon ceiling reached";
      rounds.push_back(entry);
      return {found, {{"eta", eta}, {"converged", a.converged && b.converged}, {"rounds", rounds}}};
    }
    // Confirmation: the photon step must not move any value by more than
    // the tolerance.
    const auto v0 = b.steps.back().values;
    const auto v1 = at({found.n_matter, *next});
    double delta = 0.0;
    for (size_t j = 0; j < v0.size(); ++j) {
      delta = std::max(delta, std::abs(v1[j] - v0[j]) / std::max(std::abs(v1[j]), 1e-6));
    }
    entry["confirmation"] = {{"n_matter", found.n_matter}, {"n_photon", *next}, {"delta", delta}};
    rounds.push_back(entry);
    if (delta < cfg.rel_tol) return {found, {{"eta", eta}, {"converged", true}, {"rounds", rounds}}};
    probe = found.n_matter;
  }
  throw Error(ErrorCode::CutoffCeiling, "cutoffs did not settle after four escalation rounds");
}

template <typename Fn>
std::vector<std::vector<double>> parallel_rows(const std::vector<double>& etas, long workers,
                                               const Fn& fn) {
  std::vector<std::vector<double>> rows(etas.size());
  if (workers <= 1 || etas.size() < 2) {
    for (size_t k = 0; k < etas.size(); ++k) rows[k] = fn(etas[k]);
    return rows;
  }
  std::exception_ptr failure;
  std::mutex m;
  std::vector<std::thread> pool;
  const size_t w = std::min<size_t>(static_cast<size_t>(workers), etas.size());
  for (size_t id = 0; id < w; ++id) {
    pool.emplace_back([&, id] {
      for (size_t k = id; k < etas.size(); k += w) {
        try {
          rows[k] = fn(etas[k]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// FNV-1a over the canonical config dump.
std::string digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json basis_summary(const MatterBasis& b) {
  return {{"theta", b.spec.theta},   {"phi", b.spec.phi},       {"half_width", b.spec.half_width},
          {"n_grid", b.spec.n_grid}, {"levels", b.size()},      {"omega0", b.omega0()},
          {"mu", b.anharmonicity()}, {"x10", b.x10()}};
}

// Sweep experiment: converge at the largest eta, then evaluate every point
// at the converged cutoffs.
ExperimentResult sweep(const Setup& s, const std::vector<TableSpec>& specs, const PointFn& fn,
                       const std::vector<double>& etas) {
  const double eta_ref = *std::max_element(etas.begin(), etas.end());
  const Converged conv = converge_cutoffs(s, eta_ref, fn);
  const auto rows = parallel_rows(etas, s.cfg.workers, [&](double eta) {
    return fn(system_at(s, conv.cutoffs, eta));
  });

  ExperimentResult r;
  size_t offset = 0;
  for (const auto& spec : specs) {
    Table t;
    t.name = spec.name;
    t.columns.push_back("eta");
    t.columns.insert(t.columns.end(), spec.columns.begin(), spec.columns.end());
    t.units = spec.units;
    for (size_t k = 0; k < etas.size(); ++k) {
      std::vector<double> row{etas[k]};
      if (rows[k].size() < offset + spec.columns.size()) {
        throw Error(ErrorCode::DimensionMismatch, "row shorter than its table");
      }
      row.insert(row.end(), rows[k].begin() + offset,
                 rows[k].begin() + offset + spec.columns.size());
      t.rows.push_back(std::move(row));
    }
    offset += spec.columns.size();
    r.tables.push_back(std::move(t));
  }
  r.provenance["cutoffs"] = {{"n_matter", conv.cutoffs.n_matter},
                             {"n_photon", conv.cutoffs.n_photon},
                             {"kept_levels", s.cfg.kept_levels}};
  r.provenance["convergence"] = conv.report;
  return r;
}

bool crowded(const RVec& e, long i, double tol) {
  if (i > 0 && e(i) - e(i - 1) < tol) return true;
  return i + 1 < e.size() && e(i + 1) - e(i) < tol;
}

EigenSystem solve(const ModelKindSpec& kind, const LightMatterSystem& sys) {
  return eigensolve(build_model(kind, sys));
}

// ---- individual experiments ---------------------------------------------

ExperimentResult fig1b(const Setup& s) {
  const std::vector<TableSpec> specs = {
      {"fig1b", {"bound_coulomb", "bound_dipole"}, "# eta: dimensionless; bounds ||P E_alpha^0||^2: dimensionless"}};
  auto fn = [](const LightMatterSystem& sys) {
    const EigenSystem e0 = solve(ModelKindSpec::exact(0.0), sys);
    const EigenSystem e1 = solve(ModelKindSpec::exact(1.0), sys);
    return std::vector<double>{cs_bound(e0.state(0), sys.space), cs_bound(e1.state(0), sys.space)};
  };
  return sweep(s, specs, fn, s.cfg.eta_grid());
}

std::vector<Prescription> prescriptions_for(const ExperimentConfig& cfg) {
  auto p = standard_prescriptions();
  p[0].model = ModelKindSpec::exact(cfg.exact_gauge);
  p[0].frame = FramePrescription::exact_gauge(cfg.exact_gauge);
  return p;
}

std::string temperature_tag(double t) { return "T" + fmt_number(t); }

ExperimentResult fig2(const Setup& s) {
  const auto pres = prescriptions_for(s.cfg);
  const auto temps = s.cfg.temperatures;
  TableSpec main{"fig2", {}, "# eta: dimensionless; T: units of omega (k_B = 1); n_ET: photons"};
  for (double t : temps) {
    for (const auto& p : pres) main.columns.push_back("n_et_" + p.label + "_" + temperature_tag(t));
  }
  TableSpec inset{"fig2_inset", {}, "# eta: dimensionless; n_ET at T = 0: photons; delta0: dimensionless"};
  for (const auto& p : pres) inset.columns.push_back("n_et_" + p.label);
  inset.columns.push_back("delta0");

  auto fn = [pres, temps](const LightMatterSystem& sys) {
    FrameContext ctx(sys);
    std::vector<std::vector<double>> by_p;
    std::vector<double> ground;
    EigenSystem qrm;
    for (const auto& p : pres) {
      const EigenSystem es = solve(p.model, sys);
      const CMat op = represent(Observable::n_et(), p.frame, ctx);
      std::vector<double> vals;
      for (double t : temps) vals.push_back(thermal_average(op, es, t));
      by_p.push_back(vals);
      ground.push_back(expectation(op, es.state(0)));
      if (p.model.kind == ModelKind::Standard && p.model.alpha == 1.0) qrm = es;
    }
    std::vector<double> out;
    for (size_t ti = 0; ti < temps.size(); ++ti) {
      for (size_t pi = 0; pi < pres.size(); ++pi) out.push_back(by_p[pi][ti]);
    }
    out.insert(out.end(), ground.begin(), ground.end());
    out.push_back(expectation(delta_operator(sys, DeltaForm::Closed).matrix(), qrm.state(0)));
    return out;
  };
  auto r = sweep(s, {main, inset}, fn, s.cfg.eta_grid());
  r.provenance["temperature_units"] = "omega";
  return r;
}

ExperimentResult fig3(const Setup& s) {
  const TableSpec spec{"fig3",
                       {"exact_1", "exact_2", "exact_3", "qrm_1", "qrm_2", "qrm_3",
                        "h10_as_coulomb_1", "h10_as_coulomb_2", "h10_as_coulomb_3"},
                       "# eta: dimensionless; transition energies (E_i - E_0): units of omega"};
  const double g = s.cfg.exact_gauge;
  auto fn = [g](const LightMatterSystem& sys) {
    const double w = sys.mode.omega;
    FrameContext ctx(sys);
    std::vector<double> out = transition_energies(solve(ModelKindSpec::exact(g), sys), 3, w);
    const auto q = transition_energies(solve(ModelKindSpec::standard(1.0), sys), 3, w);
    out.insert(out.end(), q.begin(), q.end());
    const EigenSystem h = solve(ModelKindSpec::rotated(1.0, 0.0), sys);
    const CMat h0 = represent(Observable::energy(), FramePrescription::rotated_as_coulomb(), ctx);
    const double base = expectation(h0, h.state(0));
    for (long i = 1; i <= 3; ++i) out.push_back((expectation(h0, h.state(i)) - base) / w);
    return out;
  };
  return sweep(s, {spec}, fn, s.cfg.eta_grid());
}

ExperimentResult figS1(const Setup& s) {
  const TableSpec spec{"figS1",
                       {"fidelity_qrm", "fidelity_projected", "bound_dipole", "near_degenerate"},
                       "# eta: dimensionless; fidelities and bound: dimensionless; near_degenerate: flag"};
  auto fn = [](const LightMatterSystem& sys) {
    const double w = sys.mode.omega;
    const EigenSystem exact = solve(ModelKindSpec::exact(1.0), sys);
    const auto fq = paired_fidelity(solve(ModelKindSpec::standard(1.0), sys), exact, sys.space, w);
    const auto fp = paired_fidelity(solve(ModelKindSpec::projected(1.0), sys), exact, sys.space, w);
    return std::vector<double>{fq.fidelity, fp.fidelity, fq.bound,
                               (fq.near_degenerate || fp.near_degenerate) ? 1.0 : 0.0};
  };
  return sweep(s, {spec}, fn, s.cfg.eta_grid());
}

ExperimentResult figS2(const Setup& s) {
  const TableSpec spec{"figS2",
                       {"fidelity_coulomb_truncated", "fidelity_h10", "bound_coulomb",
                        "inset_ratio", "near_degenerate"},
                       "# eta: dimensionless; fidelities, bound and ratio: dimensionless; near_degenerate: flag"};
  auto fn = [](const LightMatterSystem& sys) {
    const double w = sys.mode.omega;
    const EigenSystem exact = solve(ModelKindSpec::exact(0.0), sys);
    const auto fc = paired_fidelity(solve(ModelKindSpec::standard(0.0), sys), exact, sys.space, w);
    const auto fh = paired_fidelity(solve(ModelKindSpec::rotated(1.0, 0.0), sys), exact, sys.space, w);
    return std::vector<double>{fc.fidelity, fh.fidelity, fh.bound, fh.fidelity / fh.bound,
                               (fc.near_degenerate || fh.near_degenerate) ? 1.0 : 0.0};
  };
  return sweep(s, {spec}, fn, s.cfg.eta_grid());
}

ExperimentResult figS3(const Setup& s) {
  const TableSpec spec{"figS3", {"delta_1", "delta_2", "delta_3"},
                       "# eta: dimensionless; <Delta>_i - <Delta>_0: dimensionless"};
  auto fn = [](const LightMatterSystem& sys) { return delta_variation(sys, 3); };
  auto r = sweep(s, {spec}, fn, s.cfg.eta_grid());
  double worst = 0.0;
  for (const auto& row : r.tables[0].rows) {
    for (size_t j = 1; j < row.size(); ++j) worst = std::max(worst, std::abs(row[j]));
  }
  r.provenance["max_abs_variation"] = worst;
  return r;
}

ExperimentResult figS4(const Setup& s) {
  const auto pres = prescriptions_for(s.cfg);
  TableSpec spec{"figS4", {}, "# eta: dimensionless; <Gamma>_0: dimensionless population"};
  for (const auto& p : pres) spec.columns.push_back("gamma_" + p.label);
  auto fn = [pres](const LightMatterSystem& sys) {
    FrameContext ctx(sys);
    std::vector<double> out;
    for (const auto& p : pres) {
      out.push_back(average(Observable::gamma(), p.frame, ctx, solve(p.model, sys), 0));
    }
    return out;
  };
  return sweep(s, {spec}, fn, s.cfg.eta_grid());
}

ExperimentResult figS5(const Setup& s) {
  const std::vector<std::pair<std::string, ModelKindSpec>> models = {
      {"exact", ModelKindSpec::exact(s.cfg.exact_gauge)},
      {"projected", ModelKindSpec::projected(1.0)},
      {"qrm", ModelKindSpec::standard(1.0)}};
  TableSpec energies{"figS5_energies", {}, "# eta: dimensionless; E_i: units of omega"};
  TableSpec transitions{"figS5_transitions", {}, "# eta: dimensionless; (E_i - E_0): units of omega"};
  for (const auto& [name, kind] : models) {
    for (int i = 0; i < 6; ++i) energies.columns.push_back(name + "_E" + std::to_string(i));
  }
  for (const auto& [name, kind] : models) {
    for (int i = 1; i < 6; ++i) transitions.columns.push_back(name + "_" + std::to_string(i));
  }
  auto fn = [models](const LightMatterSystem& sys) {
    const double w = sys.mode.omega;
    std::vector<double> e, t;
    for (const auto& [name, kind] : models) {
      const EigenSystem es = solve(kind, sys);
      for (int i = 0; i < 6; ++i) e.push_back(es.energies(i) / w);
      const auto tr = transition_energies(es, 5, w);
      t.insert(t.end(), tr.begin(), tr.end());
    }
    e.insert(e.end(), t.begin(), t.end());
    return e;
  };
  return sweep(s, {energies, transitions}, fn, s.cfg.eta_grid());
}

// Models for the dynamics: exact, dipole-truncated and h_1(0) read as a
// Coulomb-gauge model.
std::vector<Prescription> dynamics_prescriptions(const ExperimentConfig& cfg) {
  auto p = prescriptions_for(cfg);
  p.pop_back();
  return p;
}

struct OpenModel {
  LindbladSystem lindblad;
  CMat number;  // n_ET in the reduced eigenbasis
};

OpenModel open_model(const Prescription& p, const Observable& channel,
                     const LightMatterSystem& sys, const FrameContext& ctx,
                     const ExperimentConfig& cfg) {
  const EigenSystem es = solve(p.model, sys);
  const long n = std::min(cfg.n_lev, es.size());
  const CMat o = represent(channel, p.frame, ctx);
  return {make_lindblad(es, o, cfg.kappa, n, cfg.gap_tolerance * sys.mode.omega),
          reduce_operator(represent(Observable::n_et(), p.frame, ctx), es, n)};
}

ExperimentResult fig4(const Setup& s, const std::string& name, const Observable& channel) {
  const auto pres = dynamics_prescriptions(s.cfg);
  const ExperimentConfig cfg = s.cfg;

  TableSpec rates{name + "_rates", {}, "# eta: dimensionless; rates: units of omega (kappa in units of omega)"};
  for (const auto& p : pres) rates.columns.push_back("rate_" + p.label);
  for (const auto& p : pres) rates.columns.push_back("fit_rate_" + p.label);
  rates.columns.push_back("near_degenerate");

  auto rate_fn = [pres, channel, cfg](const LightMatterSystem& sys) {
    FrameContext ctx(sys);
    std::vector<double> direct, fitted;
    bool flag = false;
    for (const auto& p : pres) {
      const OpenModel m = open_model(p, channel, sys, ctx, cfg);
      direct.push_back(decay_rate(m.lindblad, 1));
      fitted.push_back(fitted_decay_rate(m.lindblad, 1));
      flag = flag || crowded(m.lindblad.energies(), 1, 1e-6 * sys.mode.omega);
    }
    direct.insert(direct.end(), fitted.begin(), fitted.end());
    direct.push_back(flag ? 1.0 : 0.0);
    return direct;
  };
  ExperimentResult r = sweep(s, {rates}, rate_fn, cfg.eta_grid());

  // Trajectory at the dynamics coupling, from the first excited eigenstate of
  // each model.
  const auto times = uniform_grid(0.0, cfg.t_max, cfg.t_points);
  json checks = json::object();
  auto traj_values = [&](const LightMatterSystem& sys, bool full) {
    FrameContext ctx(sys);
    std::vector<std::vector<double>> curves;
    std::vector<double> summary;
    for (const auto& p : pres) {
      const OpenModel m = open_model(p, channel, sys, ctx, cfg);
      const long n = m.lindblad.size();
      CMat rho0 = CMat::Zero(n, n);
      rho0(1, 1) = 1.0;
      summary.push_back(decay_rate(m.lindblad, 1));
      summary.push_back(m.number(0, 0).real());
      summary.push_back(m.number(1, 1).real());
      if (full) {
        const Trajectory tr = evolve(m.lindblad, rho0, times, {m.number});
        curves.push_back(tr.expectations[0]);
        checks[p.label] = {{"max_trace_error", tr.max_trace_error},
                           {"max_hermiticity_error", tr.max_hermiticity_error},
                           {"min_eigenvalue", tr.min_eigenvalue}};
      }
    }
    return std::make_pair(summary, curves);
  };
  const Converged conv = converge_cutoffs(
      s, cfg.eta_dynamics, [&](const LightMatterSystem& sys) { return traj_values(sys, false).first; });
  const auto curves = traj_values(system_at(s, conv.cutoffs, cfg.eta_dynamics), true).second;

  Table traj;
  traj.name = name + "_trajectory";
  traj.columns.push_back("t");
  for (const auto& p : pres) traj.columns.push_back("n_et_" + p.label);
  traj.units = "# t: units of 1/omega; n_ET: photons; eta = " + fmt_number(cfg.eta_dynamics) +
               ", kappa = " + fmt_number(cfg.kappa);
  for (size_t k = 0; k < times.size(); ++k) {
    std::vector<double> row{times[k]};
    for (const auto& c : curves) row.push_back(c[k]);
    traj.rows.push_back(std::move(row));
  }
  r.tables.insert(r.tables.begin(), std::move(traj));
  r.provenance["trajectory_cutoffs"] = {{"n_matter", conv.cutoffs.n_matter},
                                        {"n_photon", conv.cutoffs.n_photon}};
  r.provenance["trajectory_convergence"] = conv.report;
  r.provenance["trajectory_checks"] = checks;
  r.provenance["channel"] = to_string(channel);
  r.provenance["initial_state"] = "first excited eigenstate of each model";
  r.provenance["rate_definitions"] = {
      {"rate", "kappa * sum_{E_j < E_1} |<E_j|O|E_1>|^2"},
      {"fit_rate", "least-squares slope of -log population of level 1 over t in [0, 3/rate]"}};
  return r;
}

const std::vector<std::pair<ExperimentInfo, std::function<ExperimentResult(const Setup&)>>>&
catalog() {
  static const std::vector<std::pair<ExperimentInfo, std::function<ExperimentResult(const Setup&)>>>
      c = {
          {{"fig1b", "ground-state Cauchy-Schwarz bounds ||P E_alpha^0||^2 vs eta, alpha = 0, 1"}, fig1b},
          {{"fig2", "thermal and T = 0 <n_ET> vs eta for exact, H_1^2, h_1(0)-as-Coulomb, H_0^2"}, fig2},
          {{"fig3", "first three transition energies: exact, QRM, h_1(0)-as-Coulomb"}, fig3},
          {{"fig4a", "dynamics and decay rates for loss through Q_ET"},
           [](const Setup& s) { return fig4(s, "fig4a", Observable::q_et()); }},
          {{"fig4b", "dynamics and decay rates for loss through p/omega"},
           [](const Setup& s) { return fig4(s, "fig4b", Observable::p_over_omega()); }},
          {{"figS1", "ground-state fidelities of H_1^2 and P H_1 P with the exact dipole-gauge state"}, figS1},
          {{"figS2", "ground-state fidelities of H_0^2 and h_1(0) with the exact Coulomb-gauge state"}, figS2},
          {{"figS3", "<Delta>_i - <Delta>_0 for i = 1, 2, 3 vs eta"}, figS3},
          {{"figS4", "ground-state <Gamma>_0 vs eta per prescription"}, figS4},
          {{"figS5", "six lowest energies and transitions: exact, P H_1 P, H_1^2"}, figS5},
      };
  return c;
}

}  // namespace

const std::vector<ExperimentInfo>& list_experiments() {
  static const std::vector<ExperimentInfo> info = [] {
    std::vector<ExperimentInfo> out;
    for (const auto& [i, fn] : catalog()) out.push_back(i);
    return out;
  }();
  return info;
}

MatterBasis config_basis(const ExperimentConfig& cfg) {
  const MatterSpec spec = calibrate_potential(cfg.mu, cfg.omega, cfg.basis_levels, cfg.n_grid);
  return solve_double_well(spec);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const ValidationReport report = validate_config(cfg);
  if (!report.ok()) throw Error(ErrorCode::ConfigError, report.format("config"));
  for (const auto& [info, fn] : catalog()) {
    if (info.name != cfg.experiment) continue;
    try {
      Setup s{cfg, config_basis(cfg)};
      ExperimentResult r = fn(s);
      r.experiment = cfg.experiment;
      const json cj = to_json(cfg);
      r.provenance["experiment"] = cfg.experiment;
      r.provenance["description"] = info.description;
      r.provenance["config"] = cj;
      r.provenance["config_digest"] = digest(cj.dump());
      r.provenance["version"] = kVersion;
      r.provenance["basis"] = basis_summary(s.basis);
      r.provenance["tolerances"] = {{"convergence_rel_tol", cfg.rel_tol},
                                    {"gap_tolerance", cfg.gap_tolerance},
                                    {"hermiticity", 1e-10}};
      r.provenance["units"] = {{"hbar", 1}, {"mass", 1}, {"energy", "omega"}};
      return r;
    } catch (const Error& e) {
      throw Error(e.code(), cfg.experiment + ": " + e.detail());
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown experiment '" + cfg.experiment + "'");
}

std::string format_csv(const Table& table) {
  std::ostringstream os;
  os << table.units << "\n";
  for (size_t j = 0; j < table.columns.size(); ++j) os << (j ? "," : "") << table.columns[j];
  os << "\n";
  char buf[40];
  for (const auto& row : table.rows) {
    for (size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.12e", row[j] == 0.0 ? 0.0 : row[j]);
      os << (j ? "," : "") << buf;
    }
    os << "\n";
  }
  return os.str();
}

std::vector<std::string> write_result(const ExperimentResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  for (const auto& t : result.tables) {
    const auto path = (std::filesystem::path(dir) / (t.name + ".csv")).string();
    std::ofstream f(path, std::ios::binary);
    f << format_csv(t);
    if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + path);
    paths.push_back(path);
  }
  json prov = result.provenance;
  json files = json::array();
  for (const auto& t : result.tables) files.push_back(t.name + ".csv");
  prov["files"] = files;
  const auto path = (std::filesystem::path(dir) / (result.experiment + ".json")).string();
  std::ofstream f(path, std::ios::binary);
  f << prov.dump(2) << "\n";
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  paths.push_back(path);
  return paths;
}

}  // namespace gaugetrunc
