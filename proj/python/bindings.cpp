#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gaugetrunc/analysis.hpp"
#include "gaugetrunc/error.hpp"
#include "gaugetrunc/experiments.hpp"
#include "gaugetrunc/lindblad.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace gaugetrunc;

namespace {

DeltaForm delta_form(const std::string& name) {
  if (name == "closed") return DeltaForm::Closed;
  if (name == "rotation") return DeltaForm::RotationDifference;
  if (name == "hamiltonian") return DeltaForm::HamiltonianDifference;
  throw Error(ErrorCode::InvalidSpec, "delta form must be closed, rotation or hamiltonian");
}

py::dict table_dict(const Table& t) {
  const long rows = static_cast<long>(t.rows.size());
  const long cols = static_cast<long>(t.columns.size());
  RMat data(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) data(i, j) = t.rows[i][j];
  return py::dict("name"_a = t.name, "columns"_a = t.columns, "units"_a = t.units, "data"_a = data);
}

py::dict trajectory_dict(const Trajectory& tr) {
  return py::dict("times"_a = tr.times, "expectations"_a = tr.expectations, "states"_a = tr.states,
                  "max_trace_error"_a = tr.max_trace_error,
                  "max_hermiticity_error"_a = tr.max_hermiticity_error,
                  "min_eigenvalue"_a = tr.min_eigenvalue);
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  const auto report = validate_config(text, &cfg);
  if (!report.ok()) throw Error(ErrorCode::ConfigError, report.format("config"));
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gauge-consistent truncation of a double-well dipole in a cavity mode";

  static py::exception<Error> error(m, "GaugetruncError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object args = py::make_tuple(std::string(to_string(e.code())), e.detail());
      PyErr_SetObject(error.ptr(), args.ptr());
    }
  });

  // matter ----------------------------------------------------------------
  py::class_<MatterSpec>(m, "MatterSpec")
      .def(py::init<>())
      .def_readwrite("mass", &MatterSpec::mass)
      .def_readwrite("theta", &MatterSpec::theta)
      .def_readwrite("phi", &MatterSpec::phi)
      .def_readwrite("half_width", &MatterSpec::half_width)
      .def_readwrite("n_grid", &MatterSpec::n_grid)
      .def_readwrite("n_levels", &MatterSpec::n_levels)
      .def("potential", &MatterSpec::potential);

  py::class_<MatterBasis>(m, "MatterBasis")
      .def_readonly("eps", &MatterBasis::eps)
      .def_readonly("x", &MatterBasis::x)
      .def_readonly("p", &MatterBasis::p)
      .def_readonly("x2", &MatterBasis::x2)
      .def_readonly("spec", &MatterBasis::spec)
      .def_property_readonly("size", &MatterBasis::size)
      .def_property_readonly("omega0", &MatterBasis::omega0)
      .def_property_readonly("anharmonicity", &MatterBasis::anharmonicity)
      .def_property_readonly("x10", &MatterBasis::x10)
      .def("truncated", &MatterBasis::truncated, "levels"_a);

  m.def("calibrate_potential", &calibrate_potential, "mu"_a = 70.0, "omega"_a = 1.0,
        "n_levels"_a = 30, "n_grid"_a = 512);
  m.def("solve_double_well", [](const MatterSpec& s) { return solve_double_well(s); }, "spec"_a);

  // coupled system -------------------------------------------------------
  py::class_<ModeSpec>(m, "ModeSpec")
      .def(py::init([](double omega, double volume, long n_photons) {
             ModeSpec s;
             s.omega = omega;
             s.volume = volume;
             s.n_photons = n_photons;
             return s;
           }),
           "omega"_a = 1.0, "volume"_a = 1.0, "n_photons"_a = 40)
      .def_readwrite("omega", &ModeSpec::omega)
      .def_readwrite("volume", &ModeSpec::volume)
      .def_readwrite("n_photons", &ModeSpec::n_photons);

  py::class_<LightMatterSystem>(m, "LightMatterSystem")
      .def_readonly("basis", &LightMatterSystem::basis)
      .def_readonly("mode", &LightMatterSystem::mode)
      .def_property_readonly("eta", &LightMatterSystem::eta)
      .def_property_readonly("charge", &LightMatterSystem::charge)
      .def_property_readonly("n_matter", [](const LightMatterSystem& s) { return s.space.n_matter; })
      .def_property_readonly("n_photon", [](const LightMatterSystem& s) { return s.space.n_photon; })
      .def_property_readonly("kept_levels", [](const LightMatterSystem& s) { return s.space.kept_levels; });

  m.def("make_system", &make_system, "basis"_a, "mode"_a, "eta"_a, "kept_levels"_a = 2);
  m.def("h_alpha", [](double a, const LightMatterSystem& s) { return build_h_alpha(a, s).matrix(); },
        "alpha"_a, "system"_a);
  m.def("gauge_unitary",
        [](double a, double b, const LightMatterSystem& s) { return gauge_unitary(a, b, s).matrix(); },
        "alpha"_a, "alpha_prime"_a, "system"_a);
  m.def("delta_operator",
        [](const LightMatterSystem& s, const std::string& form) {
          return delta_operator(s, delta_form(form)).matrix();
        },
        "system"_a, "form"_a = "closed");

  py::class_<ModelKindSpec>(m, "ModelKind")
      .def_static("exact", &ModelKindSpec::exact, "alpha"_a)
      .def_static("standard", &ModelKindSpec::standard, "alpha"_a)
      .def_static("projected", &ModelKindSpec::projected, "alpha"_a)
      .def_static("rotated", &ModelKindSpec::rotated, "source"_a, "target"_a)
      .def("__repr__", [](const ModelKindSpec& k) { return to_string(k); });

  py::class_<EigenSystem>(m, "EigenSystem")
      .def_readonly("energies", &EigenSystem::energies)
      .def_readonly("vectors", &EigenSystem::vectors)
      .def_readonly("on_subspace", &EigenSystem::on_subspace)
      .def("state", &EigenSystem::state, "index"_a);

  m.def("hamiltonian",
        [](const ModelKindSpec& k, const LightMatterSystem& s) { return build_model(k, s).hamiltonian.matrix(); },
        "kind"_a, "system"_a);
  m.def("eigensolve",
        [](const ModelKindSpec& k, const LightMatterSystem& s) { return eigensolve(build_model(k, s)); },
        "kind"_a, "system"_a);

  // analysis --------------------------------------------------------------
  py::class_<Observable>(m, "Observable")
      .def_static("n_et", &Observable::n_et)
      .def_static("gamma", &Observable::gamma)
      .def_static("q_et", &Observable::q_et)
      .def_static("p_over_omega", &Observable::p_over_omega)
      .def_static("energy", &Observable::energy)
      .def_static("custom", &Observable::custom, "coulomb_matrix"_a)
      .def("__repr__", [](const Observable& o) { return to_string(o); });

  py::class_<FramePrescription>(m, "Frame")
      .def_static("exact_gauge", &FramePrescription::exact_gauge, "alpha"_a)
      .def_static("dipole_truncated", &FramePrescription::dipole_truncated)
      .def_static("rotated_correct", &FramePrescription::rotated_correct)
      .def_static("rotated_as_coulomb", &FramePrescription::rotated_as_coulomb)
      .def_static("naive_coulomb", &FramePrescription::naive_coulomb)
      .def("__repr__", [](const FramePrescription& f) { return to_string(f); });

  py::class_<FrameContext>(m, "FrameContext").def(py::init<LightMatterSystem>(), "system"_a);

  m.def("represent", &represent, "observable"_a, "frame"_a, "context"_a);
  m.def("average",
        py::overload_cast<const Observable&, const FramePrescription&, const FrameContext&,
                          const EigenSystem&, long>(&average),
        "observable"_a, "frame"_a, "context"_a, "eigensystem"_a, "index"_a = 0);
  m.def("thermal_average",
        py::overload_cast<const Observable&, const FramePrescription&, const FrameContext&,
                          const EigenSystem&, double>(&thermal_average),
        "observable"_a, "frame"_a, "context"_a, "eigensystem"_a, "temperature"_a);
  m.def("fidelity", &fidelity, "u"_a, "v"_a);
  m.def("cs_bound", [](const CVec& s, const LightMatterSystem& sys) { return cs_bound(s, sys.space); },
        "state"_a, "system"_a);
  m.def("paired_fidelity",
        [](const EigenSystem& t, const EigenSystem& e, const LightMatterSystem& sys, long index) {
          const auto r = paired_fidelity(t, e, sys.space, sys.mode.omega, index);
          return py::dict("fidelity"_a = r.fidelity, "bound"_a = r.bound,
                          "near_degenerate"_a = r.near_degenerate);
        },
        "truncated"_a, "exact"_a, "system"_a, "index"_a = 0);
  m.def("transition_energies", &transition_energies, "eigensystem"_a, "count"_a, "omega"_a = 1.0);
  m.def("delta_variation",
        [](const LightMatterSystem& s, long i_max, const std::string& form) {
          return delta_variation(s, i_max, delta_form(form));
        },
        "system"_a, "i_max"_a, "form"_a = "closed");

  // dynamics --------------------------------------------------------------
  py::class_<LindbladSystem>(m, "LindbladSystem")
      .def(py::init<RVec, CMat, double, double>(), "energies"_a, "coupling"_a, "kappa"_a,
           "gap_tolerance"_a = 1e-8)
      .def_property_readonly("size", &LindbladSystem::size)
      .def_property_readonly("energies", &LindbladSystem::energies)
      .def_property_readonly("coupling", &LindbladSystem::coupling)
      .def("generator", &LindbladSystem::generator, "rho"_a)
      .def("liouvillian", &LindbladSystem::liouvillian);

  m.def("make_lindblad", &make_lindblad, "eigensystem"_a, "observable"_a, "kappa"_a, "n_levels"_a,
        "gap_tolerance"_a = 1e-8);
  m.def("reduce_operator", &reduce_operator, "op"_a, "eigensystem"_a, "n_levels"_a);
  m.def("reduce_state", &reduce_state, "psi"_a, "eigensystem"_a, "n_levels"_a);
  m.def("evolve",
        [](const LindbladSystem& sys, const CMat& rho0, const std::vector<double>& times,
           const std::vector<CMat>& observables, bool keep_states) {
          return trajectory_dict(evolve(sys, rho0, times, observables, keep_states));
        },
        "system"_a, "rho0"_a, "times"_a, "observables"_a = std::vector<CMat>{}, "keep_states"_a = false);
  m.def("stationary_state", &stationary_state, "system"_a);
  m.def("decay_rate", &decay_rate, "system"_a, "level"_a);
  m.def("fitted_decay_rate", &fitted_decay_rate, "system"_a, "level"_a, "samples"_a = 61);

  // experiments -----------------------------------------------------------
  m.def("list_experiments", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : list_experiments()) out.emplace_back(e.name, e.description);
    return out;
  });
  m.def("default_config", [] { return to_json(ExperimentConfig{}).dump(); });
  m.def("validate_config",
        [](const std::string& text) {
          std::vector<py::dict> out;
          for (const auto& i : validate_config(text).issues) {
            out.push_back(py::dict("line"_a = i.line, "key"_a = i.key, "message"_a = i.message,
                                   "hint"_a = i.hint));
          }
          return out;
        },
        "config_json"_a);
  m.def("run_experiment",
        [](const std::string& text) {
          const ExperimentConfig cfg = parse_config(text);
          ExperimentResult r;
          {
            py::gil_scoped_release release;
            r = run_experiment(cfg);
          }
          py::list tables;
          for (const auto& t : r.tables) tables.append(table_dict(t));
          return py::dict("experiment"_a = r.experiment, "tables"_a = tables,
                          "provenance"_a = r.provenance.dump());
        },
        "config_json"_a);
  m.def("format_csv",
        [](const std::string& name, const std::vector<std::string>& columns, const std::string& units,
           const std::vector<std::vector<double>>& rows) { return format_csv({name, columns, units, rows}); },
        "name"_a, "columns"_a, "units"_a, "rows"_a);
}
