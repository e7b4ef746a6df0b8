#include "gaugetrunc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gaugetrunc/error.hpp"

namespace gaugetrunc {

EigenSystem eigensolve(const ModelSpec& model) {
  const CompositeOperator& h = model.hamiltonian;
  HermitianEigen eig = hermitian_eigen(h.matrix(), h.dims().photon);
  EigenSystem es;
  es.energies = std::move(eig.values);
  es.vectors = std::move(eig.vectors);
  es.source = model.kind;
  es.dims = h.dims();
  es.on_subspace = model.on_subspace;
  return es;
}

EigenCheck check_eigensystem(const EigenSystem& es, const CMat& h) {
  EigenCheck c;
  const CMat hv = h * es.vectors;
  for (long i = 0; i < es.size(); ++i) {
    const double r = (hv.col(i) - es.energies(i) * es.vectors.col(i)).norm();
    c.residual = std::max(c.residual, r / (1.0 + std::abs(es.energies(i))));
  }
  const long n = es.vectors.cols();
  c.orthonormality = max_abs(es.vectors.adjoint() * es.vectors - CMat::Identity(n, n));
  return c;
}

namespace {

void require_normalized(const CVec& v, const char* which) {
  const double dev = std::abs(v.squaredNorm() - 1.0);
  if (dev > 1e-10) {
    std::ostringstream os;
    os << which << " has norm^2 deviating from 1 by " << dev;
    throw Error(ErrorCode::NotNormalized, os.str());
  }
}

}  // namespace

double fidelity(const CVec& u, const CVec& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::SpaceMismatch, "fidelity of vectors of different length");
  }
  require_normalized(u, "first vector");
  require_normalized(v, "second vector");
  return std::norm(u.dot(v));
}

double cs_bound(const CVec& state, const CompositeSpace& space) {
  if (state.size() != space.full().total()) {
    throw Error(ErrorCode::SpaceMismatch, "bound needs a full-space state");
  }
  return state.head(subspace_dim(space)).squaredNorm();
}

CVec optimal_truncated_state(const CVec& state, const CompositeSpace& space) {
  if (state.size() != space.full().total()) {
    throw Error(ErrorCode::SpaceMismatch, "projection needs a full-space state");
  }
  CVec ps = state.head(subspace_dim(space));
  const double n = ps.norm();
  if (n == 0.0) throw Error(ErrorCode::NotNormalized, "state has no weight in P");
  return ps / n;
}

FidelityRecord paired_fidelity(const EigenSystem& truncated, const EigenSystem& exact,
                               const CompositeSpace& space, double omega,
                               long index) {
  if (!truncated.on_subspace || exact.on_subspace) {
    throw Error(ErrorCode::SpaceMismatch, "pairing needs a truncated and an exact system");
  }
  if (index < 0 || index >= truncated.size() || index >= exact.size()) {
    throw Error(ErrorCode::DimensionMismatch, "eigenstate index out of range");
  }
  auto crowded = [&](const RVec& e) {
    const double tol = 1e-6 * omega;
    if (index > 0 && e(index) - e(index - 1) < tol) return true;
    return index + 1 < e.size() && e(index + 1) - e(index) < tol;
  };
  FidelityRecord r;
  const CVec s = exact.state(index);
  r.fidelity = fidelity(lift_to_full(truncated.state(index), space), s);
  r.bound = cs_bound(s, space);
  r.near_degenerate = crowded(truncated.energies) || crowded(exact.energies);
  return r;
}

std::string to_string(const Observable& obs) {
  switch (obs.name) {
    case ObservableName::PhotonNumber: return "n_ET";
    case ObservableName::ExcitedPopulation: return "Gamma";
    case ObservableName::FieldQuadrature: return "Q_ET";
    case ObservableName::MomentumOverOmega: return "p_over_omega";
    case ObservableName::Energy: return "energy";
    case ObservableName::Custom: return "custom";
  }
  return "unknown";
}

std::string to_string(const FramePrescription& frame) {
  switch (frame.tag) {
    case FrameTag::ExactGauge: {
      std::ostringstream os;
      os << "ExactGauge(" << frame.alpha << ")";
      return os.str();
    }
    case FrameTag::DipoleTruncated: return "DipoleTruncated";
    case FrameTag::RotatedFrameCorrect: return "RotatedFrameCorrect";
    case FrameTag::RotatedFrameAsCoulomb: return "RotatedFrameAsCoulomb";
    case FrameTag::NaiveCoulombTruncated: return "NaiveCoulombTruncated";
  }
  return "unknown";
}

FrameContext::FrameContext(LightMatterSystem sys)
    : sys_(std::make_shared<const LightMatterSystem>(std::move(sys))) {}

const LightMatterSystem& FrameContext::system() const {
  if (!sys_) throw Error(ErrorCode::MissingContext, "frame context has no system");
  return *sys_;
}

const CMat& FrameContext::projected_rotation() const {
  if (pr01_.size() == 0) {
    const auto& s = system();
    pr01_ = gauge_unitary_rows(0.0, 1.0, s, subspace_dim(s.space));
  }
  return pr01_;
}

const CMat& FrameContext::truncated_rotation() const {
  if (t10_.size() == 0) t10_ = truncated_unitary(1.0, 0.0, system()).matrix();
  return t10_;
}

const CMat& FrameContext::rotation(double alpha) const {
  auto it = rotations_.find(alpha);
  if (it == rotations_.end()) {
    it = rotations_.emplace(alpha, gauge_unitary(0.0, alpha, system()).matrix()).first;
  }
  return it->second;
}

CMat coulomb_representation(const Observable& obs, const LightMatterSystem& sys) {
  const Dims d = sys.space.full();
  const CMat id_m = CMat::Identity(d.matter, d.matter);
  const CMat id_ph = CMat::Identity(d.photon, d.photon);
  switch (obs.name) {
    case ObservableName::PhotonNumber: return kron(id_m, sys.fock.number);
    case ObservableName::ExcitedPopulation: {
      CMat g = id_m;
      g(0, 0) = 0.0;
      return kron(g, id_ph);
    }
    case ObservableName::FieldQuadrature: return kron(id_m, sys.fock.quadrature);
    case ObservableName::MomentumOverOmega: return kron(sys.basis.p, id_ph) / sys.mode.omega;
    case ObservableName::Energy: return build_h_alpha(0.0, sys).matrix();
    case ObservableName::Custom:
      if (obs.coulomb.rows() != d.total() || obs.coulomb.cols() != d.total()) {
        throw Error(ErrorCode::DimensionMismatch, "custom observable is not full-space");
      }
      return obs.coulomb;
  }
  throw Error(ErrorCode::UnsupportedKind, "unknown observable");
}

namespace {

// R_{0a} O_0 R_{0a}^dag written out for the observables whose transformed
// form is a finite polynomial in x, p, A and Pi.
bool closed_gauge_form(const Observable& obs, double alpha,
                       const LightMatterSystem& sys, CMat& out) {
  const Dims d = sys.space.full();
  const double q = sys.charge();
  const double w = sys.mode.omega;
  const double v = sys.mode.volume;
  const CMat id_m = CMat::Identity(d.matter, d.matter);
  const CMat id_ph = CMat::Identity(d.photon, d.photon);
  const CMat x = sys.basis.x.cast<cplx>();
  switch (obs.name) {
    case ObservableName::PhotonNumber:
      out = kron(id_m, sys.fock.number) + (q * alpha / w) * kron(x, sys.fock.conjugate) +
            (q * q * alpha * alpha / (2.0 * v * w)) * kron(sys.basis.x2.cast<cplx>(), id_ph);
      return true;
    case ObservableName::FieldQuadrature:
      out = kron(id_m, sys.fock.quadrature) +
            (std::sqrt(2.0 * v / w) * q * alpha / v) * kron(x, id_ph);
      return true;
    case ObservableName::MomentumOverOmega:
      out = (kron(sys.basis.p, id_ph) + q * alpha * kron(id_m, sys.fock.field)) / w;
      return true;
    case ObservableName::Energy:
      out = build_h_alpha(alpha, sys).matrix();
      return true;
    default:
      return false;
  }
}

CMat gauge_representation(const Observable& obs, double alpha, const FrameContext& ctx) {
  const auto& sys = ctx.system();
  CMat out;
  if (closed_gauge_form(obs, alpha, sys, out)) return out;
  const CMat o0 = coulomb_representation(obs, sys);
  if (alpha == 0.0) return o0;
  const CMat& r = ctx.rotation(alpha);
  return r * o0 * r.adjoint();
}

CMat dipole_truncated(const Observable& obs, const FrameContext& ctx) {
  const auto& sys = ctx.system();
  CMat out;
  if (closed_gauge_form(obs, 1.0, sys, out)) return restrict_to_subspace(out, sys.space);
  const CMat& pr = ctx.projected_rotation();
  return pr * coulomb_representation(obs, sys) * pr.adjoint();
}

CMat symmetrized(CMat m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

CMat represent(const Observable& obs, const FramePrescription& frame,
               const FrameContext& ctx) {
  const auto& sys = ctx.system();
  switch (frame.tag) {
    case FrameTag::ExactGauge:
      return symmetrized(gauge_representation(obs, frame.alpha, ctx));
    case FrameTag::DipoleTruncated:
      return symmetrized(dipole_truncated(obs, ctx));
    case FrameTag::RotatedFrameCorrect: {
      const CMat& t = ctx.truncated_rotation();
      return symmetrized(t * dipole_truncated(obs, ctx) * t.adjoint());
    }
    case FrameTag::RotatedFrameAsCoulomb:
    case FrameTag::NaiveCoulombTruncated:
      return symmetrized(restrict_to_subspace(coulomb_representation(obs, sys), sys.space));
  }
  throw Error(ErrorCode::UnsupportedKind, "unknown frame prescription");
}

double expectation(const CMat& op, const CVec& psi) {
  if (op.rows() != psi.size() || op.cols() != psi.size()) {
    throw Error(ErrorCode::SpaceMismatch, "state and operator live on different spaces");
  }
  const cplx val = psi.dot(op * psi);
  if (std::abs(val.imag()) > 1e-10 * std::max(1.0, std::abs(val.real()))) {
    throw Error(ErrorCode::NotHermitian, "expectation value is not real");
  }
  return val.real();
}

double average(const Observable& obs, const FramePrescription& frame,
               const FrameContext& ctx, const CVec& psi) {
  return expectation(represent(obs, frame, ctx), psi);
}

double average(const Observable& obs, const FramePrescription& frame,
               const FrameContext& ctx, const EigenSystem& es, long index) {
  if (es.on_subspace != frame.on_subspace()) {
    throw Error(ErrorCode::SpaceMismatch,
                "model eigenvectors and frame " + to_string(frame) + " use different spaces");
  }
  if (index < 0 || index >= es.size()) {
    throw Error(ErrorCode::DimensionMismatch, "eigenstate index out of range");
  }
  return average(obs, frame, ctx, es.state(index));
}

double thermal_average(const CMat& op, const EigenSystem& es, double temperature) {
  if (!(temperature >= 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "temperature must be non-negative");
  }
  if (temperature == 0.0) return expectation(op, es.state(0));
  double z = 0.0;
  double acc = 0.0;
  for (long i = 0; i < es.size(); ++i) {
    const double w = std::exp(-(es.energies(i) - es.energies(0)) / temperature);
    if (w < 1e-17) break;
    z += w;
    acc += w * expectation(op, es.state(i));
  }
  return acc / z;
}

double thermal_average(const Observable& obs, const FramePrescription& frame,
                       const FrameContext& ctx, const EigenSystem& es,
                       double temperature) {
  if (es.on_subspace != frame.on_subspace()) {
    throw Error(ErrorCode::SpaceMismatch,
                "model eigenvectors and frame " + to_string(frame) + " use different spaces");
  }
  return thermal_average(represent(obs, frame, ctx), es, temperature);
}

std::vector<double> transition_energies(const EigenSystem& es, long count, double omega) {
  std::vector<double> out;
  for (long i = 1; i <= count && i < es.size(); ++i) {
    out.push_back((es.energies(i) - es.energies(0)) / omega);
  }
  return out;
}

std::vector<double> delta_variation(const LightMatterSystem& sys, long i_max,
                                    DeltaForm form) {
  const EigenSystem es = eigensolve(build_model(ModelKindSpec::standard(1.0), sys));
  const CMat delta = delta_operator(sys, form).matrix();
  const double d0 = expectation(delta, es.state(0));
  std::vector<double> out;
  for (long i = 1; i <= i_max && i < es.size(); ++i) {
    out.push_back(expectation(delta, es.state(i)) - d0);
  }
  return out;
}

std::vector<Prescription> standard_prescriptions() {
  return {
      {"exact", ModelKindSpec::exact(0.0), FramePrescription::exact_gauge(0.0)},
      {"dipole_truncated", ModelKindSpec::standard(1.0), FramePrescription::dipole_truncated()},
      {"h10_as_coulomb", ModelKindSpec::rotated(1.0, 0.0),
       FramePrescription::rotated_as_coulomb()},
      {"coulomb_truncated", ModelKindSpec::standard(0.0), FramePrescription::naive_coulomb()},
  };
}

nlohmann::json to_json(const ConvergenceReport& report) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : report.steps) {
    steps.push_back({{"n_matter", s.cutoffs.n_matter},
                     {"n_photon", s.cutoffs.n_photon},
                     {"values", s.values},
                     {"delta", std::isfinite(s.delta) ? nlohmann::json(s.delta)
                                                      : nlohmann::json(nullptr)}});
  }
  return {{"converged", report.converged},
          {"tolerance", report.tolerance},
          {"final", {{"n_matter", report.final_cutoffs.n_matter},
                     {"n_photon", report.final_cutoffs.n_photon}}},
          {"steps", steps}};
}

ConvergenceReport converge(
    const std::function<std::vector<double>(const Cutoffs&)>& quantity,
    const std::vector<Cutoffs>& schedule, double rel_tol, double floor) {
  ConvergenceReport report;
  report.tolerance = rel_tol;
  for (const Cutoffs& c : schedule) {
    ConvergenceStep step{c, quantity(c), std::numeric_limits<double>::infinity()};
    if (!report.steps.empty()) {
      const auto& prev = report.steps.back().values;
      if (prev.size() != step.values.size()) {
        throw Error(ErrorCode::DimensionMismatch, "quantity changed length between cutoffs");
      }
      step.delta = 0.0;
      for (size_t j = 0; j < prev.size(); ++j) {
        const double scale = std::max(std::abs(step.values[j]), floor);
        step.delta = std::max(step.delta, std::abs(step.values[j] - prev[j]) / scale);
      }
    }
    report.steps.push_back(step);
    if (step.delta < rel_tol) {
      report.converged = true;
      report.final_cutoffs = c;
      return report;
    }
  }
  std::ostringstream os;
  os << "no convergence to " << rel_tol << " within " << schedule.size()
     << " cutoff steps";
  if (!report.steps.empty()) {
    const auto& last = report.steps.back();
    os << " (last N_mat=" << last.cutoffs.n_matter << ", N_ph=" << last.cutoffs.n_photon
       << ", delta=" << last.delta << ")";
  }
  throw Error(ErrorCode::CutoffCeiling, os.str());
}

}  // namespace gaugetrunc
