#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaugetrunc/gauge.hpp"

namespace gaugetrunc {

/// Full ascending eigensystem of one model. Vectors are columns; the phase of
/// each is fixed so its largest component is real and positive.
struct EigenSystem {
  RVec energies;
  CMat vectors;
  ModelKindSpec source;
  Dims dims;
  bool on_subspace = false;

  long size() const { return static_cast<long>(energies.size()); }
  CVec state(long i) const { return vectors.col(i); }
};

EigenSystem eigensolve(const ModelSpec& model);

struct EigenCheck {
  double residual = 0.0;        // max_i ||H v_i - E_i v_i|| / (1 + |E_i|)
  double orthonormality = 0.0;  // ||V^dag V - I||_max
};

EigenCheck check_eigensystem(const EigenSystem& es, const CMat& h);

/// |<u|v>|^2. Both inputs must be normalized to 1e-10 (Error{NotNormalized}).
double fidelity(const CVec& u, const CVec& v);

/// ||P S||^2 for a full-space state S.
double cs_bound(const CVec& state, const CompositeSpace& space);

/// P S / ||P S|| expressed on the P-subspace.
CVec optimal_truncated_state(const CVec& state, const CompositeSpace& space);

struct FidelityRecord {
  double fidelity = 0.0;
  double bound = 0.0;
  bool near_degenerate = false;  // a neighbour within 1e-6 omega in either system
};

/// Fidelity of truncated eigenvector `index` against exact eigenvector
/// `index`, both sorted ascending, with the Cauchy-Schwarz bound of the
/// exact state.
FidelityRecord paired_fidelity(const EigenSystem& truncated, const EigenSystem& exact,
                               const CompositeSpace& space, double omega,
                               long index = 0);

enum class ObservableName {
  PhotonNumber,       // n_ET: a^dag a in the Coulomb gauge
  ExcitedPopulation,  // Gamma: 1 - |eps_0><eps_0|
  FieldQuadrature,    // Q_ET: i(a^dag - a)
  MomentumOverOmega,  // p / omega
  Energy,
  Custom,
};

struct Observable {
  ObservableName name = ObservableName::PhotonNumber;
  CMat coulomb;  // Custom only: full-space Coulomb-gauge matrix

  static Observable n_et() { return {ObservableName::PhotonNumber, {}}; }
  static Observable gamma() { return {ObservableName::ExcitedPopulation, {}}; }
  static Observable q_et() { return {ObservableName::FieldQuadrature, {}}; }
  static Observable p_over_omega() { return {ObservableName::MomentumOverOmega, {}}; }
  static Observable energy() { return {ObservableName::Energy, {}}; }
  static Observable custom(CMat o0) { return {ObservableName::Custom, std::move(o0)}; }
};

std::string to_string(const Observable& obs);

enum class FrameTag {
  ExactGauge,
  DipoleTruncated,
  RotatedFrameCorrect,
  RotatedFrameAsCoulomb,
  NaiveCoulombTruncated,
};

struct FramePrescription {
  FrameTag tag = FrameTag::ExactGauge;
  double alpha = 0.0;  // ExactGauge only

  static FramePrescription exact_gauge(double a) { return {FrameTag::ExactGauge, a}; }
  static FramePrescription dipole_truncated() { return {FrameTag::DipoleTruncated, 1.0}; }
  static FramePrescription rotated_correct() { return {FrameTag::RotatedFrameCorrect, 0.0}; }
  static FramePrescription rotated_as_coulomb() {
    return {FrameTag::RotatedFrameAsCoulomb, 0.0};
  }
  static FramePrescription naive_coulomb() { return {FrameTag::NaiveCoulombTruncated, 0.0}; }

  bool on_subspace() const { return tag != FrameTag::ExactGauge; }
};

std::string to_string(const FramePrescription& frame);

/// Holds the system and caches the unitaries the frame rules need. A
/// default-constructed context has no system; using it throws
/// Error{MissingContext}. Not thread safe: use one context per worker.
class FrameContext {
 public:
  FrameContext() = default;
  explicit FrameContext(LightMatterSystem sys);

  bool has_system() const { return static_cast<bool>(sys_); }
  const LightMatterSystem& system() const;

  /// P R_01 as (M+1) N_ph rows of the full-space unitary.
  const CMat& projected_rotation() const;
  /// T_10 on the P-subspace.
  const CMat& truncated_rotation() const;
  /// R_{0 alpha} on the full space.
  const CMat& rotation(double alpha) const;

 private:
  std::shared_ptr<const LightMatterSystem> sys_;
  mutable CMat pr01_;
  mutable CMat t10_;
  mutable std::map<double, CMat> rotations_;
};

/// O_0 on the full space.
CMat coulomb_representation(const Observable& obs, const LightMatterSystem& sys);

/// Matrix of `obs` under `frame`:
///   ExactGauge(a)          R_{0a} O_0 R_{0a}^dag (closed forms for the named
///                          observables, the numerical R otherwise)
///   DipoleTruncated        P O_1 P
///   RotatedFrameCorrect    T_10 P O_1 P T_10^dag
///   RotatedFrameAsCoulomb  P O_0 P
///   NaiveCoulombTruncated  P O_0 P
CMat represent(const Observable& obs, const FramePrescription& frame,
               const FrameContext& ctx);

/// <psi|O|psi>; the imaginary part must vanish to 1e-10.
double expectation(const CMat& op, const CVec& psi);

double average(const Observable& obs, const FramePrescription& frame,
               const FrameContext& ctx, const CVec& psi);
double average(const Observable& obs, const FramePrescription& frame,
               const FrameContext& ctx, const EigenSystem& es, long index);

/// Gibbs average with temperature in units of omega (k_B = 1). T = 0 gives
/// the ground-state average.
double thermal_average(const CMat& op, const EigenSystem& es, double temperature);
double thermal_average(const Observable& obs, const FramePrescription& frame,
                       const FrameContext& ctx, const EigenSystem& es,
                       double temperature);

/// (E_i - E_0) / omega for i = 1..count.
std::vector<double> transition_energies(const EigenSystem& es, long count,
                                        double omega = 1.0);

/// <Delta>_i - <Delta>_0 in the eigenstates of the QRM H_1^2, i = 1..i_max.
std::vector<double> delta_variation(const LightMatterSystem& sys, long i_max,
                                    DeltaForm form = DeltaForm::Closed);

/// A model paired with the frame its eigenvectors are read in.
struct Prescription {
  std::string label;
  ModelKindSpec model;
  FramePrescription frame;
};

/// exact, dipole_truncated, h10_as_coulomb, coulomb_truncated.
std::vector<Prescription> standard_prescriptions();

struct Cutoffs {
  long n_matter = 0;
  long n_photon = 0;
  bool operator==(const Cutoffs&) const = default;
};

struct ConvergenceStep {
  Cutoffs cutoffs;
  std::vector<double> values;
  double delta = 0.0;  // relative change from the previous step; inf on the first
};

struct ConvergenceReport {
  std::vector<ConvergenceStep> steps;
  Cutoffs final_cutoffs;
  double tolerance = 0.0;
  bool converged = false;
};

nlohmann::json to_json(const ConvergenceReport& report);

/// Walks `schedule` until two successive evaluations agree to `rel_tol`,
/// measured as max_j |a_j - b_j| / max(|b_j|, floor). final_cutoffs is the
/// later of the two. Throws Error{CutoffCeiling} when the schedule runs out.
ConvergenceReport converge(
    const std::function<std::vector<double>(const Cutoffs&)>& quantity,
    const std::vector<Cutoffs>& schedule, double rel_tol = 1e-6,
    double floor = 1e-6);

}  // namespace gaugetrunc
