#pragma once

#include <string>

#include "gaugetrunc/fockspace.hpp"
#include "gaugetrunc/matter1d.hpp"

namespace gaugetrunc {

/// The dipole-mode system at one coupling strength: everything a builder
/// needs to assemble operators on the composite space.
struct LightMatterSystem {
  MatterBasis basis;
  ModeSpec mode;
  CompositeSpace space;
  FockOperators fock;

  double charge() const { return space.charge; }
  double eta() const { return space.eta; }
};

LightMatterSystem make_system(const MatterBasis& basis, const ModeSpec& mode,
                              double eta, long kept_levels = 2);

/// H_alpha = (p - q(1-alpha)A)^2 / 2m + V(x) + (v/2)[(Pi + q alpha x / v)^2 + omega^2 A^2]
/// expanded on the matter eigenbasis. p^2/2m + V enters as diag(eps), x^2
/// through the exact X2 matrix and A^2 through exact Fock elements.
CompositeOperator build_h_alpha(double alpha, const LightMatterSystem& sys);

/// R_{alpha alpha'} = exp[i q (alpha - alpha') x A] on the full space.
CompositeOperator gauge_unitary(double alpha, double alpha_prime,
                                const LightMatterSystem& sys);

/// First `rows` rows of R_{alpha alpha'}; with rows = (M+1) N_ph this is P R.
CMat gauge_unitary_rows(double alpha, double alpha_prime,
                        const LightMatterSystem& sys, long rows);

/// T_{alpha alpha'} = exp[i q (alpha - alpha') PxP A] on the P-subspace.
CompositeOperator truncated_unitary(double alpha, double alpha_prime,
                                    const LightMatterSystem& sys);

enum class ModelKind { Exact, Standard, Projected, RotatedClass };

struct ModelKindSpec {
  ModelKind kind = ModelKind::Exact;
  double alpha = 1.0;
  double alpha_target = 0.0;  // RotatedClass only

  static ModelKindSpec exact(double a) { return {ModelKind::Exact, a, a}; }
  static ModelKindSpec standard(double a) { return {ModelKind::Standard, a, a}; }
  static ModelKindSpec projected(double a) { return {ModelKind::Projected, a, a}; }
  static ModelKindSpec rotated(double source, double target) {
    return {ModelKind::RotatedClass, source, target};
  }
};

std::string to_string(const ModelKindSpec& kind);

struct ModelSpec {
  ModelKindSpec kind;
  CompositeOperator hamiltonian;
  bool on_subspace = false;  // true for the three truncated kinds
};

/// Exact(alpha): H_alpha. Standard(alpha): H_alpha^2, the standard truncating
/// map with x -> PxP, p -> PpP inside V_alpha. Projected(alpha): P H_alpha P.
/// RotatedClass(a, a'): h_a(a') = T_{aa'} H_a^2 T_{aa'}^dag.
ModelSpec build_model(const ModelKindSpec& kind, const LightMatterSystem& sys);

enum class DeltaForm { Closed, RotationDifference, HamiltonianDifference };

/// Delta on the P-subspace. Closed: eta^2 (PX2P / x10^2 - I) (x) I_ph, which
/// needs a two-level truncation. RotationDifference:
/// P R_01 a^dag a R_01^dag P - T_01 a^dag a T_01^dag (this order matches the
/// closed form; the reverse order gives -Delta). HamiltonianDifference:
/// (P H_1 P - H_1^2) / omega.
CompositeOperator delta_operator(const LightMatterSystem& sys, DeltaForm form);

}  // namespace gaugetrunc
