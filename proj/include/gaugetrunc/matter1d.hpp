#pragma once

#include "json.hpp"

#include "gaugetrunc/linalg.hpp"

namespace gaugetrunc {

/// Shape and discretization of the double-well dipole
/// V(x) = -theta x^2 / 2 + phi x^4 / 4, with hbar = 1.
struct MatterSpec {
  double mass = 1.0;
  double theta = 0.0;
  double phi = 0.0;
  /// Grid half-width. A value <= 0 asks the solver to pick it from the
  /// classical turning point of the highest retained level.
  double half_width = 0.0;
  long n_grid = 512;
  long n_levels = 30;

  void validate() const;  // throws Error{InvalidSpec}
  double potential(double x) const {
    return -0.5 * theta * x * x + 0.25 * phi * x * x * x * x;
  }
};

/// Lowest energy eigenstates of the bare dipole and the matrix elements of
/// x, p and x^2 between them. Eigenvectors are real; the sign of each level
/// is fixed so that X(mu, mu+1) >= 0.
struct MatterBasis {
  RVec eps;
  RMat x;
  CMat p;  // purely imaginary, Hermitian
  RMat x2;
  MatterSpec spec;  // spec actually solved (half_width resolved)

  long size() const { return static_cast<long>(eps.size()); }
  double omega0() const { return eps(1) - eps(0); }
  double omega1() const { return eps(2) - eps(1); }
  double anharmonicity() const { return (omega1() - omega0()) / omega0(); }
  double x10() const { return x(1, 0); }

  /// First `levels` states only.
  MatterBasis truncated(long levels) const;
};

struct SolveOptions {
  /// Re-solve eigenvalues at 2 x n_grid and require agreement to
  /// 1e-9 * omega0.
  bool check_convergence = true;
  double boundary_tolerance = 1e-10;
  double convergence_tolerance = 1e-9;
};

MatterBasis solve_double_well(const MatterSpec& spec,
                              const SolveOptions& options = {});

/// Eigenvalues only, lowest `count`, for a fully specified grid. Exposed for
/// independent resolution checks.
RVec double_well_levels(const MatterSpec& spec, long count);

/// Choose (theta, phi) so that the dipole has anharmonicity `target_mu` and
/// a lowest transition omega0 equal to `mode_frequency`.
MatterSpec calibrate_potential(double target_mu, double mode_frequency = 1.0,
                               long n_levels = 30, long n_grid = 512);

nlohmann::json to_json(const MatterBasis& basis);
nlohmann::json to_json(const MatterSpec& spec);
MatterSpec matter_spec_from_json(const nlohmann::json& j);

}  // namespace gaugetrunc
