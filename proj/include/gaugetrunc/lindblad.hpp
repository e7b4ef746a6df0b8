#pragma once

#include <vector>

#include "gaugetrunc/analysis.hpp"

namespace gaugetrunc {

/// O^+(E) for one gap cluster, in the energy eigenbasis. The lowering
/// partner is its adjoint.
struct JumpOperator {
  double gap = 0.0;  // mean gap of the cluster
  CMat raising;
  CMat lowering() const { return raising.adjoint(); }
};

/// Zero-temperature secular master equation in the lowest levels of a model:
///   d rho / dt = -i[H, rho] + kappa sum_E (L rho L^dag - {L^dag L, rho} / 2),
/// with L = O^-(E). Everything is stored in the energy eigenbasis, so H is
/// diag(E) and O is the N_lev x N_lev block <i|O|j>.
class LindbladSystem {
 public:
  /// Throws Error{NotHermitian} for a non-Hermitian coupling,
  /// Error{InvalidSpec} for kappa < 0, and Error{DegenerateGapAmbiguity} if
  /// two gap clusters sit within 2 x gap_tolerance of each other.
  LindbladSystem(RVec energies, CMat coupling, double kappa,
                 double gap_tolerance = 1e-8);

  long size() const { return static_cast<long>(energies_.size()); }
  const RVec& energies() const { return energies_; }
  const CMat& coupling() const { return coupling_; }
  double kappa() const { return kappa_; }
  double gap_tolerance() const { return gap_tol_; }

  const std::vector<JumpOperator>& jump_operators() const { return jumps_; }

  /// Cluster index of the gap E_i - E_j for i > j, or -1 if the gap is zero.
  long cluster_of(long i, long j) const { return cluster_[i * size() + j]; }

  /// Right-hand side applied to a density matrix (eigenbasis).
  CMat generator(const CMat& rho) const;

  /// Dense superoperator acting on row-major vec(rho).
  CMat liouvillian() const;

  /// Index sets of the decoupled blocks of the superoperator and the dense
  /// superoperator restricted to each.
  const std::vector<std::vector<long>>& blocks() const { return blocks_; }
  const std::vector<CMat>& block_operators() const { return block_ops_; }

 private:
  void build_clusters();
  void build_superoperator();

  RVec energies_;
  CMat coupling_;
  double kappa_;
  double gap_tol_;
  std::vector<long> cluster_;
  std::vector<double> cluster_gap_;
  std::vector<JumpOperator> jumps_;
  CMat k_;  // sum_E L^dag L
  std::vector<std::vector<long>> blocks_;
  std::vector<CMat> block_ops_;
};

/// Lowest `n_levels` eigenstates of `es` and the observable restricted to
/// them.
LindbladSystem make_lindblad(const EigenSystem& es, const CMat& observable,
                             double kappa, long n_levels,
                             double gap_tolerance = 1e-8);

/// |psi><psi| in the lowest `n_levels` eigenstates of `es`. Throws
/// Error{SpaceMismatch} if more than 1e-10 of the weight lies above them.
CMat reduce_state(const CVec& psi, const EigenSystem& es, long n_levels);

/// V^dag O V over the lowest `n_levels` eigenvectors.
CMat reduce_operator(const CMat& op, const EigenSystem& es, long n_levels);

/// gamma_ijkl = kappa <i|O|j><k|O|l> for indices below n.
class RateTable {
 public:
  RateTable(const LindbladSystem& sys, long n);
  long size() const { return n_; }
  cplx operator()(long i, long j, long k, long l) const;

 private:
  long n_;
  double kappa_;
  CMat o_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<CMat> states;
  std::vector<std::vector<double>> expectations;  // [observable][time]
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 1.0;
};

/// Exact propagation on the given ascending time grid, block by block with
/// the matrix exponential of the superoperator. Every state is checked for
/// trace (1e-8), Hermiticity (1e-8) and positivity (-1e-7); a violation
/// throws Error{StepFailure}.
Trajectory evolve(const LindbladSystem& sys, const CMat& rho0,
                  const std::vector<double>& times,
                  const std::vector<CMat>& observables = {},
                  bool keep_states = false);

/// Null vector of the superoperator, trace normalized. Throws
/// Error{NonUniqueSteadyState} if the null space is degenerate.
CMat stationary_state(const LindbladSystem& sys);

/// kappa sum_{j : E_j < E_i} |<j|O|i>|^2 over strictly lower gaps.
double decay_rate(const LindbladSystem& sys, long i);

/// Least-squares slope of -log <i|rho(t)|i> over t in [0, 3 / rate], starting
/// from |i><i|.
double fitted_decay_rate(const LindbladSystem& sys, long i, long samples = 61);

std::vector<double> uniform_grid(double t0, double t1, long points);

}  // namespace gaugetrunc
