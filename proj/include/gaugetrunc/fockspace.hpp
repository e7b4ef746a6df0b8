#pragma once

#include "gaugetrunc/linalg.hpp"
#include "gaugetrunc/matter1d.hpp"

namespace gaugetrunc {

struct ModeSpec {
  double omega = 1.0;
  double volume = 1.0;
  long n_photons = 40;

  void validate() const;  // throws Error{InvalidSpec}
};

/// Single-mode operators on the truncated Fock space {|0>, ..., |N_ph - 1>}.
/// a_dag is the exact adjoint of a. field_squared is built from exact Fock
/// matrix elements rather than as a product of truncated matrices, so it
/// stays correct up to the last retained state.
struct FockOperators {
  CMat a;
  CMat a_dag;
  CMat number;           // a^dag a
  CMat field;            // A = (a + a^dag) / sqrt(2 omega v)
  CMat conjugate;        // Pi = i sqrt(omega / 2v) (a^dag - a)
  CMat field_squared;    // A^2, exact elements
  CMat hamiltonian;      // omega (a^dag a + 1/2)
  CMat quadrature;       // i (a^dag - a)
};

FockOperators fock_operators(const ModeSpec& mode);

/// Shape of an operator on matter (x) photon, matter index major.
struct Dims {
  long matter = 0;
  long photon = 0;
  long total() const { return matter * photon; }
  bool operator==(const Dims&) const = default;
};

/// Composite space of the dipole and the mode, with an M+1 level material
/// truncation and the coupling expressed through eta.
struct CompositeSpace {
  long n_matter = 0;
  long n_photon = 0;
  long kept_levels = 2;  // M + 1
  double eta = 0.0;
  double charge = 0.0;   // q = eta sqrt(2 omega v) / x10

  Dims full() const { return {n_matter, n_photon}; }
  Dims truncated() const { return {kept_levels, n_photon}; }
};

CompositeSpace make_space(const MatterBasis& basis, const ModeSpec& mode,
                          double eta, long kept_levels = 2);

class CompositeOperator {
 public:
  CompositeOperator() = default;
  /// Throws Error{DimensionMismatch} if the shape disagrees with dims, and
  /// Error{NotHermitian} if flagged Hermitian but ||O - O^dag||_max >= 1e-10.
  CompositeOperator(CMat matrix, Dims dims, bool hermitian);

  const CMat& matrix() const { return matrix_; }
  const Dims& dims() const { return dims_; }
  bool hermitian() const { return hermitian_; }

 private:
  CMat matrix_;
  Dims dims_;
  bool hermitian_ = false;
};

CompositeOperator embed_matter(const CMat& op, const Dims& dims);
CompositeOperator embed_photon(const CMat& op, const Dims& dims);

struct Projectors {
  CompositeOperator p;
  CompositeOperator q;
};

/// P = sum_{mu <= M} |eps_mu><eps_mu| (x) I_ph and Q = I - P, on the full space.
Projectors projector(const CompositeSpace& space);

/// Rows of the P-subspace inside the full space: with matter-major ordering
/// these are the first kept_levels * n_photon indices.
long subspace_dim(const CompositeSpace& space);
CVec lift_to_full(const CVec& sub, const CompositeSpace& space);
CMat restrict_to_subspace(const CMat& full, const CompositeSpace& space);

}  // namespace gaugetrunc
