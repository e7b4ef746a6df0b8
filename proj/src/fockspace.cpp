#include "gaugetrunc/fockspace.hpp"

#include <cmath>
#include <string>

#include "gaugetrunc/error.hpp"

namespace gaugetrunc {

void ModeSpec::validate() const {
  if (!(omega > 0.0)) throw Error(ErrorCode::InvalidSpec, "mode frequency must be positive");
  if (!(volume > 0.0)) throw Error(ErrorCode::InvalidSpec, "mode volume must be positive");
  if (n_photons < 8) throw Error(ErrorCode::InvalidSpec, "Fock cutoff must be at least 8");
}

FockOperators fock_operators(const ModeSpec& mode) {
  mode.validate();
  const long n = mode.n_photons;
  const double w = mode.omega;
  const double v = mode.volume;

  FockOperators ops;
  ops.a = CMat::Zero(n, n);
  for (long k = 1; k < n; ++k) ops.a(k - 1, k) = std::sqrt(static_cast<double>(k));
  ops.a_dag = ops.a.adjoint();
  ops.number = CMat::Zero(n, n);
  for (long k = 0; k < n; ++k) ops.number(k, k) = static_cast<double>(k);

  ops.field = (ops.a + ops.a_dag) / std::sqrt(2.0 * w * v);
  ops.conjugate = kI * std::sqrt(w / (2.0 * v)) * (ops.a_dag - ops.a);
  ops.quadrature = kI * (ops.a_dag - ops.a);

  // (a + a^dag)^2 = a^2 + a^dag^2 + 2 a^dag a + 1 with untruncated elements.
  ops.field_squared = CMat::Zero(n, n);
  for (long k = 0; k < n; ++k) {
    ops.field_squared(k, k) = 2.0 * static_cast<double>(k) + 1.0;
    if (k + 2 < n) {
      const double off = std::sqrt(static_cast<double>((k + 1) * (k + 2)));
      ops.field_squared(k, k + 2) = off;
      ops.field_squared(k + 2, k) = off;
    }
  }
  ops.field_squared /= 2.0 * w * v;

  ops.hamiltonian = w * (ops.number + 0.5 * CMat::Identity(n, n));
  return ops;
}

CompositeSpace make_space(const MatterBasis& basis, const ModeSpec& mode,
                          double eta, long kept_levels) {
  mode.validate();
  if (kept_levels < 1 || kept_levels > basis.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "truncation keeps " + std::to_string(kept_levels) + " of " +
                    std::to_string(basis.size()) + " levels");
  }
  CompositeSpace s;
  s.n_matter = basis.size();
  s.n_photon = mode.n_photons;
  s.kept_levels = kept_levels;
  s.eta = eta;
  s.charge = eta * std::sqrt(2.0 * mode.omega * mode.volume) / basis.x10();
  return s;
}

CompositeOperator::CompositeOperator(CMat matrix, Dims dims, bool hermitian)
    : matrix_(std::move(matrix)), dims_(dims), hermitian_(hermitian) {
  if (matrix_.rows() != dims_.total() || matrix_.cols() != dims_.total()) {
    throw Error(ErrorCode::DimensionMismatch,
                "operator of size " + std::to_string(matrix_.rows()) +
                    " does not match dims " + std::to_string(dims_.matter) + "x" +
                    std::to_string(dims_.photon));
  }
  if (hermitian_) {
    const double err = hermiticity_error(matrix_);
    if (err >= 1e-10) {
      throw Error(ErrorCode::NotHermitian,
                  "operator flagged Hermitian deviates by " + std::to_string(err));
    }
  }
}

CompositeOperator embed_matter(const CMat& op, const Dims& dims) {
  if (op.rows() != dims.matter || op.cols() != dims.matter) {
    throw Error(ErrorCode::DimensionMismatch, "matter operator has wrong dimension");
  }
  return {kron(op, CMat::Identity(dims.photon, dims.photon)), dims,
          hermiticity_error(op) < 1e-10};
}

CompositeOperator embed_photon(const CMat& op, const Dims& dims) {
  if (op.rows() != dims.photon || op.cols() != dims.photon) {
    throw Error(ErrorCode::DimensionMismatch, "photon operator has wrong dimension");
  }
  return {kron(CMat::Identity(dims.matter, dims.matter), op), dims,
          hermiticity_error(op) < 1e-10};
}

Projectors projector(const CompositeSpace& space) {
  if (space.kept_levels > space.n_matter) {
    throw Error(ErrorCode::DimensionMismatch, "M + 1 exceeds the matter dimension");
  }
  const Dims dims = space.full();
  CMat p = CMat::Zero(dims.total(), dims.total());
  const long kept = subspace_dim(space);
  p.topLeftCorner(kept, kept).setIdentity();
  CMat q = CMat::Identity(dims.total(), dims.total()) - p;
  return {CompositeOperator(std::move(p), dims, true),
          CompositeOperator(std::move(q), dims, true)};
}

long subspace_dim(const CompositeSpace& space) {
  return space.kept_levels * space.n_photon;
}

CVec lift_to_full(const CVec& sub, const CompositeSpace& space) {
  if (sub.size() != subspace_dim(space)) {
    throw Error(ErrorCode::SpaceMismatch, "vector is not on the truncated subspace");
  }
  CVec out = CVec::Zero(space.full().total());
  out.head(sub.size()) = sub;
  return out;
}

CMat restrict_to_subspace(const CMat& full, const CompositeSpace& space) {
  if (full.rows() != space.full().total() || full.cols() != full.rows()) {
    throw Error(ErrorCode::SpaceMismatch, "operator is not on the full space");
  }
  const long kept = subspace_dim(space);
  return full.topLeftCorner(kept, kept);
}

}  // namespace gaugetrunc
