#include "gaugetrunc/linalg.hpp"

#include <cmath>

#include "gaugetrunc/error.hpp"

namespace gaugetrunc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BoundaryLeak: return "BoundaryLeak";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::CalibrationFailed: return "CalibrationFailed";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::ClosedFormNeedsTwoLevels: return "ClosedFormNeedsTwoLevels";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::MissingContext: return "MissingContext";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::CutoffCeiling: return "CutoffCeiling";
    case ErrorCode::DegenerateGapAmbiguity: return "DegenerateGapAmbiguity";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::NonUniqueSteadyState: return "NonUniqueSteadyState";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

double max_abs(const CMat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_error(const CMat& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return max_abs(m - m.adjoint());
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

void fix_phases(CMat& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index imax = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&imax);
    const cplx pivot = vectors(imax, c);
    if (std::abs(pivot) == 0.0) continue;
    vectors.col(c) *= std::conj(pivot) / std::abs(pivot);
  }
}

namespace {

// i^k for integer k >= 0.
cplx ipow(long k) {
  switch (k % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

HermitianEigen hermitian_eigen(const CMat& h, long photon_dim,
                               bool compute_vectors) {
  if (h.rows() != h.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "eigensolve of non-square matrix");
  }
  const Eigen::Index n = h.rows();
  const auto options =
      compute_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  const double scale = std::max(1.0, max_abs(h));

  auto try_real = [&](const CMat& m) -> bool {
    return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() <= 1e-13 * scale;
  };

  HermitianEigen out;
  CVec phase;
  CMat similar;
  bool real_path = try_real(h);
  if (real_path) {
    similar = h;
  } else if (photon_dim > 0 && n % photon_dim == 0) {
    phase.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) phase(k) = ipow(k % photon_dim);
    similar = phase.conjugate().asDiagonal() * h * phase.asDiagonal();
    real_path = try_real(similar);
    if (!real_path) phase.resize(0);
  }

  if (real_path) {
    RMat sym = similar.real();
    sym = 0.5 * (sym + sym.transpose());
    Eigen::SelfAdjointEigenSolver<RMat> solver(sym, options);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::SolverFailure, "real symmetric eigensolver failed");
    }
    out.values = solver.eigenvalues();
    if (compute_vectors) {
      out.vectors = solver.eigenvectors().cast<cplx>();
      if (phase.size() == n) out.vectors = phase.asDiagonal() * out.vectors;
    }
  } else {
    CMat herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> solver(herm, options);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::SolverFailure, "Hermitian eigensolver failed");
    }
    out.values = solver.eigenvalues();
    if (compute_vectors) out.vectors = solver.eigenvectors();
  }
  if (compute_vectors) fix_phases(out.vectors);
  return out;
}

CMat unitary_exp(const CMat& generator, double c) {
  const HermitianEigen eig = hermitian_eigen(generator);
  CVec phases(eig.values.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::exp(kI * c * eig.values(k));
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace gaugetrunc
