#include "gaugetrunc/gauge.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "gaugetrunc/error.hpp"

namespace gaugetrunc {

LightMatterSystem make_system(const MatterBasis& basis, const ModeSpec& mode,
                              double eta, long kept_levels) {
  LightMatterSystem sys;
  sys.basis = basis;
  sys.mode = mode;
  sys.space = make_space(basis, mode, eta, kept_levels);
  sys.fock = fock_operators(mode);
  return sys;
}

namespace {

// Matter blocks of an operator of the form
//   diag(eps) (x) I + I (x) H_ph + c_pa P (x) A + c_aa I (x) A^2
//   + c_xpi X (x) Pi + X2term (x) I
// restricted to the first `levels` matter states.
struct Coefficients {
  double pa = 0.0;
  double aa = 0.0;
  double xpi = 0.0;
  double xx = 0.0;
};

Coefficients gauge_coefficients(double alpha, const LightMatterSystem& sys) {
  const double q = sys.charge();
  const double m = sys.basis.spec.mass;
  const double v = sys.mode.volume;
  const double coul = 1.0 - alpha;
  return {-q * coul / m, q * q * coul * coul / (2.0 * m), q * alpha,
          q * q * alpha * alpha / (2.0 * v)};
}

CMat assemble(const LightMatterSystem& sys, long levels, const CMat& xsq,
              const Coefficients& c) {
  const auto& f = sys.fock;
  const long nph = sys.mode.n_photons;
  const CMat id_m = CMat::Identity(levels, levels);
  const CMat id_ph = CMat::Identity(nph, nph);
  const CMat eps = sys.basis.eps.head(levels).cast<cplx>().asDiagonal();
  const CMat x = sys.basis.x.topLeftCorner(levels, levels).cast<cplx>();
  const CMat p = sys.basis.p.topLeftCorner(levels, levels);

  CMat h = kron(eps, id_ph) + kron(id_m, f.hamiltonian);
  if (c.pa != 0.0) h += c.pa * kron(p, f.field);
  if (c.aa != 0.0) h += c.aa * kron(id_m, f.field_squared);
  if (c.xpi != 0.0) h += c.xpi * kron(x, f.conjugate);
  if (c.xx != 0.0) h += c.xx * kron(xsq, id_ph);
  return 0.5 * (h + h.adjoint());
}

// Rows of exp[i c X (x) A] for the first `row_blocks` matter indices, using
// the product eigenbasis of the Kronecker generator.
CMat kron_exp_rows(const RMat& xm, const CMat& field, double c, long row_blocks) {
  const long nm = xm.rows();
  const long nph = field.rows();
  Eigen::SelfAdjointEigenSolver<RMat> ex(xm);
  Eigen::SelfAdjointEigenSolver<RMat> ea(field.real());
  if (ex.info() != Eigen::Success || ea.info() != Eigen::Success) {
    throw Error(ErrorCode::SolverFailure, "generator eigendecomposition failed");
  }
  const RMat& ux = ex.eigenvectors();
  const CMat ua = ea.eigenvectors().cast<cplx>();

  std::vector<CMat> photon_blocks(nm);
  for (long j = 0; j < nm; ++j) {
    CVec ph(nph);
    for (long k = 0; k < nph; ++k) {
      ph(k) = std::exp(kI * c * ex.eigenvalues()(j) * ea.eigenvalues()(k));
    }
    photon_blocks[j] = ua * ph.asDiagonal() * ua.adjoint();
  }

  CMat out = CMat::Zero(row_blocks * nph, nm * nph);
  for (long mu = 0; mu < row_blocks; ++mu) {
    for (long nu = 0; nu < nm; ++nu) {
      auto blk = out.block(mu * nph, nu * nph, nph, nph);
      for (long j = 0; j < nm; ++j) {
        const double w = ux(mu, j) * ux(nu, j);
        if (w != 0.0) blk += w * photon_blocks[j];
      }
    }
  }
  return out;
}

}  // namespace

CompositeOperator build_h_alpha(double alpha, const LightMatterSystem& sys) {
  const long nm = sys.basis.size();
  if (sys.space.n_matter != nm || sys.space.n_photon != sys.mode.n_photons) {
    throw Error(ErrorCode::DimensionMismatch, "system space disagrees with its basis");
  }
  const CMat xsq = sys.basis.x2.cast<cplx>();
  return {assemble(sys, nm, xsq, gauge_coefficients(alpha, sys)), sys.space.full(), true};
}

CMat gauge_unitary_rows(double alpha, double alpha_prime,
                        const LightMatterSystem& sys, long rows) {
  const long nph = sys.mode.n_photons;
  if (rows % nph != 0 || rows > sys.space.full().total()) {
    throw Error(ErrorCode::DimensionMismatch, "row count must be whole matter blocks");
  }
  return kron_exp_rows(sys.basis.x, sys.fock.field,
                       sys.charge() * (alpha - alpha_prime), rows / nph);
}

CompositeOperator gauge_unitary(double alpha, double alpha_prime,
                                const LightMatterSystem& sys) {
  return {gauge_unitary_rows(alpha, alpha_prime, sys, sys.space.full().total()),
          sys.space.full(), alpha == alpha_prime};
}

CompositeOperator truncated_unitary(double alpha, double alpha_prime,
                                    const LightMatterSystem& sys) {
  const long k = sys.space.kept_levels;
  const RMat pxp = sys.basis.x.topLeftCorner(k, k);
  return {kron_exp_rows(pxp, sys.fock.field, sys.charge() * (alpha - alpha_prime), k),
          sys.space.truncated(), alpha == alpha_prime};
}

std::string to_string(const ModelKindSpec& kind) {
  std::ostringstream os;
  switch (kind.kind) {
    case ModelKind::Exact: os << "Exact(" << kind.alpha << ")"; break;
    case ModelKind::Standard: os << "Standard(" << kind.alpha << ")"; break;
    case ModelKind::Projected: os << "Projected(" << kind.alpha << ")"; break;
    case ModelKind::RotatedClass:
      os << "RotatedClass(" << kind.alpha << "," << kind.alpha_target << ")";
      break;
  }
  return os.str();
}

namespace {

CMat standard_truncation(double alpha, const LightMatterSystem& sys) {
  const long k = sys.space.kept_levels;
  const CMat pxp = sys.basis.x.topLeftCorner(k, k).cast<cplx>();
  return assemble(sys, k, pxp * pxp, gauge_coefficients(alpha, sys));
}

}  // namespace

ModelSpec build_model(const ModelKindSpec& kind, const LightMatterSystem& sys) {
  switch (kind.kind) {
    case ModelKind::Exact:
      return {kind, build_h_alpha(kind.alpha, sys), false};
    case ModelKind::Standard:
      return {kind, CompositeOperator(standard_truncation(kind.alpha, sys),
                                      sys.space.truncated(), true),
              true};
    case ModelKind::Projected: {
      const CMat full = build_h_alpha(kind.alpha, sys).matrix();
      return {kind, CompositeOperator(restrict_to_subspace(full, sys.space),
                                      sys.space.truncated(), true),
              true};
    }
    case ModelKind::RotatedClass: {
      const CMat t = truncated_unitary(kind.alpha, kind.alpha_target, sys).matrix();
      CMat h = t * standard_truncation(kind.alpha, sys) * t.adjoint();
      h = 0.5 * (h + h.adjoint()).eval();
      return {kind, CompositeOperator(std::move(h), sys.space.truncated(), true), true};
    }
  }
  throw Error(ErrorCode::UnsupportedKind, "unknown model kind");
}

CompositeOperator delta_operator(const LightMatterSystem& sys, DeltaForm form) {
  const Dims dims = sys.space.truncated();
  const long nph = sys.mode.n_photons;
  const long k = sys.space.kept_levels;
  switch (form) {
    case DeltaForm::Closed: {
      if (k != 2) {
        throw Error(ErrorCode::ClosedFormNeedsTwoLevels,
                    "closed-form Delta is defined for M = 1 only");
      }
      // (PxP)^-2 is x10^-2 I by definition.
      const double x10 = sys.basis.x10();
      const double eta = sys.eta();
      const CMat block = sys.basis.x2.topLeftCorner(2, 2).cast<cplx>() / (x10 * x10) -
                         CMat::Identity(2, 2);
      return {eta * eta * kron(block, CMat::Identity(nph, nph)), dims, true};
    }
    case DeltaForm::HamiltonianDifference: {
      const CMat projected = build_model(ModelKindSpec::projected(1.0), sys).hamiltonian.matrix();
      const CMat standard = standard_truncation(1.0, sys);
      return {(projected - standard) / sys.mode.omega, dims, true};
    }
    case DeltaForm::RotationDifference: {
      const CMat number = kron(CMat::Identity(k, k), sys.fock.number);
      const CMat t01 = truncated_unitary(0.0, 1.0, sys).matrix();
      const CMat pr01 = gauge_unitary_rows(0.0, 1.0, sys, dims.total());
      CVec full_number(sys.space.full().total());
      for (long i = 0; i < full_number.size(); ++i) {
        full_number(i) = static_cast<double>(i % nph);
      }
      CMat d = (pr01 * full_number.asDiagonal()) * pr01.adjoint() -
               t01 * number * t01.adjoint();
      d = 0.5 * (d + d.adjoint()).eval();
      return {std::move(d), dims, true};
    }
  }
  throw Error(ErrorCode::UnsupportedKind, "unknown Delta form");
}

}  // namespace gaugetrunc
