#include <random>

#include "doctest.h"

#include "gaugetrunc/error.hpp"
#include "gaugetrunc/linalg.hpp"

using namespace gaugetrunc;

namespace {

CMat random_hermitian(long n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  CMat m(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  }
  return 0.5 * (m + m.adjoint());
}

}  // namespace

TEST_CASE("max_abs and hermiticity_error") {
  CMat m(2, 2);
  m << 1.0, cplx(0, 2), cplx(0, -2), -3.0;
  CHECK(max_abs(m) == doctest::Approx(3.0));
  CHECK(hermiticity_error(m) < 1e-15);
  m(0, 1) = 5.0;
  CHECK(hermiticity_error(m) > 1.0);
  CHECK(max_abs(CMat()) == 0.0);
}

TEST_CASE("kron follows the mixed-product rule") {
  const CMat a = random_hermitian(3, 1), b = random_hermitian(4, 2);
  const CMat c = random_hermitian(3, 3), d = random_hermitian(4, 4);
  CHECK(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)) < 1e-12);
  CHECK(kron(a, b)(1 * 4 + 2, 2 * 4 + 3) == a(1, 2) * b(2, 3));
}

TEST_CASE("hermitian_eigen on a random 50x50 matrix") {
  const CMat h = random_hermitian(50, 7);
  const auto es = hermitian_eigen(h);
  for (long i = 1; i < 50; ++i) CHECK(es.values(i) >= es.values(i - 1));
  const CMat resid = h * es.vectors - es.vectors * es.values.asDiagonal();
  CHECK(max_abs(resid) < 1e-10);
  CHECK(max_abs(es.vectors.adjoint() * es.vectors - CMat::Identity(50, 50)) < 1e-12);
  for (long k = 0; k < 50; ++k) {
    Eigen::Index imax = 0;
    es.vectors.col(k).cwiseAbs().maxCoeff(&imax);
    CHECK(std::abs(es.vectors(imax, k).imag()) < 1e-14);
    CHECK(es.vectors(imax, k).real() > 0.0);
  }
  const auto values_only = hermitian_eigen(h, 0, false);
  CHECK((values_only.values - es.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("photon-phase fast path matches the generic solver") {
  // real matter part (x) (real + i(a^dag - a)-like) photon part
  const long nm = 3, nph = 6;
  RMat xm = RMat::Random(nm, nm);
  xm = (xm + xm.transpose()).eval();
  CMat q = CMat::Zero(nph, nph);
  for (long n = 0; n + 1 < nph; ++n) {
    q(n + 1, n) = cplx(0, std::sqrt(n + 1.0));
    q(n, n + 1) = cplx(0, -std::sqrt(n + 1.0));
  }
  CMat hph = CMat::Zero(nph, nph);
  for (long n = 0; n < nph; ++n) hph(n, n) = n + 0.5;
  const CMat h = kron(xm.cast<cplx>(), q) + kron(CMat::Identity(nm, nm), hph);
  const auto fast = hermitian_eigen(h, nph);
  const auto slow = hermitian_eigen(h, 0);
  CHECK((fast.values - slow.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(max_abs(h * fast.vectors - fast.vectors * fast.values.asDiagonal()) < 1e-10);
}

TEST_CASE("hermitian_eigen rejects a non-square input") {
  bool thrown = false;
  try {
    hermitian_eigen(CMat::Zero(2, 3));
  } catch (const Error& e) {
    thrown = e.code() == ErrorCode::DimensionMismatch;
  }
  CHECK(thrown);
}

TEST_CASE("unitary_exp") {
  const CMat g = random_hermitian(6, 11);
  const CMat u = unitary_exp(g, 0.3);
  CHECK(max_abs(u * u.adjoint() - CMat::Identity(6, 6)) < 1e-12);
  CHECK(max_abs(unitary_exp(g, 0.3) * unitary_exp(g, -0.3) - CMat::Identity(6, 6)) < 1e-12);
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -2.0;
  const CMat ud = unitary_exp(d, 0.5);
  CHECK(std::abs(ud(0, 0) - std::exp(cplx(0, 0.5))) < 1e-14);
  CHECK(std::abs(ud(1, 1) - std::exp(cplx(0, -1.0))) < 1e-14);
}
