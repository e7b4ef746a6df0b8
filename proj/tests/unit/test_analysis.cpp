#include <cmath>

#include "fixture.hpp"

using namespace gaugetrunc;
using fixture::low_photon_block;
using fixture::throws_code;

namespace {

// Reference point used for the frozen values: eta = 1, N_mat = 20, N_ph = 50.
struct StrongCoupling {
  LightMatterSystem sys = fixture::system(1.0, 20, 50);
  FrameContext ctx{sys};
  EigenSystem exact0 = eigensolve(build_model(ModelKindSpec::exact(0.0), sys));
  EigenSystem exact1 = eigensolve(build_model(ModelKindSpec::exact(1.0), sys));
};

const StrongCoupling& strong() {
  static const StrongCoupling s;
  return s;
}

double ground_average(const Prescription& p, const Observable& obs, const StrongCoupling& s) {
  const EigenSystem es = p.model.kind == ModelKind::Exact && p.model.alpha == 0.0
                             ? s.exact0
                             : eigensolve(build_model(p.model, s.sys));
  return average(obs, p.frame, s.ctx, es, 0);
}

}  // namespace

TEST_CASE("eigensolve in the decoupled limit") {
  const auto sys = fixture::system(0.0, 6, 12);
  const auto exact = eigensolve(build_model(ModelKindSpec::exact(0.0), sys));
  CHECK(exact.energies(0) == doctest::Approx(sys.basis.eps(0) + 0.5).epsilon(1e-12));
  const auto check = check_eigensystem(exact, build_h_alpha(0.0, sys).matrix());
  CHECK(check.residual < 1e-10);
  CHECK(check.orthonormality < 1e-10);

  const auto qrm = eigensolve(build_model(ModelKindSpec::standard(1.0), sys));
  CHECK(qrm.on_subspace);
  std::vector<double> expected;
  for (long mu = 0; mu < 2; ++mu) {
    for (long n = 0; n < 12; ++n) expected.push_back(sys.basis.eps(mu) + n + 0.5);
  }
  std::sort(expected.begin(), expected.end());
  for (long i = 0; i < 24; ++i) CHECK(qrm.energies(i) == doctest::Approx(expected[i]).epsilon(1e-12));
  const auto t = transition_energies(qrm, 3);
  REQUIRE(t.size() == 3);
  CHECK(t[0] == doctest::Approx(1.0));
  CHECK(t[1] == doctest::Approx(1.0));
  CHECK(t[2] == doctest::Approx(2.0));
}

TEST_CASE("fidelity") {
  CVec u = CVec::Zero(3), v = CVec::Zero(3);
  u(0) = 1.0;
  v(1) = 1.0;
  CHECK(fidelity(u, u) == doctest::Approx(1.0));
  CHECK(fidelity(u, v) == 0.0);
  CVec w(3);
  w << cplx(0.6, 0.0), cplx(0.0, 0.8), 0.0;
  CHECK(fidelity(std::exp(cplx(0, 1.3)) * w, u) == doctest::Approx(fidelity(w, u)).epsilon(1e-14));
  CHECK(throws_code([&] { fidelity(u, CVec::Zero(4)); }, ErrorCode::SpaceMismatch));
  CHECK(throws_code([&] { fidelity(u, 2.0 * v); }, ErrorCode::NotNormalized));
}

TEST_CASE("Cauchy-Schwarz bound") {
  const auto sys = fixture::system(0.5, 6, 10);
  CVec inside = CVec::Zero(60);
  inside(3) = 1.0;
  CHECK(cs_bound(inside, sys.space) == doctest::Approx(1.0));
  CVec s = CVec::Random(60);
  s.normalize();
  const CVec best = lift_to_full(optimal_truncated_state(s, sys.space), sys.space);
  CHECK(std::abs(fidelity(best, s) - cs_bound(s, sys.space)) < 1e-12);
  CHECK(throws_code([&] { cs_bound(CVec::Zero(20), sys.space); }, ErrorCode::SpaceMismatch));
  CVec outside = CVec::Zero(60);
  outside(59) = 1.0;
  CHECK(throws_code([&] { optimal_truncated_state(outside, sys.space); }, ErrorCode::NotNormalized));
}

TEST_CASE("ground-state bounds at eta = 1") {
  const auto& s = strong();
  const double coulomb = cs_bound(s.exact0.state(0), s.sys.space);
  const double dipole = cs_bound(s.exact1.state(0), s.sys.space);
  CHECK(dipole > coulomb);
  CHECK(coulomb == doctest::Approx(0.954703).epsilon(2e-5));
  CHECK(dipole == doctest::Approx(0.999984).epsilon(2e-6));

  const auto qrm = eigensolve(build_model(ModelKindSpec::standard(1.0), s.sys));
  const auto rec = paired_fidelity(qrm, s.exact1, s.sys.space, 1.0);
  CHECK(rec.fidelity <= rec.bound + 1e-10);
  CHECK(rec.bound == doctest::Approx(dipole));
  CHECK_FALSE(rec.near_degenerate);
  CHECK(throws_code([&] { paired_fidelity(s.exact1, qrm, s.sys.space, 1.0); }, ErrorCode::SpaceMismatch));
  CHECK(throws_code([&] { paired_fidelity(qrm, s.exact1, s.sys.space, 1.0, 5000); },
                    ErrorCode::DimensionMismatch));
}

TEST_CASE("frozen ground-state averages at eta = 1") {
  const auto& s = strong();
  struct Row {
    const char* label;
    double n_et;
    double gamma;
  };
  const Row rows[] = {{"exact", 0.150590, 0.077145},
                      {"dipole_truncated", 0.147288, 0.076979},
                      {"h10_as_coulomb", 0.077315, 0.030105},
                      {"coulomb_truncated", 0.858897, -1.0}};
  for (const auto& p : standard_prescriptions()) {
    for (const auto& r : rows) {
      if (p.label != r.label) continue;
      CAPTURE(p.label);
      CHECK(ground_average(p, Observable::n_et(), s) == doctest::Approx(r.n_et).epsilon(2e-5));
      if (r.gamma >= 0.0) {
        CHECK(ground_average(p, Observable::gamma(), s) == doctest::Approx(r.gamma).epsilon(2e-5));
      }
    }
  }
}

TEST_CASE("energy averages in every exact gauge") {
  const auto sys = fixture::system(0.5, 12, 30);
  const FrameContext ctx(sys);
  for (double alpha : {0.0, 0.5, 1.0}) {
    const auto es = eigensolve(build_model(ModelKindSpec::exact(alpha), sys));
    for (long i = 0; i < 3; ++i) {
      CHECK(average(Observable::energy(), FramePrescription::exact_gauge(alpha), ctx, es, i) ==
            doctest::Approx(es.energies(i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("closed gauge forms against the numerical rotation") {
  const auto sys = fixture::system(0.5, 24, 40);
  const FrameContext ctx(sys);
  const auto frame = FramePrescription::exact_gauge(1.0);
  for (auto obs : {Observable::n_et(), Observable::q_et(), Observable::p_over_omega()}) {
    CAPTURE(to_string(obs));
    const CMat closed = represent(obs, frame, ctx);
    const CMat numeric = represent(Observable::custom(coulomb_representation(obs, sys)), frame, ctx);
    CHECK(max_abs(low_photon_block(closed - numeric, 2, 40, 20)) < 1e-6);
  }
}

TEST_CASE("frames coincide without coupling") {
  const auto sys = fixture::system(0.0, 6, 12);
  const FrameContext ctx(sys);
  for (auto obs : {Observable::n_et(), Observable::gamma(), Observable::q_et(),
                   Observable::p_over_omega(), Observable::energy()}) {
    CAPTURE(to_string(obs));
    const CMat ref = restrict_to_subspace(represent(obs, FramePrescription::exact_gauge(0.0), ctx), sys.space);
    for (auto f : {FramePrescription::dipole_truncated(), FramePrescription::rotated_correct(),
                   FramePrescription::rotated_as_coulomb(), FramePrescription::naive_coulomb()}) {
      CHECK(max_abs(represent(obs, f, ctx) - ref) < 1e-12);
    }
    CHECK(max_abs(represent(obs, FramePrescription::exact_gauge(1.0), ctx) -
                  represent(obs, FramePrescription::exact_gauge(0.0), ctx)) < 1e-12);
  }
}

TEST_CASE("Q_ET needs no frame correction") {
  const auto sys = fixture::system(0.5, 12, 60);
  const FrameContext ctx(sys);
  const CMat correct = represent(Observable::q_et(), FramePrescription::rotated_correct(), ctx);
  const CMat coulomb = represent(Observable::q_et(), FramePrescription::naive_coulomb(), ctx);
  CHECK(max_abs(low_photon_block(correct - coulomb, 2, 60, 30)) < 1e-6);
  // n_ET does need it
  const CMat n_correct = represent(Observable::n_et(), FramePrescription::rotated_correct(), ctx);
  const CMat n_coulomb = represent(Observable::n_et(), FramePrescription::naive_coulomb(), ctx);
  CHECK(max_abs(low_photon_block(n_correct - n_coulomb, 2, 60, 30)) > 1e-2);
}

TEST_CASE("misidentified photon number differs by -<Delta>") {
  const auto sys = fixture::system(0.5, 12, 40);
  const FrameContext ctx(sys);
  const auto qrm = eigensolve(build_model(ModelKindSpec::standard(1.0), sys));
  const CMat delta = delta_operator(sys, DeltaForm::Closed).matrix();
  const CMat& t10 = ctx.truncated_rotation();
  for (long i = 0; i < 4; ++i) {
    const CVec e = qrm.state(i);
    const double as_coulomb =
        average(Observable::n_et(), FramePrescription::rotated_as_coulomb(), ctx, CVec(t10 * e));
    const double dipole = average(Observable::n_et(), FramePrescription::dipole_truncated(), ctx, e);
    CHECK(as_coulomb - dipole == doctest::Approx(-expectation(delta, e)).epsilon(1e-8));
  }
}

TEST_CASE("average preconditions") {
  const auto sys = fixture::system(0.3, 6, 12);
  const FrameContext ctx(sys);
  const auto exact = eigensolve(build_model(ModelKindSpec::exact(0.0), sys));
  CHECK(throws_code([&] { average(Observable::n_et(), FramePrescription::dipole_truncated(), ctx, exact, 0); },
                    ErrorCode::SpaceMismatch));
  CHECK(throws_code([&] { average(Observable::n_et(), FramePrescription::exact_gauge(0.0), ctx, exact, -1); },
                    ErrorCode::DimensionMismatch));
  const FrameContext empty;
  CHECK_FALSE(empty.has_system());
  CHECK(throws_code([&] { represent(Observable::n_et(), FramePrescription::naive_coulomb(), empty); },
                    ErrorCode::MissingContext));
  CHECK(throws_code([&] { represent(Observable::custom(CMat::Zero(3, 3)), FramePrescription::naive_coulomb(), ctx); },
                    ErrorCode::DimensionMismatch));
  CMat anti = CMat::Zero(2, 2);
  anti(0, 1) = 1.0;
  anti(1, 0) = -1.0;
  CVec psi(2);
  psi << 1.0 / std::sqrt(2.0), cplx(0, 1.0 / std::sqrt(2.0));
  CHECK(throws_code([&] { expectation(anti, psi); }, ErrorCode::NotHermitian));
  CHECK(throws_code([&] { expectation(anti, CVec::Zero(3)); }, ErrorCode::SpaceMismatch));
  const auto vac = fixture::system(0.0, 4, 12);
  const FrameContext vctx(vac);
  const auto ves = eigensolve(build_model(ModelKindSpec::exact(0.0), vac));
  CHECK(std::abs(average(Observable::n_et(), FramePrescription::exact_gauge(0.0), vctx, ves, 0)) < 1e-14);
}

TEST_CASE("thermal averages") {
  const auto sys = fixture::system(0.0, 4, 30);
  const FrameContext ctx(sys);
  const auto es = eigensolve(build_model(ModelKindSpec::exact(0.0), sys));
  const auto frame = FramePrescription::exact_gauge(0.0);
  for (double t : {0.1, 0.25, 0.5}) {
    CHECK(thermal_average(Observable::n_et(), frame, ctx, es, t) ==
          doctest::Approx(1.0 / std::expm1(1.0 / t)).epsilon(1e-9));
  }
  CHECK(thermal_average(Observable::n_et(), frame, ctx, es, 0.0) == 0.0);
  CHECK(throws_code([&] { thermal_average(Observable::n_et(), frame, ctx, es, -0.1); }, ErrorCode::InvalidSpec));

  const auto strong_sys = fixture::system(0.8, 10, 30);
  const FrameContext sctx(strong_sys);
  const auto qrm = eigensolve(build_model(ModelKindSpec::standard(1.0), strong_sys));
  const auto dt = FramePrescription::dipole_truncated();
  CHECK(thermal_average(Observable::n_et(), dt, sctx, qrm, 1e-4) ==
        doctest::Approx(average(Observable::n_et(), dt, sctx, qrm, 0)).epsilon(1e-12));
}

TEST_CASE("Delta variation") {
  const auto free = delta_variation(fixture::system(0.0, 4, 20), 3);
  for (double d : free) CHECK(std::abs(d) < 1e-14);
  const auto sys = fixture::system(1.0, 4, 50);
  const auto closed = delta_variation(sys, 3);
  const auto ham = delta_variation(sys, 3, DeltaForm::HamiltonianDifference);
  REQUIRE(closed.size() == 3);
  double largest = 0.0;
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(closed[i] - ham[i]) < 1e-10);
    largest = std::max(largest, std::abs(closed[i]));
  }
  CHECK(largest < 0.02);
  CHECK(largest == doctest::Approx(0.010556).epsilon(1e-3));
}

TEST_CASE("prescription table") {
  const auto p = standard_prescriptions();
  REQUIRE(p.size() == 4);
  CHECK(p[0].label == "exact");
  CHECK(p[2].model.kind == ModelKind::RotatedClass);
  CHECK(p[2].frame.tag == FrameTag::RotatedFrameAsCoulomb);
  CHECK(p[3].model.alpha == 0.0);
}

TEST_CASE("cutoff convergence") {
  auto ground = [](double eta, double alpha) {
    return [eta, alpha](const Cutoffs& c) {
      const auto sys = fixture::system(eta, c.n_matter, c.n_photon);
      return std::vector<double>{hermitian_eigen(build_h_alpha(alpha, sys).matrix(), c.n_photon, false).values(0)};
    };
  };
  SUBCASE("decoupled system settles immediately") {
    const auto r = converge(ground(0.0, 0.0), {{4, 16}, {6, 20}, {8, 24}});
    CHECK(r.converged);
    CHECK(r.steps.size() == 2);
    CHECK(r.final_cutoffs == Cutoffs{6, 20});
    CHECK(std::isinf(r.steps[0].delta));
    CHECK(to_json(r).at("steps")[0].at("delta").is_null());
  }
  SUBCASE("ground energy at eta = 1 converges before 80 photons") {
    std::vector<Cutoffs> schedule;
    for (long n = 16; n <= 80; n += 8) schedule.push_back({20, n});
    const auto r = converge(ground(1.0, 0.0), schedule, 1e-8);
    CHECK(r.converged);
    CHECK(r.final_cutoffs.n_photon < 80);
  }
  SUBCASE("nested bases give a variational, settling sequence") {
    std::vector<Cutoffs> schedule;
    for (long n = 8; n <= 24; n += 4) schedule.push_back({n, 24});
    try {
      converge(ground(1.0, 1.0), schedule, 1e-300);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CutoffCeiling);
    }
    std::vector<double> energies;
    for (const auto& c : schedule) energies.push_back(ground(1.0, 1.0)(c)[0]);
    // rounding floor ~ 1e-13 relative on |E| ~ 75
    const double floor = 1e-12 * std::abs(energies.front());
    for (size_t k = 1; k < energies.size(); ++k) CHECK(energies[k] <= energies[k - 1] + floor);
    for (size_t k = 2; k < energies.size(); ++k) {
      CHECK(energies[k - 1] - energies[k] <= energies[k - 2] - energies[k - 1] + floor);
    }
  }
  SUBCASE("ceiling and shape errors") {
    CHECK(throws_code([&] { converge(ground(1.0, 0.0), {{4, 16}, {6, 16}}, 1e-12); }, ErrorCode::CutoffCeiling));
    int calls = 0;
    auto ragged = [&calls](const Cutoffs&) { return std::vector<double>(++calls, 1.0); };
    CHECK(throws_code([&] { converge(ragged, {{4, 16}, {6, 16}}); }, ErrorCode::DimensionMismatch));
  }
}
