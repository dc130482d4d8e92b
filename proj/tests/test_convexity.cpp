#include <doctest.h>

#include <cmath>

#include "et14/convexity.hpp"
#include "et14/json_io.hpp"
#include "et14/sampler.hpp"
#include "oracle.hpp"

using namespace et14;

namespace {

ClosureSpec random_spec(std::uint64_t seed, ClosureForm form, int degree = 3) {
  Rng rng(seed);
  ClosureSpec spec;
  spec.form = form;
  for (int r = 0; r < 4; ++r) spec.functions.push_back(random_polynomial(8, degree, rng));
  return spec;
}

/// eta-spec whose h'(eta) equals a chosen linear function of the etas:
/// h' = 8 K0 -> K0 = f/8 and K1..K3 = 0.
ClosureSpec eta_linear_spec(int eta_slot, double coef) {
  ClosureSpec spec;
  spec.form = ClosureForm::kEtaForm;
  spec.functions = {Polynomial::variable(8, eta_slot, coef / 8.0),
                    Polynomial::constant(8, 0.0), Polynomial::constant(8, 0.0),
                    Polynomial::constant(8, 0.0)};
  return spec;
}

}  // namespace

TEST_CASE("Hessian of a quadratic potential is the literal coefficient matrix") {
  // Subsystem closure with H0 = l_ll gives h' = -(2/3) (tr L)^2: constant
  // Hessian, -4/3 on every pair of diagonal lambda_ij slots.
  ClosureSpec spec;
  spec.form = ClosureForm::kSubsystem5;
  spec.functions = {Polynomial::variable(2, 0)};
  SamplerConfig cfg;
  const auto s = random_state(cfg, 12);
  const auto rep = hessian(s, spec);
  for (int i = 0; i < kStateDim; ++i)
    for (int j = 0; j < kStateDim; ++j) {
      const bool diag_pair = (i >= 4 && i <= 6) && (j >= 4 && j <= 6);
      CHECK(rep.h[i][j] == doctest::Approx(diag_pair ? -4.0 / 3.0 : 0.0).epsilon(1e-14));
    }
}

TEST_CASE("Hessian agrees with central finite differences") {
  const auto spec = random_spec(21, ClosureForm::kXForm, 2);
  SamplerConfig cfg;
  const auto s = random_state(cfg, 22);
  const auto rep = hessian(s, spec);

  const double step = 1e-4;
  const auto x0 = pack(s);
  double scale = 1e-12;
  for (int i = 0; i < kStateDim; ++i)
    for (int j = 0; j < kStateDim; ++j) scale = std::max(scale, std::abs(rep.h[i][j]));
  const auto eval = [&](const std::array<double, kStateDim>& x) {
    return assemble_potentials(unpack(x), spec).h;
  };
  for (int i = 0; i < kStateDim; ++i)
    for (int j = 0; j <= i; ++j) {
      auto xpp = x0, xpm = x0, xmp = x0, xmm = x0;
      xpp[i] += step;
      xpp[j] += step;
      xpm[i] += step;
      xpm[j] -= step;
      xmp[i] -= step;
      xmp[j] += step;
      xmm[i] -= step;
      xmm[j] -= step;
      const double fd = (eval(xpp) - eval(xpm) - eval(xmp) + eval(xmm)) / (4 * step * step);
      CHECK(std::abs(rep.h[i][j] - fd) <= 1e-5 * scale);
    }
}

TEST_CASE("counterexample machinery") {
  HessianReport rep;
  for (int i = 0; i < kStateDim; ++i) rep.h[i][i] = 1.0;
  rep.h[13][13] = -1.0;
  rep.verdict = Verdict::kIndefinite;
  DeltaState d{};
  d.lambda_ppll = 1.0;
  rep.counterexample = d;
  rep.counterexample_q = -1.0;
  double q = 0;
  const DeltaState got = counterexample_direction(rep, &q);
  CHECK(q == -1.0);
  CHECK(got.lambda_ppll == 1.0);
  CHECK(quadratic_form(rep, got) == doctest::Approx(-1.0));

  HessianReport pd;
  for (int i = 0; i < kStateDim; ++i) pd.h[i][i] = 1.0;
  pd.verdict = Verdict::kPositiveDefinite;
  CHECK_THROWS_AS(counterexample_direction(pd), NotIndefinite);
}

TEST_CASE("X-form closures are indefinite at C-states, with verified witnesses") {
  for (int f = 0; f < 5; ++f) {
    const auto spec = random_spec(7100 + f, ClosureForm::kXForm);
    Rng rng(810 + f);
    const MultiplierState sc = state_C(rng.uniform(-1, 1), rng.uniform(0.3, 1.5), 0.8);
    const auto rep = hessian(sc, spec);
    REQUIRE(rep.verdict == Verdict::kIndefinite);
    double q = 0;
    const DeltaState d = counterexample_direction(rep, &q);
    CHECK(q < 0);
    const double q_direct = quadratic_form(rep, d);
    const double q_fd = directional_second_derivative_fd(sc, spec, d);
    CHECK(q_direct < 0);
    CHECK(q_fd < 0);
    CHECK(std::abs(q_fd - q_direct) <= 1e-4 * std::max(std::abs(q_direct), 1e-6));
  }
}

TEST_CASE("block coefficients at C: single-derivative read-offs") {
  const double lam = 0.45, ll = 1.3, p = 0.7;
  const MultiplierState sc = state_C(lam, ll, p);

  // dh'/deta6 = 1, all other first derivatives zero.
  const auto c6 = coefficients_at_C(sc, eta_linear_spec(5, 1.0));
  CHECK(c6.b22 == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(c6.b12 == doctest::Approx((4.0 / 15.0) * ll).epsilon(1e-12));
  CHECK(c6.b11 ==
        doctest::Approx(-(2.0 / 45.0) * ll * ll + 8.0 * lam * p).epsilon(1e-12));

  // dh'/deta3 = 1 gives c = -8.
  const auto c3 = coefficients_at_C(sc, eta_linear_spec(2, 1.0));
  CHECK(c3.c == doctest::Approx(-8.0).epsilon(1e-12));

  CHECK_THROWS_AS(coefficients_at_C(random_state(SamplerConfig{}, 3),
                                    eta_linear_spec(5, 1.0)),
                  NotStateC);
}

TEST_CASE("block coefficients match the numerical Hessian at C-states") {
  for (int f = 0; f < 4; ++f) {
    const auto spec = random_spec(7700 + f, ClosureForm::kEtaForm);
    Rng rng(911 + f);
    const MultiplierState sc = state_C(rng.uniform(-1, 1), rng.uniform(0.4, 1.4),
                                       rng.uniform(0.4, 1.2));
    const auto rep = hessian(sc, spec);
    REQUIRE(rep.at_state_c);
    const auto coeffs = coefficients_at_C(sc, spec);
    double scale = 1e-12;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(rep.a[i][j]));
    scale = std::max({scale, std::abs(rep.b11), std::abs(rep.b22), std::abs(rep.c)});
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(coeffs.a[i][j] - rep.a[i][j]) <= 1e-6 * scale);
    CHECK(std::abs(coeffs.b11 - rep.b11) <= 1e-6 * scale);
    CHECK(std::abs(coeffs.b12 - rep.b12) <= 1e-6 * scale);
    CHECK(std::abs(coeffs.b22 - rep.b22) <= 1e-6 * scale);
    CHECK(std::abs(coeffs.c - rep.c) <= 1e-6 * scale);
    CHECK(rep.max_cross_block_rel <= 1e-6);

    // Q3: the deviatoric form matches the directional second derivative for
    // a random traceless perturbation.
    Rng drng(555 + f);
    DeltaState dev{};
    Sym3d m{};
    for (int k = 0; k < 6; ++k) m.a[k] = drng.uniform(-1, 1);
    dev.lambda_ij = deviatoric(m);
    const double q_fd = directional_second_derivative_fd(sc, spec, dev);
    double full_contraction = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        full_contraction += dev.lambda_ij(i, j) * dev.lambda_ij(i, j);
    CHECK(std::abs(q_fd - coeffs.c * full_contraction) <=
          1e-4 * std::max(std::abs(q_fd), 1.0));
  }
}

TEST_CASE("closed-form block constants: five slots exact, three corrected") {
  // Evaluate the hand closed forms per eta slot against the measured
  // Hessian blocks. The classical constants are exact for eta2..eta6 (and for
  // b12 and c everywhere); the classical eta7 entry of b22 and the classical
  // eta7/eta8 entries of b11 disagree with the exact second-order behavior
  // of the eta invariants.
  const double lam = 0.45, ll = 1.3, p = 0.7;
  const MultiplierState sc = state_C(lam, ll, p);

  const auto classic_b22 = [&](int j) {  // j: 1-based eta index
    switch (j) {
      case 6: return 8.0;
      case 7: return (112.0 / 15.0) * ll;
      case 8: return (32.0 / 225.0) * ll * ll;
      default: return 0.0;
    }
  };
  const auto classic_b12 = [&](int j) {
    switch (j) {
      case 5: return -4.0;
      case 6: return (4.0 / 15.0) * ll;
      case 7: return (32.0 / 225.0) * ll * ll;
      case 8: return -(16.0 / 1125.0) * ll * ll * ll;
      default: return 0.0;
    }
  };
  const auto classic_b11 = [&](int j) {
    switch (j) {
      case 2: return 2.0 * p * 2.0;
      case 3: return 2.0 * p * (-(8.0 / 15.0) * ll);
      case 4: return 2.0 * p * (8.0 / 225.0) * ll * ll;
      case 5: return (2.0 / 3.0) * ll;
      case 6: return -(2.0 / 45.0) * ll * ll + 2.0 * p * 4.0 * lam;
      case 7: return -(94.0 / 3375.0) * ll * ll * ll + 2.0 * p * (-(12.0 / 5.0) * lam * ll);
      case 8:
        return (8.0 / 5625.0) * ll * ll * ll + 2.0 * p * (16.0 / 225.0) * lam * ll * ll;
      default: return 0.0;
    }
  };

  for (int j = 2; j <= 8; ++j) {
    const auto rep = hessian(sc, eta_linear_spec(j - 1, 1.0));
    const bool b22_ok = std::abs(rep.b22 - classic_b22(j)) <= 1e-9 * std::max(1.0, std::abs(rep.b22));
    const bool b12_ok = std::abs(rep.b12 - classic_b12(j)) <= 1e-9 * std::max(1.0, std::abs(rep.b12));
    const bool b11_ok = std::abs(rep.b11 - classic_b11(j)) <= 1e-9 * std::max(1.0, std::abs(rep.b11));
    CHECK(b12_ok);
    if (j == 7) {
      CHECK_FALSE(b22_ok);  // classical +112/15 ll; measured -32/15 ll
      CHECK_FALSE(b11_ok);
      CHECK(rep.b22 == doctest::Approx(-(32.0 / 15.0) * ll).epsilon(1e-9));
    } else {
      CHECK(b22_ok);
      if (j == 8)
        CHECK_FALSE(b11_ok);  // classical 8/5625 ll^3 term; measured 8/3375 ll^4
      else
        CHECK(b11_ok);
    }
  }
}

TEST_CASE("Sylvester verdicts") {
  CCoefficients good;
  good.a = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  good.b11 = good.b22 = 1.0;
  good.b12 = 0.0;
  good.c = 1.0;
  CHECK(convexity_verdict(good).verdict == Verdict::kPositiveDefinite);

  CCoefficients bad = good;
  bad.b12 = 2.0;  // b12^2 >= b11 b22
  const auto v = convexity_verdict(bad);
  CHECK(v.verdict == Verdict::kIndefinite);
  CHECK(v.failing_minor == 4);
}

TEST_CASE("limit verdict extrapolates the minors toward vanishing lambda_ppll") {
  // h'(eta) = eta6 gives coefficients at most linear in lambda_ppll, so the
  // Richardson extrapolants agree exactly and the b-minor limit is clean.
  const auto rep = convexity_verdict_at_zero_ppll(0.3, 1.1, eta_linear_spec(5, 1.0));
  for (int i = 0; i < 6; ++i) CHECK(std::isfinite(rep.extrapolated[i]));
  // b11 -> -(2/45) ll^2 < 0 in the limit: not positive definite.
  CHECK(rep.extrapolated[3] == doctest::Approx(-(2.0 / 45.0) * 1.1 * 1.1).epsilon(1e-6));
  CHECK(rep.verdict.verdict != Verdict::kPositiveDefinite);

  // A minor that is purely quadratic in lambda_ppll has no consistent
  // first-order extrapolant over the documented sequence.
  ClosureSpec curved;
  curved.form = ClosureForm::kEtaForm;
  curved.functions = {
      std::make_shared<Polynomial>(
          8, std::vector<Polynomial::Term>{{{2, 0, 0, 0, 2, 0, 0, 0}, 1.0}}),
      Polynomial::constant(8, 0.0), Polynomial::constant(8, 0.0),
      Polynomial::constant(8, 0.0)};
  CHECK_THROWS_AS(convexity_verdict_at_zero_ppll(0.3, 1.1, curved), LimitNotConverged);
}

TEST_CASE("eta-form Hessian refuses near-singular lambda_ppll") {
  const auto spec = random_spec(91, ClosureForm::kEtaForm);
  auto s = state_C(0.1, 1.0, 1e-9);
  CHECK_THROWS_AS(hessian(s, spec), NearSingular);
}

TEST_CASE("verdict JSON schema") {
  VerdictReport v;
  v.minors = {1, 2, 3, 4, 5, -6};
  v.verdict = Verdict::kIndefinite;
  v.failing_minor = 5;
  DeltaState d{};
  d.lambda = 1.0;
  const auto j = verdict_to_json(v, d, {1e-2, 1e-3, 1e-4});
  CHECK(j.at("minors").size() == 6);
  CHECK(j.at("verdict") == "indefinite");
  CHECK(j.at("counterexample").at("lambda") == 1.0);
  CHECK(j.at("limit_sequence").size() == 3);
  const auto jn = verdict_to_json(v, std::nullopt);
  CHECK(jn.at("counterexample").is_null());
}
