#include <doctest.h>

#include <cmath>

#include "et14/sampler.hpp"
#include "et14/verifier.hpp"
#include "oracle.hpp"

using namespace et14;

namespace {

MultiplierState sample(std::uint64_t seed) {
  SamplerConfig cfg;
  return random_state(cfg, seed);
}

MultiplierState sample_eta(std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.require_x1_nonzero = true;
  cfg.eps1 = 0.1;
  return random_state(cfg, seed);
}

ClosureSpec random_x_spec(std::uint64_t seed, int degree = 3) {
  Rng rng(seed);
  ClosureSpec spec;
  spec.form = ClosureForm::kXForm;
  for (int r = 0; r < 4; ++r) spec.functions.push_back(random_polynomial(8, degree, rng));
  return spec;
}

}  // namespace

TEST_CASE("frame-change residuals vanish for both closure forms") {
  for (int f = 0; f < 3; ++f) {
    const auto spec = random_x_spec(9100 + f);
    ClosureSpec eta = spec;
    eta.form = ClosureForm::kEtaForm;
    for (int i = 0; i < 30; ++i) {
      const auto s = sample(9200 + 40 * f + i);
      const auto g = galilean_residuals(s, spec);
      for (int k = 0; k < 3; ++k) CHECK(std::abs(g.h_residual[k]) <= 1e-9 * g.scale);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          CHECK(std::abs(g.phi_residual[a][b]) <= 1e-9 * g.scale);

      const auto se = sample_eta(9300 + 40 * f + i);
      const auto ge = galilean_residuals(se, eta);
      for (int k = 0; k < 3; ++k) CHECK(std::abs(ge.h_residual[k]) <= 1e-9 * ge.scale);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          CHECK(std::abs(ge.phi_residual[a][b]) <= 1e-9 * ge.scale);
    }
  }
}

TEST_CASE("frame-change residuals match a finite-difference evaluation") {
  const auto spec = random_x_spec(1234, 2);
  const auto s = sample(4321);
  const auto g = galilean_residuals(s, spec);

  // FD gradient of h' in the packed coordinates, assembled into the operator.
  struct Ctx {
    const ClosureSpec* spec;
  } ctx{&spec};
  const auto fd = oracle::fd_gradient(
      [](const MultiplierState& st, const void* c) {
        return assemble_potentials(st, *static_cast<const Ctx*>(c)->spec).h;
      },
      &ctx, s, 1e-5);
  StateGradient sg;
  sg.d_lambda = fd[0];
  for (int i = 0; i < 3; ++i) sg.d_lambda_i[i] = fd[1 + i];
  sg.d_lambda_ij(0, 0) = fd[4];
  sg.d_lambda_ij(1, 1) = fd[5];
  sg.d_lambda_ij(2, 2) = fd[6];
  sg.d_lambda_ij(0, 1) = 0.5 * fd[7];
  sg.d_lambda_ij(0, 2) = 0.5 * fd[8];
  sg.d_lambda_ij(1, 2) = 0.5 * fd[9];
  for (int i = 0; i < 3; ++i) sg.d_lambda_ill[i] = fd[10 + i];
  const Vec3d fd_res = galilean_from_gradient(sg, s);
  for (int k = 0; k < 3; ++k)
    CHECK(std::abs(fd_res[k] - g.h_residual[k]) <= 1e-5 * g.scale);
}

TEST_CASE("restricted operator demo: f = 16 lambda leaves exactly 16 lambda_i") {
  MultiplierState s = state_C(1.0, 0.0, 0.0);
  s.lambda_i = {1, 0, 0};
  const Vec3d r = galilean_apply(
      [](const StateT<Dual<kStateDim>>& sd) { return 16.0 * sd.lambda; }, s);
  CHECK(r[0] == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(r[1] == 0.0);
  CHECK(r[2] == 0.0);

  // f constant: every slot of the operator vanishes.
  const Vec3d z = galilean_apply(
      [](const StateT<Dual<kStateDim>>&) { return Dual<kStateDim>(2.5); }, sample(5));
  for (int k = 0; k < 3; ++k) CHECK(z[k] == 0.0);
}

TEST_CASE("compatibility: families pass, H0 = X6 fails, H0 = X5 is a member") {
  ClosureSpec x6;
  x6.form = ClosureForm::kXForm;
  x6.functions = {Polynomial::variable(8, 5), Polynomial::constant(8, 0),
                  Polynomial::constant(8, 0), Polynomial::constant(8, 0)};
  ClosureSpec x5 = x6;
  x5.functions[0] = Polynomial::variable(8, 4);

  int witness_hits = 0, total = 0;
  for (int i = 0; i < 60; ++i) {
    const auto s = sample(7700 + i);
    ++total;
    const double r6 =
        std::abs(compatibility_residual(s, x6)[0]) / compatibility_scale(s, x6);
    const Vec3d r5 = compatibility_residual(s, x5);
    if (r6 >= 1e-3) ++witness_hits;
    for (int k = 0; k < 3; ++k)
      CHECK(std::abs(r5[k]) <= 1e-11 * compatibility_scale(s, x5));
  }
  CHECK(witness_hits >= static_cast<int>(0.95 * total));

  // The H0 = X6 residual has the closed form 2 X2 V0 - 16 X1 V1.
  const auto s = sample(808);
  const auto xb = compute_X(s);
  const auto v = compute_V(s);
  const Vec3d res = compatibility_residual(s, x6);
  for (int k = 0; k < 3; ++k)
    CHECK(res[k] ==
          doctest::Approx(2.0 * xb.x[1] * v[0][k] - 16.0 * xb.x[0] * v[1][k]).epsilon(1e-10));
}

TEST_CASE("X-space relations: read-off examples") {
  Rng rng(31415);
  std::array<double, 8> x;
  for (auto& v : x) v = rng.uniform(-1, 1);
  x[0] = 0.7;
  x[1] = -0.9;

  // H1 = X5, others zero: the second relation reads 16 X1.
  std::array<std::shared_ptr<const ScalarFunction>, 4> h{
      Polynomial::constant(8, 0), Polynomial::variable(8, 4), Polynomial::constant(8, 0),
      Polynomial::constant(8, 0)};
  const auto pde = pde_system_residual(h, x, kPCoefficients);
  CHECK(pde.residual[1] == doctest::Approx(16.0 * x[0]).epsilon(1e-13));

  // Constant functions: all four relations vanish.
  std::array<std::shared_ptr<const ScalarFunction>, 4> hc{
      Polynomial::constant(8, 0.3), Polynomial::constant(8, -1.2),
      Polynomial::constant(8, 0.5), Polynomial::constant(8, 2.0)};
  const auto pc = pde_system_residual(hc, x, kPCoefficients);
  for (int t = 0; t < 4; ++t) CHECK(pc.residual[t] == 0.0);

  // Functions of X1..X4 only: every term carries a derivative in X5..X8.
  Rng rng2(999);
  std::array<std::shared_ptr<const ScalarFunction>, 4> hq;
  for (auto& f : hq) {
    auto base = random_polynomial(4, 3, rng2);
    f = std::make_shared<Polynomial>(8, base->terms());
  }
  const auto pq = pde_system_residual(hq, x, kPCoefficients);
  for (int t = 0; t < 4; ++t) CHECK(std::abs(pq.residual[t]) <= 1e-14);
}

TEST_CASE("reduced forms turn the eliminated relation into an identity") {
  // Free-derivative oracle: random derivative matrices, any weights.
  Rng rng(2718);
  for (const auto& w : {kPCoefficients, kAssemblyWeights}) {
    for (int trial = 0; trial < 50; ++trial) {
      std::array<std::array<double, 8>, 4> d{};
      for (auto& row : d)
        for (auto& v : row) v = rng.uniform(-2, 2);
      std::array<double, 8> x;
      for (auto& v : x) v = rng.uniform(-2, 2);
      if (std::abs(x[0]) < 0.2) x[0] += x[0] < 0 ? -0.2 : 0.2;
      if (std::abs(x[1]) < 0.2) x[1] += x[1] < 0 ? -0.2 : 0.2;
      const auto rep = derived_forms_from_derivs(d, x, w);
      CHECK(rep.identity_defect_1 <= 1e-12);
      CHECK(rep.identity_defect_2 <= 1e-12);
    }
  }

  // Family-built functions satisfy the reduced forms themselves.
  Rng frng(5);
  auto psi = random_polynomial(8, 3, frng);
  std::array<std::shared_ptr<const ScalarFunction>, 3> hs;
  for (auto& f : hs) f = random_polynomial(7, 3, frng);
  const auto fam = build_compat_family_X(psi, hs, nullptr, {nullptr, nullptr, nullptr},
                                         kPCoefficients);
  std::array<std::shared_ptr<const ScalarFunction>, 4> h;
  for (int r = 0; r < 4; ++r) h[r] = fam.functions[r];
  for (int i = 0; i < 30; ++i) {
    std::array<double, 8> x;
    for (auto& v : x) v = frng.uniform(-1, 1);
    if (std::abs(x[0]) < 0.1) x[0] += x[0] < 0 ? -0.1 : 0.1;
    if (std::abs(x[1]) < 0.1) x[1] += x[1] < 0 ? -0.1 : 0.1;
    const auto rep = derived_forms_check(h, x, kPCoefficients);
    for (double v : rep.eq13_residual) CHECK(std::abs(v) <= 1e-9 * rep.eq13_scale);
    for (double v : rep.eq15_residual) CHECK(std::abs(v) <= 1e-9 * rep.eq15_scale);
  }

  std::array<double, 8> xz{};
  CHECK_THROWS_AS(derived_forms_check(h, xz, kPCoefficients), SingularDenominator);
}

TEST_CASE("subsystem conditions: legal closures pass, illegal dependence fails") {
  // H0 = second argument.
  ClosureSpec legal;
  legal.form = ClosureForm::kSubsystem5;
  legal.functions = {Polynomial::variable(2, 1)};

  ClosureSpec constant;
  constant.form = ClosureForm::kSubsystem5;
  constant.functions = {Polynomial::constant(2, 1.4)};

  Rng rng(606);
  ClosureSpec randomh;
  randomh.form = ClosureForm::kSubsystem5;
  randomh.functions = {random_polynomial(2, 3, rng)};

  for (int i = 0; i < 40; ++i) {
    Rng r(Rng::stream_seed(37, i));
    Sub5State s5;
    s5.lambda = r.uniform(-1, 1);
    for (auto& v : s5.lambda_i) v = r.uniform(-1, 1);
    s5.lambda_ll = r.uniform(-1, 1);
    for (const auto* spec : {&legal, &constant, &randomh}) {
      const auto res = subsystem_residual(s5, *spec);
      for (int k = 0; k < 3; ++k) CHECK(std::abs(res.h_residual[k]) <= 1e-10 * res.scale);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          CHECK(std::abs(res.phi_residual[a][b]) <= 1e-10 * res.scale);
      // The potential-level compatibility condition comes for free.
      const MultiplierState s = embed_sub5(s5);
      const Vec3d comp = compatibility_residual(s, *spec);
      for (int k = 0; k < 3; ++k)
        CHECK(std::abs(comp[k]) <= 1e-10 * std::max(compatibility_scale(s, *spec), 1.0));
    }
  }

  // h' = -(2/3) l_ll * lambda is not expressible through the legal arguments
  // and leaves -(2/3) l_ll lambda_i.
  Sub5State s5;
  s5.lambda = 0.9;
  s5.lambda_i = {0.4, -0.8, 0.1};
  s5.lambda_ll = 1.2;
  const MultiplierState s = embed_sub5(s5);
  const auto sd = seed_state14(s);
  const Dual<kStateDim> hbad = (-2.0 / 3.0) * sd.lambda_ij.trace() * sd.lambda;
  for (int i = 0; i < 3; ++i) {
    const double res = hbad.g[0] * s5.lambda_i[i] + (2.0 / 3.0) * s5.lambda_ll * hbad.g[1 + i];
    CHECK(res == doctest::Approx(-(2.0 / 3.0) * s5.lambda_ll * s5.lambda_i[i]).epsilon(1e-12));
  }
}

TEST_CASE("noncommutativity report carries the three facts") {
  const auto rep = noncommutativity_demo(4242, 50);
  CHECK(rep.pass_a);
  CHECK(rep.fact_a_max_abs_h <= 1e-12);
  CHECK(rep.pass_b);
  CHECK(rep.fact_b_residual[0] == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(rep.fact_b_residual[1] == 0.0);
  CHECK(rep.pass_c);
  CHECK(rep.fact_c_residual_norm > 0.1);
}

TEST_CASE("standalone residual entry points agree with the bundled one") {
  const auto spec = random_x_spec(777, 2);
  const auto s = sample(778);
  const auto g = galilean_residuals(s, spec);
  const Vec3d h = galilean_residual_h(s, spec);
  const Mat3d phi = galilean_residual_phi(s, spec);
  for (int k = 0; k < 3; ++k) CHECK(h[k] == doctest::Approx(g.h_residual[k]).epsilon(1e-14));
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      CHECK(phi[i][k] == doctest::Approx(g.phi_residual[i][k]).epsilon(1e-14));
  CHECK(galilean_operator(
            [](const StateT<Dual<kStateDim>>& sd) {
              return compute_X(sd).x[0];
            },
            s, 0) == 0.0);
}
