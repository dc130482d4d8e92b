#include "et14/verifier.hpp"

#include <algorithm>
#include <cmath>

#include "et14/sampler.hpp"

namespace et14 {

Vec3d galilean_residual_h(const MultiplierState& s, const ClosureSpec& spec) {
  return galilean_apply(
      [&](const StateT<Dual<kStateDim>>& sd) { return assemble_potentials(sd, spec).h; }, s);
}

Mat3d galilean_residual_phi(const MultiplierState& s, const ClosureSpec& spec) {
  const auto sd = seed_state14(s);
  const auto pot = assemble_potentials(sd, spec);
  const double h = value_of(pot.h);
  Mat3d res{};
  for (int k = 0; k < 3; ++k) {
    const Vec3d gk = galilean_from_gradient(unpack_gradient(pot.phi[k]), s);
    for (int i = 0; i < 3; ++i) res[i][k] = gk[i] + (i == k ? h : 0.0);
  }
  return res;
}

GalileanResidual galilean_residuals(const MultiplierState& s, const ClosureSpec& spec,
                                    bool tamper_q1) {
  const auto sd = seed_state14(s);
  auto pot = assemble_potentials(sd, spec);
  if (tamper_q1) {
    const auto xb = compute_X(sd);
    const auto vb = compute_V(sd);
    const Dual<kStateDim> q1 = sd.lambda_ij.trace();
    pot.h += 8.0 * q1 * xb.x[0];
    for (int k = 0; k < 3; ++k) pot.phi[k] += q1 * vb[0][k];
  }
  GalileanResidual out;
  const double h = value_of(pot.h);
  out.scale = std::max(std::abs(h), 1e-30);

  const auto term_scale = [&](const StateGradient& g) {
    double m = std::abs(g.d_lambda * s.lambda_i[0]);
    const Vec3d Lg = s.lambda_ij.apply(g.d_lambda_i);
    const Vec3d Mw = g.d_lambda_ij.apply(s.lambda_ill);
    for (int i = 0; i < 3; ++i) {
      m = std::max(m, std::abs(g.d_lambda * s.lambda_i[i]));
      m = std::max(m, std::abs(2.0 * Lg[i]));
      m = std::max(m, std::abs(g.d_lambda_ij.trace() * s.lambda_ill[i]));
      m = std::max(m, std::abs(2.0 * Mw[i]));
      m = std::max(m, std::abs(4.0 * s.lambda_ppll * g.d_lambda_ill[i]));
    }
    return m;
  };

  const auto gh = unpack_gradient(pot.h);
  out.h_residual = galilean_from_gradient(gh, s);
  out.scale = std::max(out.scale, term_scale(gh));
  for (int k = 0; k < 3; ++k) {
    const auto gp = unpack_gradient(pot.phi[k]);
    const Vec3d gk = galilean_from_gradient(gp, s);
    out.scale = std::max(out.scale, term_scale(gp));
    for (int i = 0; i < 3; ++i) out.phi_residual[i][k] = gk[i] + (i == k ? h : 0.0);
  }
  return out;
}

GeneratorIdentityReport generator_identity_residuals(const MultiplierState& s) {
  const auto sd = seed_state14(s);
  const auto vd = compute_V(sd);
  const auto x = compute_X(s);
  GeneratorIdentityReport rep;
  for (int r = 0; r < 4; ++r) {
    const double wx = kAssemblyWeights[r] * x.x[r];
    double worst = 0, scale = std::abs(wx);
    for (int k = 0; k < 3; ++k) {
      const Vec3d g = galilean_from_gradient(unpack_gradient(vd[r][k]), s);
      for (int i = 0; i < 3; ++i) {
        const double res = g[i] + (i == k ? wx : 0.0);
        worst = std::max(worst, std::abs(res));
        scale = std::max(scale, std::abs(g[i]));
      }
    }
    rep.max_abs[r] = worst;
    rep.scale[r] = std::max(scale, 1e-30);
  }
  return rep;
}

Vec3d compatibility_residual(const MultiplierState& s, const ClosureSpec& spec) {
  const auto sd = seed_state14(s);
  const auto pot = assemble_potentials(sd, spec);
  Vec3d res;
  for (int k = 0; k < 3; ++k) res[k] = pot.phi[k].g[0] - pot.h.g[1 + k];
  return res;
}

double compatibility_scale(const MultiplierState& s, const ClosureSpec& spec) {
  const auto sd = seed_state14(s);
  const auto pot = assemble_potentials(sd, spec);
  double m = 0;
  for (int k = 0; k < 3; ++k)
    m = std::max({m, std::abs(pot.phi[k].g[0]), std::abs(pot.h.g[1 + k])});
  return std::max(m, 1e-30);
}

namespace {

std::array<std::array<double, 8>, 4> derivative_matrix(
    const std::array<std::shared_ptr<const ScalarFunction>, 4>& h,
    std::span<const double> x_point) {
  std::array<Dual<8>, 8> xd;
  for (int i = 0; i < 8; ++i) xd[i] = Dual<8>::seeded(x_point[i], i);
  std::array<std::array<double, 8>, 4> d{};
  for (int r = 0; r < 4; ++r) {
    const Dual<8> v = h[r]->eval(std::span<const Dual<8>>(xd));
    for (int s = 0; s < 8; ++s) d[r][s] = v.g[s];
  }
  return d;
}

}  // namespace

PdeResidual pde_residuals_from_derivs(const std::array<std::array<double, 8>, 4>& d,
                                      std::span<const double> x,
                                      const std::array<double, 4>& weights) {
  // E_t = sum_u W_u X_{u+1} (dH_t/dX_{5+u} - dH_u/dX_{5+t}); the four
  // displayed relations are 2 E_t.
  static constexpr double kDisplay[4] = {2.0, 2.0, 2.0, 2.0};
  PdeResidual out;
  for (int t = 0; t < 4; ++t) {
    double e = 0, scale = 0;
    for (int u = 0; u < 4; ++u) {
      const double a = weights[u] * x[u] * d[t][4 + u];
      const double b = weights[u] * x[u] * d[u][4 + t];
      e += a - b;
      scale = std::max({scale, std::abs(a), std::abs(b)});
    }
    out.residual[t] = kDisplay[t] * e;
    out.scale[t] = std::max(std::abs(kDisplay[t]) * scale, 1e-30);
  }
  return out;
}

PdeResidual pde_system_residual(const std::array<std::shared_ptr<const ScalarFunction>, 4>& h,
                                std::span<const double> x_point,
                                const std::array<double, 4>& weights) {
  return pde_residuals_from_derivs(derivative_matrix(h, x_point), x_point, weights);
}

DerivedFormsReport derived_forms_from_derivs(const std::array<std::array<double, 8>, 4>& d,
                                             std::span<const double> x,
                                             const std::array<double, 4>& weights) {
  const double w0x1 = weights[0] * x[0];
  const double w1x2 = weights[1] * x[1];
  if (std::abs(x[0]) < 1e-12) throw SingularDenominator("X1 = 0 in the first reduced form");
  if (std::abs(x[1]) < 1e-12) throw SingularDenominator("X2 = 0 in the second reduced form");

  DerivedFormsReport rep;
  // First reduced form: dH0/dX_{5+t} expressed from rows t = 1..3.
  // delta_t = dH0/dX_{5+t} - rhs_t.
  std::array<double, 3> delta{};
  {
    const double w2x3 = weights[2] * x[2], w3x4 = weights[3] * x[3];
    const double rhs1 = d[1][4] + (w2x3 / w0x1) * (d[1][6] - d[2][5]) +
                        (w3x4 / w0x1) * (d[1][7] - d[3][5]);
    const double rhs2 = d[2][4] + (w1x2 / w0x1) * (d[2][5] - d[1][6]) +
                        (w3x4 / w0x1) * (d[2][7] - d[3][6]);
    const double rhs3 = d[3][4] + (w1x2 / w0x1) * (d[3][5] - d[1][7]) +
                        (w2x3 / w0x1) * (d[3][6] - d[2][7]);
    delta = {d[0][5] - rhs1, d[0][6] - rhs2, d[0][7] - rhs3};
    rep.eq13_residual = delta;
    rep.eq13_scale = std::max({std::abs(d[0][5]), std::abs(d[0][6]), std::abs(d[0][7]),
                               std::abs(rhs1), std::abs(rhs2), std::abs(rhs3), 1e-30});
  }
  // Second reduced form: dH1/dX5, dH1/dX7, dH1/dX8 from rows t = 0, 2, 3.
  std::array<double, 3> eps{};
  {
    const double w2x3 = weights[2] * x[2], w3x4 = weights[3] * x[3];
    const double rhs1 = d[0][5] + (w2x3 / w1x2) * (d[0][6] - d[2][4]) +
                        (w3x4 / w1x2) * (d[0][7] - d[3][4]);
    const double rhs2 = d[2][5] + (w0x1 / w1x2) * (d[2][4] - d[0][6]) +
                        (w3x4 / w1x2) * (d[2][7] - d[3][6]);
    const double rhs3 = d[3][5] + (w0x1 / w1x2) * (d[3][4] - d[0][7]) +
                        (w2x3 / w1x2) * (d[3][6] - d[2][7]);
    eps = {d[1][4] - rhs1, d[1][6] - rhs2, d[1][7] - rhs3};
    rep.eq15_residual = eps;
    rep.eq15_scale = std::max({std::abs(d[1][4]), std::abs(d[1][6]), std::abs(d[1][7]),
                               std::abs(rhs1), std::abs(rhs2), std::abs(rhs3), 1e-30});
  }
  // Substituting the reduced forms back must turn the first (second) relation
  // into an identity: the relation residual equals a fixed combination of the
  // deviations, so the defect below is zero up to roundoff for ANY H.
  const auto pde = pde_residuals_from_derivs(d, x, weights);
  const double combo1 =
      2.0 * (weights[1] * x[1] * delta[0] + weights[2] * x[2] * delta[1] +
             weights[3] * x[3] * delta[2]);
  const double combo2 = 2.0 * (weights[0] * x[0] * eps[0] + weights[2] * x[2] * eps[1] +
                               weights[3] * x[3] * eps[2]);
  rep.identity_defect_1 = std::abs(pde.residual[0] - combo1) / pde.scale[0];
  rep.identity_defect_2 = std::abs(pde.residual[1] - combo2) / pde.scale[1];
  return rep;
}

DerivedFormsReport derived_forms_check(
    const std::array<std::shared_ptr<const ScalarFunction>, 4>& h,
    std::span<const double> x_point, const std::array<double, 4>& weights) {
  return derived_forms_from_derivs(derivative_matrix(h, x_point), x_point, weights);
}

SubsystemResidual subsystem_residual(const Sub5State& s5, const ClosureSpec& spec) {
  if (spec.form != ClosureForm::kSubsystem5) throw FormMismatch("subsystem form required");
  const MultiplierState s = embed_sub5(s5);
  const auto sd = seed_state14(s);
  const auto pot = assemble_potentials(sd, spec);
  const double h = value_of(pot.h);

  SubsystemResidual out;
  out.scale = 1e-30;
  const auto reduced = [&](const Dual<kStateDim>& f, int i) {
    return f.g[0] * s5.lambda_i[i] + (2.0 / 3.0) * s5.lambda_ll * f.g[1 + i];
  };
  for (int i = 0; i < 3; ++i) {
    out.h_residual[i] = reduced(pot.h, i);
    out.scale = std::max({out.scale, std::abs(pot.h.g[0] * s5.lambda_i[i]),
                          std::abs((2.0 / 3.0) * s5.lambda_ll * pot.h.g[1 + i])});
    for (int k = 0; k < 3; ++k) {
      out.phi_residual[i][k] = reduced(pot.phi[k], i) + (i == k ? h : 0.0);
      out.scale = std::max({out.scale, std::abs(h), std::abs(reduced(pot.phi[k], i))});
    }
  }
  return out;
}

NoncommutativityReport noncommutativity_demo(std::uint64_t seed, int samples) {
  NoncommutativityReport rep;

  // (a) On the restricted manifold lambda_ill = 0, lambda_ppll = 0 the
  // assembled X-form h' vanishes identically, whatever the H functions.
  SamplerConfig cfg;
  Rng poly_rng(Rng::stream_seed(seed, 77));
  ClosureSpec spec;
  spec.form = ClosureForm::kXForm;
  for (int r = 0; r < 4; ++r) spec.functions.push_back(random_polynomial(8, 3, poly_rng));
  double worst = 0;
  for (int i = 0; i < samples; ++i) {
    MultiplierState s = random_state(cfg, Rng::stream_seed(seed, 1000 + i));
    s.lambda_ill = {0, 0, 0};
    s.lambda_ppll = 0;
    const auto pot = assemble_potentials(seed_state14(s), spec);
    worst = std::max(worst, std::abs(value_of(pot.h)));
  }
  rep.fact_a_max_abs_h = worst;
  rep.pass_a = worst <= 1e-12;

  // (b) The restricted eta5 equals 16 lambda; applying the restricted
  // operator to it leaves 16 lambda_i.
  MultiplierState sb = state_C(1.0, 0.0, 0.0);
  sb.lambda_i = {1, 0, 0};
  rep.fact_b_state = sb;
  rep.fact_b_residual =
      galilean_apply([](const StateT<Dual<kStateDim>>& sd) { return 16.0 * sd.lambda; }, sb);
  for (int i = 0; i < 3; ++i) rep.fact_b_expected[i] = 16.0 * sb.lambda_i[i];
  rep.pass_b = true;
  for (int i = 0; i < 3; ++i)
    rep.pass_b = rep.pass_b &&
                 std::abs(rep.fact_b_residual[i] - rep.fact_b_expected[i]) <= 1e-12;

  // (c) lambda_a lambda_a - 4/3 lambda lambda_ll fails the restricted
  // condition at generic restricted states.
  double cnorm = 0;
  MultiplierState sc;
  for (int attempt = 0; attempt < 16 && cnorm <= 0.1; ++attempt) {
    sc = random_state(cfg, Rng::stream_seed(seed, 9000 + attempt));
    sc.lambda_ill = {0, 0, 0};
    sc.lambda_ppll = 0;
    const Vec3d r = galilean_apply(
        [](const StateT<Dual<kStateDim>>& sd) {
          return dot(sd.lambda_i, sd.lambda_i) -
                 (4.0 / 3.0) * sd.lambda * sd.lambda_ij.trace();
        },
        sc);
    cnorm = norm(r);
  }
  rep.fact_c_state = sc;
  rep.fact_c_residual_norm = cnorm;
  rep.pass_c = cnorm > 0.1;
  return rep;
}

}  // namespace et14
