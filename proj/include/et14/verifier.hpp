#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "et14/closure.hpp"
#include "et14/invariants.hpp"
#include "et14/state.hpp"

namespace et14 {

/// Gradient of a scalar field over the state, unpacked into tensor slots
/// with the full-index pairing convention for the lambda_ij block.
struct StateGradient {
  double d_lambda{};
  Vec3d d_lambda_i{};
  Sym3d d_lambda_ij{};  // full-index: off-diagonal = half the stored slope
  Vec3d d_lambda_ill{};
  double d_lambda_ppll{};
};

inline StateGradient unpack_gradient(const Dual<kStateDim>& r) {
  StateGradient g;
  g.d_lambda = r.g[0];
  for (int i = 0; i < 3; ++i) g.d_lambda_i[i] = r.g[1 + i];
  g.d_lambda_ij(0, 0) = r.g[4];
  g.d_lambda_ij(1, 1) = r.g[5];
  g.d_lambda_ij(2, 2) = r.g[6];
  g.d_lambda_ij(0, 1) = 0.5 * r.g[7];
  g.d_lambda_ij(0, 2) = 0.5 * r.g[8];
  g.d_lambda_ij(1, 2) = 0.5 * r.g[9];
  for (int i = 0; i < 3; ++i) g.d_lambda_ill[i] = r.g[10 + i];
  g.d_lambda_ppll = r.g[13];
  return g;
}

/// The frame-change operator applied to a gradient at a state:
/// G_i[f] = f_lambda l_i + 2 l_ij f_j + l_ill,i tr(M) + 2 (M l_ill)_i
///          + 4 l_ppll f_w,i.
inline Vec3d galilean_from_gradient(const StateGradient& g, const MultiplierState& s) {
  const double trM = g.d_lambda_ij.trace();
  const Vec3d Lg = s.lambda_ij.apply(g.d_lambda_i);
  const Vec3d Mw = g.d_lambda_ij.apply(s.lambda_ill);
  Vec3d r;
  for (int i = 0; i < 3; ++i)
    r[i] = g.d_lambda * s.lambda_i[i] + 2.0 * Lg[i] + trM * s.lambda_ill[i] +
           2.0 * Mw[i] + 4.0 * s.lambda_ppll * g.d_lambda_ill[i];
  return r;
}

/// f must be callable on StateT<Dual<14>>.
template <class F>
Vec3d galilean_apply(F&& f, const MultiplierState& s) {
  const auto sd = seed_state14(s);
  const Dual<kStateDim> r = f(sd);
  return galilean_from_gradient(unpack_gradient(r), s);
}

template <class F>
double galilean_operator(F&& f, const MultiplierState& s, int axis) {
  return galilean_apply(std::forward<F>(f), s)[axis];
}

Vec3d galilean_residual_h(const MultiplierState& s, const ClosureSpec& spec);

/// Full 3x3 residual of the flux line: G_i[phi'_k] + h' delta_ik.
Mat3d galilean_residual_phi(const MultiplierState& s, const ClosureSpec& spec);

/// Both residual lines plus the magnitude of the largest participating term
/// (for scale-free reporting). With `tamper_q1` set, a lambda_ll dependence
/// is injected into H0 (the uniqueness negative control): h' gains
/// 8 Q1 X1 and phi'^k gains Q1 V0^k.
struct GalileanResidual {
  Vec3d h_residual{};
  Mat3d phi_residual{};
  double scale{};
};
GalileanResidual galilean_residuals(const MultiplierState& s, const ClosureSpec& spec,
                                    bool tamper_q1 = false);

/// Per-generator identity: G_i[V_r^k] + W_r X_{r+1} delta_ik with the
/// assembly weights; returns max |residual| over (i,k) for each r, and the
/// scale of the largest participating term.
struct GeneratorIdentityReport {
  std::array<double, 4> max_abs{};
  std::array<double, 4> scale{};
};
GeneratorIdentityReport generator_identity_residuals(const MultiplierState& s);

/// d phi'_k / d lambda - d h' / d lambda_k.
Vec3d compatibility_residual(const MultiplierState& s, const ClosureSpec& spec);

/// Largest |term| entering the compatibility identity, for normalization.
double compatibility_scale(const MultiplierState& s, const ClosureSpec& spec);

/// Residuals of the four X-space PDE relations for a set of four functions
/// of X1..X8, evaluated from their exact gradients at the sample point.
/// `weights` selects the classical P constants (kPCoefficients) or the corrected
/// assembly weights (kAssemblyWeights).
struct PdeResidual {
  std::array<double, 4> residual{};
  std::array<double, 4> scale{};
};
PdeResidual pde_system_residual(const std::array<std::shared_ptr<const ScalarFunction>, 4>& h,
                                std::span<const double> x_point,
                                const std::array<double, 4>& weights = kPCoefficients);

/// Same, from a raw 4x8 derivative matrix (test hook for the substitution
/// identities with freely chosen derivative values).
PdeResidual pde_residuals_from_derivs(const std::array<std::array<double, 8>, 4>& d,
                                      std::span<const double> x,
                                      const std::array<double, 4>& weights);

struct DerivedFormsReport {
  std::array<double, 3> eq13_residual{};
  std::array<double, 3> eq15_residual{};
  double eq13_scale{}, eq15_scale{};
  // |pde_1 - combination(eq13 deviations)| and |pde_2 - combination(eq15)|:
  // zero means the substitution turns the first (second) relation into an
  // identity.
  double identity_defect_1{};
  double identity_defect_2{};
};
DerivedFormsReport derived_forms_check(
    const std::array<std::shared_ptr<const ScalarFunction>, 4>& h,
    std::span<const double> x_point, const std::array<double, 4>& weights = kPCoefficients);

DerivedFormsReport derived_forms_from_derivs(const std::array<std::array<double, 8>, 4>& d,
                                             std::span<const double> x,
                                             const std::array<double, 4>& weights);

/// 5-moment subsystem state.
struct Sub5State {
  double lambda{};
  Vec3d lambda_i{};
  double lambda_ll{};
};

inline MultiplierState embed_sub5(const Sub5State& s5) {
  MultiplierState s = state_C(s5.lambda, s5.lambda_ll, 0.0);
  s.lambda_i = s5.lambda_i;
  return s;
}

/// Both blocks of the reduced frame-change conditions:
/// scalar: dh/dlambda l_i + (2/3) l_ll dh/dlambda_i for h',
/// flux:   same operator on phi'_k plus h' delta_ik.
struct SubsystemResidual {
  Vec3d h_residual{};
  Mat3d phi_residual{};
  double scale{};
};
SubsystemResidual subsystem_residual(const Sub5State& s5, const ClosureSpec& spec);

/// The three reduction facts, each with a witness state and the measured
/// numbers: (a) the X-form h' vanishes identically on the restricted
/// manifold; (b) the restricted eta5 = 16 lambda violates the restricted
/// first condition with residual exactly 16 lambda_i; (c) the scalar
/// lambda_a lambda_a - 4/3 lambda lambda_ll does not satisfy it either.
struct NoncommutativityReport {
  double fact_a_max_abs_h{};
  Vec3d fact_b_residual{};
  Vec3d fact_b_expected{};
  double fact_c_residual_norm{};
  MultiplierState fact_b_state{};
  MultiplierState fact_c_state{};
  bool pass_a{}, pass_b{}, pass_c{};
};
NoncommutativityReport noncommutativity_demo(std::uint64_t seed = 2024,
                                             int samples = 50);

}  // namespace et14
