#pragma once

#include <array>
#include <optional>
#include <vector>

#include "et14/closure.hpp"
#include "et14/state.hpp"

namespace et14 {

enum class Verdict { kPositiveDefinite, kIndefinite, kDegenerate };

const char* verdict_name(Verdict v);

/// Second-derivative matrix of h' in the stored coordinates (off-diagonal
/// lambda_ij entries stored once), plus the block data the verdict machinery
/// reads off at a C-state.
struct HessianReport {
  std::array<std::array<double, kStateDim>, kStateDim> h{};
  double symmetry_defect{};  // relative, from the second-order evaluation

  bool at_state_c = false;
  // Q1 block over (lambda, lambda_ll, lambda_ppll); Q2 per-axis pair
  // (lambda_ill scaled by lambda_ppll, lambda_i); Q3 deviatoric coefficient.
  std::array<std::array<double, 3>, 3> a{};
  double b11{}, b12{}, b22{};
  double c{};
  double max_cross_block_rel{};

  std::array<double, 6> minors{};  // a11, det2(a), det3(a), b11, det(b), c
  Verdict verdict{Verdict::kDegenerate};
  int failing_minor = -1;
  std::optional<DeltaState> counterexample;
  double counterexample_q{};
  std::array<double, kStateDim> eigenvalues{};
};

/// Exact Hessian of h' for the spec at the state (nested forward mode).
/// At a C-state the block data, minors and Sylvester verdict are filled; the
/// spectral verdict of the full matrix is always filled and cross-checked.
HessianReport hessian(const MultiplierState& s, const ClosureSpec& spec,
                      double eps1 = kDefaultEps1);

/// The quadratic form of the report along a perturbation, with the tensor
/// pairing (stored coordinates contract directly).
double quadratic_form(const HessianReport& rep, const DeltaState& d);

/// Second directional derivative of h' along d by central differences;
/// independent confirmation path for counterexample directions.
double directional_second_derivative_fd(const MultiplierState& s, const ClosureSpec& spec,
                                        const DeltaState& d, double step = 1e-4,
                                        double eps1 = kDefaultEps1);

struct CCoefficients {
  std::array<std::array<double, 3>, 3> a{};
  double b11{}, b12{}, b22{};
  double c{};
};

/// The closed-form block coefficients at a C-state for an eta-form closure:
/// first derivatives of h'(eta) at the starred values drive b11, b12, b22, c;
/// the scalar block is the exact second derivative of the composite
/// h'(eta*(lambda, lambda_ll, lambda_ppll)).
CCoefficients coefficients_at_C(const MultiplierState& state_c, const ClosureSpec& spec,
                                double pattern_tol = 1e-10);

struct VerdictReport {
  std::array<double, 6> minors{};
  Verdict verdict{};
  int failing_minor = -1;
};

VerdictReport convexity_verdict(const CCoefficients& coeffs, double tol = 1e-12);

/// Sylvester conditions in the lambda_ppll -> 0+ limit: coefficients are
/// evaluated along the documented sequence and Richardson-extrapolated;
/// throws LimitNotConverged when successive extrapolants disagree.
struct LimitVerdictReport {
  VerdictReport verdict{};
  std::array<double, 3> sequence{1e-2, 1e-3, 1e-4};
  std::array<std::array<double, 6>, 3> minors_at{};
  std::array<double, 6> extrapolated{};
};
LimitVerdictReport convexity_verdict_at_zero_ppll(double lambda, double lambda_ll,
                                                  const ClosureSpec& eta_spec,
                                                  double rel_tol = 1e-4);

/// Smallest-eigenvalue direction of an indefinite Hessian; throws
/// NotIndefinite otherwise.
DeltaState counterexample_direction(const HessianReport& rep, double* q_value = nullptr);

/// The eta-form h' as a plain function of the eight eta arguments (the
/// object the block coefficient formulas differentiate).
double hprime_of_eta(const ClosureSpec& eta_spec, std::span<const double> eta);

}  // namespace et14
