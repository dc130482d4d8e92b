#pragma once

#include <array>

#include "et14/invariants.hpp"
#include "et14/linalg.hpp"
#include "et14/state.hpp"

namespace et14 {

/// The rotation-invariant scalar set the representation theorem reconstructs
/// from. wL3w is the transient cubic contraction eliminated through the
/// Hamilton-Cayley identity in case 1.
struct S1Set {
  double q1{}, q2{}, q3{};
  double ww{}, wLw{}, wL2w{};
  double x5{}, x6{}, x7{}, x8{};
  double ppll{};
  double wL3w_transient{};
};

S1Set s1_from_state(const MultiplierState& s);

enum class FrameCase { kGeneric, kAxial, kDegenerate };

const char* frame_case_name(FrameCase c);

struct CanonicalFrame {
  Mat3d rotation{};             // canonical = R * input * R^T (tensors), R * vec
  MultiplierState canonical{};
  FrameCase case_tag{};
};

/// Rotates the state into the frame lambda_ill ~ (w,0,0), lambda_13 = 0,
/// lambda_1ll >= 0, lambda_12 >= 0 (case-dependent relaxations).
CanonicalFrame canonicalize(const MultiplierState& s, double eps2 = 1e-8);

struct ReconstructedTensors {
  Sym3d lambda_ij{};
  Vec3d lambda_ill{};
  FrameCase case_tag{};
  bool lambda23_branch_positive = true;
};

/// Rebuilds (lambda_ij, lambda_ill) in the canonical frame from the S1
/// scalars, following the three-case procedure; the cubic contraction is
/// supplied through the Hamilton-Cayley elimination, not taken from s1.
ReconstructedTensors reconstruct_tensors(const S1Set& s1, FrameCase case_tag,
                                         double tol = 1e-9);

struct VectorRecovery {
  double lambda{};
  Vec3d lambda_i{};
  int iterations{};
};

/// Newton recovery of (lambda, lambda_k) from the X5..X8 targets with the
/// tensor part held fixed. The Jacobian column in lambda is
/// 2*(8X1, X2, X3, X4) and the lambda_k block is 2*V_r^k.
VectorRecovery reconstruct_lambda_vector(const S1Set& s1, const Sym3d& lambda_ij,
                                         const Vec3d& lambda_ill, double lambda_ppll,
                                         double guess_lambda = 0.0,
                                         Vec3d guess_lambda_i = {0, 0, 0},
                                         int max_iter = 50, double step_tol = 1e-12);

struct IndependenceReport {
  bool cond1 = false;
  bool cond2 = false;
  double det1 = 0;
  double det2 = 0;
  double det1_threshold = 0;
  double det2_threshold = 0;
};

/// Condition 1: lambda_ill, L lambda_ill, L^2 lambda_ill linearly independent.
/// Condition 2: the four 4-vectors (8X1,V0), (X2,V1), (X3,V2), (X4,V3).
IndependenceReport independence_conditions(const MultiplierState& s,
                                           double rel_tol = 1e-10);

/// Hamilton-Cayley elimination of w.L^3 w from the S1 scalars.
double hamilton_cayley_wL3w(const S1Set& s1);

/// det of L from the trace power sums (Newton identities).
double det_from_power_sums(double q1, double q2, double q3);

/// Eigenvalues of a symmetric 3x3, descending.
Vec3d sym3_eigenvalues(const Sym3d& m);

/// Full round trip: canonicalize, extract S1, rebuild tensors, Newton-recover
/// the vector part; returns the rebuilt state in the canonical frame.
MultiplierState frame_round_trip(const MultiplierState& s, int* newton_iters = nullptr);

}  // namespace et14
