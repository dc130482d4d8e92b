#pragma once

#include <array>
#include <cmath>
#include <string>

#include "et14/dual.hpp"
#include "et14/linalg.hpp"

namespace et14 {

/// The 14 Lagrange multipliers, templated on the scalar type so the same
/// state flows through plain, dual and second-order evaluations.
/// Coordinate order for packing: lambda; lambda_i (3); lambda_ij stored as
/// (11,22,33,12,13,23); lambda_ill (3); lambda_ppll.
template <class T>
struct StateT {
  T lambda{};
  Vec3<T> lambda_i{};
  Sym3<T> lambda_ij{};
  Vec3<T> lambda_ill{};
  T lambda_ppll{};
};

using MultiplierState = StateT<double>;

/// A perturbation of the 14 coordinates; same storage as the state.
using DeltaState = StateT<double>;

constexpr int kStateDim = 14;

inline std::array<double, kStateDim> pack(const MultiplierState& s) {
  std::array<double, kStateDim> x{};
  x[0] = s.lambda;
  for (int i = 0; i < 3; ++i) x[1 + i] = s.lambda_i[i];
  for (int i = 0; i < 6; ++i) x[4 + i] = s.lambda_ij.a[i];
  for (int i = 0; i < 3; ++i) x[10 + i] = s.lambda_ill[i];
  x[13] = s.lambda_ppll;
  return x;
}

inline MultiplierState unpack(const std::array<double, kStateDim>& x) {
  MultiplierState s;
  s.lambda = x[0];
  for (int i = 0; i < 3; ++i) s.lambda_i[i] = x[1 + i];
  for (int i = 0; i < 6; ++i) s.lambda_ij.a[i] = x[4 + i];
  for (int i = 0; i < 3; ++i) s.lambda_ill[i] = x[10 + i];
  s.lambda_ppll = x[13];
  return s;
}

/// Lift to a dual state with the identity seeding of all 14 slots.
template <class D>
StateT<D> seed_state(const MultiplierState& s) {
  const auto x = pack(s);
  StateT<D> d;
  d.lambda = D::seeded(x[0], 0);
  for (int i = 0; i < 3; ++i) d.lambda_i[i] = D::seeded(x[1 + i], 1 + i);
  for (int i = 0; i < 6; ++i) d.lambda_ij.a[i] = D::seeded(x[4 + i], 4 + i);
  for (int i = 0; i < 3; ++i) d.lambda_ill[i] = D::seeded(x[10 + i], 10 + i);
  d.lambda_ppll = D::seeded(x[13], 13);
  return d;
}

inline StateT<Dual<kStateDim>> seed_state14(const MultiplierState& s) {
  return seed_state<Dual<kStateDim>>(s);
}

inline double state_scale(const MultiplierState& s) {
  double m = 0;
  for (double x : pack(s)) m = std::max(m, std::abs(x));
  return std::max(m, 1e-12);
}

/// Intermediate comparison state: lambda_i = 0, lambda_ij = ll/3 * I,
/// lambda_ill = 0.
inline MultiplierState state_C(double lambda, double lambda_ll, double lambda_ppll) {
  MultiplierState s;
  s.lambda = lambda;
  s.lambda_ij = Sym3d::diag(lambda_ll / 3.0, lambda_ll / 3.0, lambda_ll / 3.0);
  s.lambda_ppll = lambda_ppll;
  return s;
}

inline bool is_state_C(const MultiplierState& s, double tol) {
  const double third = s.lambda_ij.trace() / 3.0;
  double dev = 0;
  dev = std::max(dev, std::abs(s.lambda_ij.a[0] - third));
  dev = std::max(dev, std::abs(s.lambda_ij.a[1] - third));
  dev = std::max(dev, std::abs(s.lambda_ij.a[2] - third));
  for (int k = 3; k < 6; ++k) dev = std::max(dev, std::abs(s.lambda_ij.a[k]));
  for (int i = 0; i < 3; ++i) {
    dev = std::max(dev, std::abs(s.lambda_i[i]));
    dev = std::max(dev, std::abs(s.lambda_ill[i]));
  }
  return dev <= tol * state_scale(s);
}

/// Traceless part of a symmetric matrix.
template <class T>
Sym3<T> deviatoric(const Sym3<T>& m) {
  Sym3<T> d = m;
  const T third = m.trace() * T(1.0 / 3.0);
  d.a[0] -= third;
  d.a[1] -= third;
  d.a[2] -= third;
  return d;
}

/// Simultaneous rotation of all tensorial slots; scalars are untouched.
inline MultiplierState rotate_state(const Mat3d& r, const MultiplierState& s) {
  MultiplierState out = s;
  out.lambda_i = mat_apply(r, s.lambda_i);
  out.lambda_ill = mat_apply(r, s.lambda_ill);
  out.lambda_ij = rotate_sym(r, s.lambda_ij);
  return out;
}

inline MultiplierState add_scaled(const MultiplierState& s, const DeltaState& d, double t) {
  auto x = pack(s);
  const auto y = pack(d);
  for (int i = 0; i < kStateDim; ++i) x[i] += t * y[i];
  return unpack(x);
}

std::string state_digest(const MultiplierState& s);

}  // namespace et14
