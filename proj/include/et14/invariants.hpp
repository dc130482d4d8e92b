#pragma once

#include <array>

#include "et14/dual.hpp"
#include "et14/errors.hpp"
#include "et14/state.hpp"

namespace et14 {

inline constexpr double kDefaultEps1 = 1e-6;

/// The scalar contractions every invariant is built from.
/// v = lambda_i, w = lambda_ill, L = lambda_ij.
template <class T>
struct Contractions {
  T t1{}, t2{}, t3{};               // tr L, tr L^2, tr L^3
  T ww{}, wLw{}, wL2w{}, wL3w{};    // w.w, w.Lw, w.L^2w, w.L^3w
  T vv{}, vw{}, vLv{}, vL2v{};      // v.v, v.w, v.Lv, v.L^2v
  T vLw{}, vL2w{}, vL3w{};          // v.Lw, v.L^2w, v.L^3w
};

template <class T>
Contractions<T> compute_contractions(const StateT<T>& s) {
  const Sym3<T>& L = s.lambda_ij;
  const Sym3<T> L2 = sym_product(L, L);
  const Sym3<T> L3 = sym_product(L2, L);
  const Vec3<T>& v = s.lambda_i;
  const Vec3<T>& w = s.lambda_ill;
  const Vec3<T> Lw = L.apply(w);
  const Vec3<T> L2w = L2.apply(w);
  const Vec3<T> L3w = L3.apply(w);
  const Vec3<T> Lv = L.apply(v);
  const Vec3<T> L2v = L2.apply(v);

  Contractions<T> c;
  c.t1 = L.trace();
  c.t2 = L2.trace();
  c.t3 = L3.trace();
  c.ww = dot(w, w);
  c.wLw = dot(w, Lw);
  c.wL2w = dot(w, L2w);
  c.wL3w = dot(w, L3w);
  c.vv = dot(v, v);
  c.vw = dot(v, w);
  c.vLv = dot(v, Lv);
  c.vL2v = dot(v, L2v);
  c.vLw = dot(v, Lw);
  c.vL2w = dot(v, L2w);
  c.vL3w = dot(v, L3w);
  return c;
}

template <class T>
struct XBundleT {
  std::array<T, 8> x{};
  T q1{}, q2{}, q3{};
  Contractions<T> aux{};
};

using InvariantBundle = XBundleT<double>;

template <class T>
using GeneratorVectorsT = std::array<Vec3<T>, 4>;

using GeneratorVectors = GeneratorVectorsT<double>;

template <class T>
XBundleT<T> compute_X(const StateT<T>& s) {
  const Contractions<T> c = compute_contractions(s);
  const T& p = s.lambda_ppll;
  const T& lam = s.lambda;
  const T& t1 = c.t1;
  const T& t2 = c.t2;
  const T& t3 = c.t3;

  XBundleT<T> b;
  b.aux = c;
  b.q1 = t1;
  b.q2 = t2;
  b.q3 = t3;

  b.x[0] = p;

  b.x[1] = 2.0 * c.ww - (16.0 / 5.0) * p * t1;

  b.x[2] = 8.0 * p * ((11.0 / 50.0) * t1 * t1 - 0.5 * t2) + 2.0 * c.wLw -
           (6.0 / 5.0) * t1 * c.ww;

  b.x[3] = 2.0 * c.wL2w - t2 * c.ww - (8.0 / 5.0) * t1 * c.wLw +
           (17.0 / 25.0) * t1 * t1 * c.ww +
           8.0 * p * (-(37.0 / 375.0) * t1 * t1 * t1 + (2.0 / 5.0) * t1 * t2 -
                      (1.0 / 3.0) * t3);

  b.x[4] = -(2.0 / 5.0) * t1 * t1 + 16.0 * p * lam - 4.0 * c.vw + 2.0 * t2;

  b.x[5] = 4.0 * lam * c.ww +
           8.0 * p * (-(4.0 / 5.0) * lam * t1 + 0.5 * c.vv) +
           (8.0 / 5.0) * t1 * c.vw - (4.0 / 5.0) * t1 * t2 +
           (8.0 / 75.0) * t1 * t1 * t1 - 4.0 * c.vLw + (4.0 / 3.0) * t3;

  b.x[6] = (8.0 / 15.0) * t3 * t1 - (14.0 / 25.0) * t1 * t1 * t2 +
           (46.0 / 375.0) * t1 * t1 * t1 * t1 + 4.0 * lam * c.wLw +
           2.0 * t2 * c.vw - c.vw * c.vw - (12.0 / 5.0) * lam * t1 * c.ww +
           c.vv * c.ww - 4.0 * c.vL2w -
           8.0 * p * (lam * t2 - 0.5 * c.vLv - (11.0 / 25.0) * lam * t1 * t1 +
                      (3.0 / 10.0) * t1 * c.vv) +
           (12.0 / 5.0) * t1 * c.vLw - (22.0 / 25.0) * t1 * t1 * c.vw;

  b.x[7] = -(34.0 / 25.0) * t1 * t1 * c.vLw + 2.0 * t2 * c.vLw +
           (16.0 / 5.0) * t1 * c.vL2w + (148.0 / 375.0) * t1 * t1 * t1 * c.vw -
           (8.0 / 5.0) * t1 * t2 * c.vw + (4.0 / 3.0) * t3 * c.vw -
           4.0 * c.vL3w +
           2.0 * p * (2.0 * c.vL2v - t2 * c.vv - (8.0 / 5.0) * t1 * c.vLv +
                      (17.0 / 25.0) * t1 * t1 * c.vv) +
           c.vLv * c.ww - (4.0 / 5.0) * t1 * c.vv * c.ww -
           2.0 * c.vw * c.vLw + (4.0 / 5.0) * t1 * c.vw * c.vw +
           c.vv * c.wLw + 4.0 * lam * c.wL2w - 2.0 * lam * t2 * c.ww -
           (16.0 / 5.0) * lam * t1 * c.wLw +
           (34.0 / 25.0) * lam * t1 * t1 * c.ww +
           16.0 * lam * p *
               (-(37.0 / 375.0) * t1 * t1 * t1 + (2.0 / 5.0) * t1 * t2 -
                (1.0 / 3.0) * t3) +
           (4.0 / 75.0) * t1 * t1 * t3 - (8.0 / 125.0) * t1 * t1 * t1 * t2 +
           (148.0 / 9375.0) * t1 * t1 * t1 * t1 * t1;

  return b;
}

template <class T>
GeneratorVectorsT<T> compute_V(const StateT<T>& s) {
  const Sym3<T>& L = s.lambda_ij;
  const Sym3<T> L2 = sym_product(L, L);
  const Sym3<T> L3 = sym_product(L2, L);
  const Vec3<T>& v = s.lambda_i;
  const Vec3<T>& w = s.lambda_ill;
  const T& p = s.lambda_ppll;
  const Contractions<T> c = compute_contractions(s);
  const T& t1 = c.t1;
  const T& t2 = c.t2;
  const T& t3 = c.t3;

  const Vec3<T> Lw = L.apply(w);
  const Vec3<T> L2w = L2.apply(w);
  const Vec3<T> L3w = L3.apply(w);
  const Vec3<T> Lv = L.apply(v);
  const Vec3<T> L2v = L2.apply(v);

  GeneratorVectorsT<T> V;
  for (int k = 0; k < 3; ++k) {
    V[0][k] = -2.0 * w[k];

    V[1][k] = -2.0 * Lw[k] + 4.0 * p * v[k] + (4.0 / 5.0) * t1 * w[k];

    V[2][k] = -2.0 * L2w[k] + (6.0 / 5.0) * t1 * Lw[k] + 4.0 * p * Lv[k] -
              (11.0 / 25.0) * t1 * t1 * w[k] - c.vw * w[k] + c.ww * v[k] +
              t2 * w[k] - (12.0 / 5.0) * p * t1 * v[k];

    V[3][k] = 2.0 * p *
                  (2.0 * L2v[k] - t2 * v[k] - (8.0 / 5.0) * t1 * Lv[k] +
                   (17.0 / 25.0) * t1 * t1 * v[k]) +
              Lv[k] * c.ww - (4.0 / 5.0) * t1 * c.ww * v[k] -
              (17.0 / 25.0) * t1 * t1 * Lw[k] - c.vw * Lw[k] + t2 * Lw[k] +
              (4.0 / 5.0) * t1 * c.vw * w[k] + (8.0 / 5.0) * t1 * L2w[k] +
              (74.0 / 375.0) * t1 * t1 * t1 * w[k] -
              (4.0 / 5.0) * t1 * t2 * w[k] + c.wLw * v[k] - c.vLw * w[k] +
              (2.0 / 3.0) * t3 * w[k] - 2.0 * L3w[k];
  }
  return V;
}

template <class T>
struct EtaBundleT {
  std::array<T, 8> e{};
};

using EtaBundle = EtaBundleT<double>;

/// eta-invariants from the X-bundle; requires |X1| >= eps1.
template <class T>
EtaBundleT<T> eta_from_x(const XBundleT<T>& b, double eps1 = kDefaultEps1) {
  const T& x1 = b.x[0];
  if (std::abs(value_of(x1)) < eps1) throw SingularX1("eta requires |lambda_ppll| >= eps1");
  EtaBundleT<T> e;
  const T r2 = b.x[1] / x1;
  const T r3 = b.x[2] / x1;
  const T r4 = b.x[3] / x1;
  e.e[0] = x1;
  e.e[1] = r2;
  e.e[2] = r3;
  e.e[3] = r4;
  e.e[4] = (b.x[4] + 0.5 * r3 - (3.0 / 64.0) * r2 * r2) / x1;
  e.e[5] = (b.x[5] + 0.5 * r4 - (1.0 / 16.0) * r2 * r3 + (1.0 / 512.0) * r2 * r2 * r2) / x1;
  e.e[6] = (b.x[6] - (1.0 / 16.0) * r2 * r4 + (1.0 / 512.0) * r3 * r2 * r2) / x1;
  e.e[7] = (b.x[7] + (1.0 / 512.0) * r4 * r2 * r2) / x1;
  return e;
}

template <class T>
EtaBundleT<T> compute_eta(const StateT<T>& s, double eps1 = kDefaultEps1) {
  return eta_from_x(compute_X(s), eps1);
}

template <class T>
struct YZBundleT {
  T y5{}, y6{}, y7{}, y8{};
  T z5{}, z7{}, z8{};
};

using YZBundle = YZBundleT<double>;

/// The classical substitution variables (Y from the psi-branch, Z from the
/// phi-branch); pure algebra in the X-invariants.
template <class T>
YZBundleT<T> compute_YZ(const XBundleT<T>& b) {
  const auto& x = b.x;
  YZBundleT<T> r;
  r.y5 = x[4];
  r.y6 = x[0] * x[5] + (1.0 / 8.0) * x[1] * x[4];
  r.y7 = x[0] * x[6] + (1.0 / 12.0) * x[2] * x[4];
  r.y8 = x[0] * x[7] + (1.0 / 16.0) * x[3] * x[4];
  r.z5 = x[1] * x[4] + 8.0 * x[0] * x[5];
  r.z7 = x[1] * x[6] - (2.0 / 3.0) * x[2] * x[5];
  r.z8 = x[1] * x[7] - (1.0 / 2.0) * x[3] * x[5];
  return r;
}

/// Which transcription of the eta2-term in the y6 route to use. The cubic
/// term is the one consistent with the direct X-route; the quadratic variant
/// is kept as a negative control for the route-consistency test.
enum class Y6EtaTerm { kCubic, kQuadraticVariant };

/// Y5..Y8 recovered from the eta-invariants alone.
template <class T>
std::array<T, 4> compute_Y_from_eta(const EtaBundleT<T>& eb,
                                    Y6EtaTerm term = Y6EtaTerm::kCubic) {
  const auto& e = eb.e;
  const T& e1 = e[0];
  std::array<T, 4> y;
  y[0] = e1 * e[4] - 0.5 * e[2] + (3.0 / 64.0) * e[1] * e[1];
  const T tail = term == Y6EtaTerm::kCubic
                     ? T((1.0 / 256.0) * e[1] * e[1] * e[1])
                     : T((1.0 / 256.0) * e[1] * e[1]);
  y[1] = e1 * (e1 * e[5] - 0.5 * e[3] + (1.0 / 8.0) * e1 * e[1] * e[4] + tail);
  y[2] = e1 * (e1 * e[6] + (1.0 / 16.0) * e[1] * e[3] +
               (1.0 / 512.0) * e[2] * e[1] * e[1] + (1.0 / 12.0) * e1 * e[2] * e[4] -
               (1.0 / 24.0) * e[2] * e[2]);
  y[3] = e1 * (e1 * e[7] + (1.0 / 16.0) * e1 * e[3] * e[4] +
               (1.0 / 1024.0) * e[3] * e[1] * e[1] - (1.0 / 32.0) * e[2] * e[3]);
  return y;
}

/// One row of the derivative-identity report.
struct DerivativeIdentity {
  const char* name;
  double max_abs;     // |lhs - rhs|, worst component
  double max_rel;     // normalized by the largest term magnitude
  double alt_rel; // residual of the classical rows 14-16 variant
};

struct DerivativeIdentityReport {
  std::array<DerivativeIdentity, 16> rows{};
  double max_rel() const {
    double m = 0;
    for (const auto& r : rows) m = std::max(m, r.max_rel);
    return m;
  }
};

/// Checks the sixteen gradient identities linking X5..X8 to the generator
/// vectors and to X1..X4. Rows 14-16 assert the algebraically forced values
/// (+2 X2, +2 X3, +2 X4); the residual of the classical variant
/// (-2 X2, -4/3 X3, -X4) is reported alongside.
DerivativeIdentityReport check_derivative_identities(const MultiplierState& s);

}  // namespace et14
