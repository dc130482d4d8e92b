#pragma once

#include <array>
#include <cstddef>

namespace et14 {

/// Forward-mode scalar carrying a value and an N-dimensional tangent.
/// Constants lift implicitly with a zero tangent, so any arithmetic written
/// against double also instantiates against Dual<N>.
template <int N>
struct Dual {
  double v{0.0};
  std::array<double, N> g{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants

  static Dual seeded(double value, int slot) {
    Dual d(value);
    d.g[static_cast<std::size_t>(slot)] = 1.0;
    return d;
  }

  Dual operator-() const {
    Dual r(-v);
    for (int i = 0; i < N; ++i) r.g[i] = -g[i];
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) g[i] += o.g[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) g[i] -= o.g[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.v * b.v);
    for (int i = 0; i < N; ++i) r.g[i] = a.g[i] * b.v + b.g[i] * a.v;
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r(a.v / b.v);
    for (int i = 0; i < N; ++i) r.g[i] = (a.g[i] - r.v * b.g[i]) / b.v;
    return r;
  }
};

namespace detail {
constexpr int tri_index(int i, int j) {  // i >= j
  return i * (i + 1) / 2 + j;
}
}  // namespace detail

/// Second-order forward scalar: value, gradient and symmetric Hessian
/// (lower triangle, packed). Exact through products and quotients.
template <int N>
struct Dual2 {
  static constexpr int kHessSize = N * (N + 1) / 2;

  double v{0.0};
  std::array<double, N> g{};
  std::array<double, kHessSize> h{};

  Dual2() = default;
  Dual2(double value) : v(value) {}  // NOLINT

  static Dual2 seeded(double value, int slot) {
    Dual2 d(value);
    d.g[static_cast<std::size_t>(slot)] = 1.0;
    return d;
  }

  double hess(int i, int j) const {
    return i >= j ? h[detail::tri_index(i, j)] : h[detail::tri_index(j, i)];
  }

  Dual2 operator-() const {
    Dual2 r(-v);
    for (int i = 0; i < N; ++i) r.g[i] = -g[i];
    for (int i = 0; i < kHessSize; ++i) r.h[i] = -h[i];
    return r;
  }

  Dual2& operator+=(const Dual2& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) g[i] += o.g[i];
    for (int i = 0; i < kHessSize; ++i) h[i] += o.h[i];
    return *this;
  }
  Dual2& operator-=(const Dual2& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) g[i] -= o.g[i];
    for (int i = 0; i < kHessSize; ++i) h[i] -= o.h[i];
    return *this;
  }
  Dual2& operator*=(const Dual2& o) { return *this = *this * o; }

  friend Dual2 operator+(Dual2 a, const Dual2& b) { return a += b; }
  friend Dual2 operator-(Dual2 a, const Dual2& b) { return a -= b; }

  friend Dual2 operator*(const Dual2& a, const Dual2& b) {
    Dual2 r(a.v * b.v);
    for (int i = 0; i < N; ++i) r.g[i] = a.g[i] * b.v + b.g[i] * a.v;
    int c = 0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j <= i; ++j, ++c)
        r.h[c] = a.h[c] * b.v + b.h[c] * a.v + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    return r;
  }

  friend Dual2 operator/(const Dual2& a, const Dual2& b) {
    Dual2 r(a.v / b.v);
    for (int i = 0; i < N; ++i) r.g[i] = (a.g[i] - r.v * b.g[i]) / b.v;
    int c = 0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j <= i; ++j, ++c)
        r.h[c] = (a.h[c] - r.v * b.h[c] - r.g[i] * b.g[j] - r.g[j] * b.g[i]) / b.v;
    return r;
  }
};

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Dual<N>& x) { return x.v; }
template <int N>
double value_of(const Dual2<N>& x) { return x.v; }

}  // namespace et14
