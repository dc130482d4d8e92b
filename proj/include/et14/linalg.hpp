#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace et14 {

template <class T>
using Vec3 = std::array<T, 3>;

using Vec3d = Vec3<double>;
using Mat3d = std::array<std::array<double, 3>, 3>;

template <class T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <class T>
Vec3<T> operator+(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
template <class T>
Vec3<T> operator-(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
template <class T, class S>
Vec3<T> operator*(const S& s, const Vec3<T>& a) {
  return {T(s) * a[0], T(s) * a[1], T(s) * a[2]};
}

inline double norm(const Vec3d& a) { return std::sqrt(dot(a, a)); }

/// Symmetric 3x3 stored as 6 independent entries, order (11,22,33,12,13,23).
template <class T>
struct Sym3 {
  std::array<T, 6> a{};

  static constexpr int kIndex[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};

  T& operator()(int i, int j) { return a[kIndex[i][j]]; }
  const T& operator()(int i, int j) const { return a[kIndex[i][j]]; }

  static Sym3 diag(const T& x, const T& y, const T& z) {
    Sym3 m;
    m.a[0] = x;
    m.a[1] = y;
    m.a[2] = z;
    return m;
  }

  T trace() const { return a[0] + a[1] + a[2]; }

  Vec3<T> apply(const Vec3<T>& v) const {
    Vec3<T> r;
    for (int i = 0; i < 3; ++i)
      r[i] = (*this)(i, 0) * v[0] + (*this)(i, 1) * v[1] + (*this)(i, 2) * v[2];
    return r;
  }
};

using Sym3d = Sym3<double>;

/// Product of two commuting symmetric matrices (powers of one matrix).
template <class T>
Sym3<T> sym_product(const Sym3<T>& x, const Sym3<T>& y) {
  Sym3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j) + x(i, 2) * y(2, j);
  return r;
}

template <class T>
Sym3<T> operator+(const Sym3<T>& x, const Sym3<T>& y) {
  Sym3<T> r;
  for (int k = 0; k < 6; ++k) r.a[k] = x.a[k] + y.a[k];
  return r;
}

inline Mat3d mat_identity() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

inline Mat3d mat_mul(const Mat3d& a, const Mat3d& b) {
  Mat3d r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      r[i][j] = s;
    }
  return r;
}

inline Vec3d mat_apply(const Mat3d& r, const Vec3d& v) {
  Vec3d out{};
  for (int i = 0; i < 3; ++i)
    out[i] = r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
  return out;
}

inline Mat3d mat_transpose(const Mat3d& m) {
  Mat3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = m[j][i];
  return r;
}

/// R * S * R^T for symmetric S.
inline Sym3d rotate_sym(const Mat3d& r, const Sym3d& s) {
  Mat3d full{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) full[i][j] = s(i, j);
  Mat3d t = mat_mul(mat_mul(r, full), mat_transpose(r));
  Sym3d out;
  out(0, 0) = t[0][0];
  out(1, 1) = t[1][1];
  out(2, 2) = t[2][2];
  out(0, 1) = 0.5 * (t[0][1] + t[1][0]);
  out(0, 2) = 0.5 * (t[0][2] + t[2][0]);
  out(1, 2) = 0.5 * (t[1][2] + t[2][1]);
  return out;
}

/// Rotation about coordinate axis (0,1,2) by angle theta.
inline Mat3d axis_rotation(int axis, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3d r = mat_identity();
  const int u = (axis + 1) % 3, w = (axis + 2) % 3;
  r[u][u] = c;
  r[u][w] = -s;
  r[w][u] = s;
  r[w][w] = c;
  return r;
}

inline double max_abs_orthogonality_defect(const Mat3d& r) {
  Mat3d p = mat_mul(r, mat_transpose(r));
  double m = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(p[i][j] - (i == j ? 1.0 : 0.0)));
  return m;
}

}  // namespace et14
