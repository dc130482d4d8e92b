#include "et14/frame.hpp"

#include <algorithm>
#include <cmath>

#include "et14/errors.hpp"

namespace et14 {

namespace {

double clamped_sqrt(double radicand, double scale, double tol) {
  if (radicand < -tol * std::max(scale, 1.0))
    throw InconsistentScalars("negative radicand in tensor reconstruction");
  return std::sqrt(std::max(radicand, 0.0));
}

// Rotation taking unit vector u to e_axis (Rodrigues).
Mat3d rotation_to_axis(const Vec3d& u, int axis) {
  Vec3d e{0, 0, 0};
  e[axis] = 1.0;
  const double c = dot(u, e);
  Vec3d k{u[1] * e[2] - u[2] * e[1], u[2] * e[0] - u[0] * e[2], u[0] * e[1] - u[1] * e[0]};
  const double s = norm(k);
  if (s < 1e-14) {
    if (c > 0) return mat_identity();
    Mat3d r = mat_identity();  // u == -e: rotate by pi about a perpendicular axis
    const int perp = (axis + 1) % 3;
    for (int i = 0; i < 3; ++i) r[i][i] = (i == perp) ? 1.0 : -1.0;
    return r;
  }
  for (auto& ki : k) ki /= s;
  // R = I cos + sin [k]_x + (1-cos) kk^T, angle from (c, s)
  Mat3d kx{{{0, -k[2], k[1]}, {k[2], 0, -k[0]}, {-k[1], k[0], 0}}};
  Mat3d r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r[i][j] = c * (i == j ? 1.0 : 0.0) + s * kx[i][j] + (1 - c) * k[i] * k[j];
  return r;
}

int solve4(std::array<std::array<double, 4>, 4>& a, std::array<double, 4>& b) {
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-14) return -1;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < 4; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int cc = col; cc < 4; ++cc) a[r][cc] -= f * a[col][cc];
      b[r] -= f * b[col];
    }
  }
  for (int r = 3; r >= 0; --r) {
    for (int cc = r + 1; cc < 4; ++cc) b[r] -= a[r][cc] * b[cc];
    b[r] /= a[r][r];
  }
  return 0;
}

double det3(const Vec3d& c0, const Vec3d& c1, const Vec3d& c2) {
  return c0[0] * (c1[1] * c2[2] - c1[2] * c2[1]) -
         c1[0] * (c0[1] * c2[2] - c0[2] * c2[1]) +
         c2[0] * (c0[1] * c1[2] - c0[2] * c1[1]);
}

double det4(const std::array<std::array<double, 4>, 4>& m) {
  auto a = m;
  double det = 1.0;
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (int r = col + 1; r < 4; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int cc = col; cc < 4; ++cc) a[r][cc] -= f * a[col][cc];
    }
  }
  return det;
}

}  // namespace

const char* frame_case_name(FrameCase c) {
  switch (c) {
    case FrameCase::kGeneric: return "generic";
    case FrameCase::kAxial: return "axial";
    case FrameCase::kDegenerate: return "degenerate";
  }
  return "?";
}

S1Set s1_from_state(const MultiplierState& s) {
  const auto b = compute_X(s);
  S1Set r;
  r.q1 = b.q1;
  r.q2 = b.q2;
  r.q3 = b.q3;
  r.ww = b.aux.ww;
  r.wLw = b.aux.wLw;
  r.wL2w = b.aux.wL2w;
  r.wL3w_transient = b.aux.wL3w;
  r.x5 = b.x[4];
  r.x6 = b.x[5];
  r.x7 = b.x[6];
  r.x8 = b.x[7];
  r.ppll = s.lambda_ppll;
  return r;
}

double det_from_power_sums(double q1, double q2, double q3) {
  return (q1 * q1 * q1 - 3.0 * q1 * q2 + 2.0 * q3) / 6.0;
}

double hamilton_cayley_wL3w(const S1Set& s1) {
  // L^3 = q1 L^2 - (q1^2 - q2)/2 L + det(L) I
  const double e2 = 0.5 * (s1.q1 * s1.q1 - s1.q2);
  return s1.q1 * s1.wL2w - e2 * s1.wLw + det_from_power_sums(s1.q1, s1.q2, s1.q3) * s1.ww;
}

Vec3d sym3_eigenvalues(const Sym3d& m) {
  // Closed form for symmetric 3x3 (trigonometric), descending order.
  const double q = m.trace() / 3.0;
  Sym3d b = m;
  b.a[0] -= q;
  b.a[1] -= q;
  b.a[2] -= q;
  const double p2 = b.a[0] * b.a[0] + b.a[1] * b.a[1] + b.a[2] * b.a[2] +
                    2.0 * (b.a[3] * b.a[3] + b.a[4] * b.a[4] + b.a[5] * b.a[5]);
  const double p = std::sqrt(p2 / 6.0);
  if (p < 1e-300) return {q, q, q};
  double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  double r = detb / (2.0 * p * p * p);
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  Vec3d out{e1, e2, e3};
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

CanonicalFrame canonicalize(const MultiplierState& s, double eps2) {
  const double scale = state_scale(s);
  CanonicalFrame f;
  const double wn = norm(s.lambda_ill);

  if (wn <= eps2 * scale) {
    // Degenerate: diagonalize lambda_ij, eigenvalues descending.
    const Vec3d ev = sym3_eigenvalues(s.lambda_ij);
    // Build the rotation by Jacobi sweeps so the rotated tensor is diagonal
    // with the descending order.
    Mat3d r = mat_identity();
    Sym3d a = s.lambda_ij;
    for (int sweep = 0; sweep < 32; ++sweep) {
      double off = std::abs(a(0, 1)) + std::abs(a(0, 2)) + std::abs(a(1, 2));
      if (off < 1e-15 * std::max(scale, 1.0)) break;
      for (int pi = 0; pi < 3; ++pi)
        for (int qi = pi + 1; qi < 3; ++qi) {
          if (std::abs(a(pi, qi)) < 1e-300) continue;
          const double theta = 0.5 * std::atan2(2.0 * a(pi, qi), a(pi, pi) - a(qi, qi));
          Mat3d g = mat_identity();
          g[pi][pi] = std::cos(theta);
          g[qi][qi] = std::cos(theta);
          g[pi][qi] = std::sin(theta);
          g[qi][pi] = -std::sin(theta);
          a = rotate_sym(g, a);
          r = mat_mul(g, r);
        }
    }
    // Sort diagonal descending with axis permutations (rotations).
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (a(j, j) > a(i, i)) {
          const int k = 3 - i - j;
          Mat3d g = axis_rotation(k, M_PI / 2.0);
          a = rotate_sym(g, a);
          r = mat_mul(g, r);
        }
    (void)ev;
    f.rotation = r;
    f.canonical = rotate_state(r, s);
    f.case_tag = FrameCase::kDegenerate;
    return f;
  }

  Vec3d u = s.lambda_ill;
  for (auto& c : u) c /= wn;
  Mat3d r1 = rotation_to_axis(u, 0);
  MultiplierState t = rotate_state(r1, s);

  // Rotate about axis 1 to null lambda_13 and make lambda_12 >= 0.
  const double l12 = t.lambda_ij(0, 1), l13 = t.lambda_ij(0, 2);
  Mat3d r = r1;
  if (std::hypot(l12, l13) > 0) {
    const double theta = std::atan2(l13, l12);
    // Rotating axes 2,3 by theta sends (l12,l13) -> (hypot, 0).
    Mat3d r2 = axis_rotation(0, -theta);
    t = rotate_state(r2, t);
    r = mat_mul(r2, r);
  }

  if (t.lambda_ij(0, 1) > eps2 * scale) {
    f.case_tag = FrameCase::kGeneric;
  } else {
    // Axial: additionally null lambda_23 by a rotation about axis 1,
    // ordering lambda_22 >= lambda_33.
    const double a22 = t.lambda_ij(1, 1), a33 = t.lambda_ij(2, 2), a23 = t.lambda_ij(1, 2);
    if (std::abs(a23) > 0) {
      const double theta = -0.5 * std::atan2(2.0 * a23, a22 - a33);
      const Mat3d r3 = axis_rotation(0, theta);
      t = rotate_state(r3, t);
      r = mat_mul(r3, r);
    }
    if (t.lambda_ij(1, 1) < t.lambda_ij(2, 2)) {
      Mat3d r4 = axis_rotation(0, M_PI / 2.0);
      t = rotate_state(r4, t);
      r = mat_mul(r4, r);
    }
    f.case_tag = FrameCase::kAxial;
  }
  f.rotation = r;
  f.canonical = t;
  return f;
}

ReconstructedTensors reconstruct_tensors(const S1Set& s1, FrameCase case_tag, double tol) {
  ReconstructedTensors out;
  out.case_tag = case_tag;
  const double scale = std::max({std::abs(s1.q1), std::sqrt(std::abs(s1.q2)), std::sqrt(s1.ww), 1.0});

  if (case_tag == FrameCase::kDegenerate) {
    // Eigenvalues from the three power sums via the characteristic cubic.
    const double e1 = s1.q1;
    const double e2 = 0.5 * (s1.q1 * s1.q1 - s1.q2);
    const double e3 = det_from_power_sums(s1.q1, s1.q2, s1.q3);
    // Roots of t^3 - e1 t^2 + e2 t - e3.
    Sym3d companion = Sym3d::diag(0, 0, 0);
    (void)companion;
    // Reuse the symmetric eigenvalue solver on a matrix with these invariants:
    // the diagonal matrix is unknown, so solve the cubic directly.
    const double a = -e1, b = e2, c = -e3;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    double roots[3];
    const double disc = -4.0 * p * p * p - 27.0 * q * q;
    if (disc < -1e-9 * std::pow(scale, 6))
      throw InconsistentScalars("complex eigenvalues from power sums");
    const double m = 2.0 * std::sqrt(std::max(-p / 3.0, 0.0));
    if (m < 1e-300) {
      roots[0] = roots[1] = roots[2] = -a / 3.0;
    } else {
      double arg = 3.0 * q / (p * m);
      arg = std::clamp(arg, -1.0, 1.0);
      const double phi = std::acos(arg) / 3.0;
      for (int k = 0; k < 3; ++k)
        roots[k] = m * std::cos(phi - 2.0 * M_PI * k / 3.0) - a / 3.0;
    }
    std::sort(roots, roots + 3, std::greater<double>());
    out.lambda_ij = Sym3d::diag(roots[0], roots[1], roots[2]);
    out.lambda_ill = {0, 0, 0};
    return out;
  }

  const double w1 = clamped_sqrt(s1.ww, scale * scale, tol);
  if (w1 <= 0) throw InconsistentScalars("lambda_1ll = 0 outside the degenerate case");
  out.lambda_ill = {w1, 0, 0};
  const double l11 = s1.wLw / s1.ww;

  if (case_tag == FrameCase::kAxial) {
    const double sum = s1.q1 - l11;
    const double sq = s1.q2 - l11 * l11;
    // lambda_22 + lambda_33 = sum, lambda_22^2 + lambda_33^2 = sq.
    const double prod = 0.5 * (sum * sum - sq);
    const double disc = sum * sum - 4.0 * prod;
    const double root = clamped_sqrt(disc, scale * scale, tol);
    const double l22 = 0.5 * (sum + root);
    const double l33 = 0.5 * (sum - root);
    out.lambda_ij = Sym3d::diag(l11, l22, l33);
    return out;
  }

  // Generic case.
  const double l12 = clamped_sqrt(s1.wL2w / s1.ww - l11 * l11, scale * scale, tol);
  const double wl3w = hamilton_cayley_wL3w(s1);
  if (l12 * l12 < tol * scale * scale)
    throw InconsistentScalars("lambda_12 = 0 in the generic case");
  const double l22 = (wl3w / s1.ww - l11 * l11 * l11 - 2.0 * l11 * l12 * l12) / (l12 * l12);
  const double l33 = s1.q1 - l11 - l22;
  const double l23sq = 0.5 * (s1.q2 - l11 * l11 - l22 * l22 - l33 * l33 - 2.0 * l12 * l12);
  const double l23 = clamped_sqrt(l23sq, scale * scale, tol);  // + branch
  Sym3d L = Sym3d::diag(l11, l22, l33);
  L(0, 1) = l12;
  L(1, 2) = l23;
  out.lambda_ij = L;
  out.lambda23_branch_positive = true;
  return out;
}

VectorRecovery reconstruct_lambda_vector(const S1Set& s1, const Sym3d& lambda_ij,
                                         const Vec3d& lambda_ill, double lambda_ppll,
                                         double guess_lambda, Vec3d guess_lambda_i,
                                         int max_iter, double step_tol) {
  MultiplierState s;
  s.lambda_ij = lambda_ij;
  s.lambda_ill = lambda_ill;
  s.lambda_ppll = lambda_ppll;
  s.lambda = guess_lambda;
  s.lambda_i = guess_lambda_i;

  const std::array<double, 4> target{s1.x5, s1.x6, s1.x7, s1.x8};
  VectorRecovery out;
  for (int it = 0; it < max_iter; ++it) {
    const auto xb = compute_X(s);
    const auto v = compute_V(s);
    std::array<std::array<double, 4>, 4> jac{};
    std::array<double, 4> rhs{};
    for (int r = 0; r < 4; ++r) {
      jac[r][0] = 2.0 * (r == 0 ? 8.0 * xb.x[0] : xb.x[r]);
      for (int k = 0; k < 3; ++k) jac[r][1 + k] = 2.0 * v[r][k];
      rhs[r] = target[r] - xb.x[4 + r];
    }
    if (solve4(jac, rhs) != 0) throw SingularJacobian();
    s.lambda += rhs[0];
    for (int k = 0; k < 3; ++k) s.lambda_i[k] += rhs[1 + k];
    const double step =
        std::sqrt(rhs[0] * rhs[0] + rhs[1] * rhs[1] + rhs[2] * rhs[2] + rhs[3] * rhs[3]);
    out.iterations = it + 1;
    if (step <= step_tol) {
      out.lambda = s.lambda;
      out.lambda_i = s.lambda_i;
      return out;
    }
  }
  throw NoConvergence("Newton did not converge");
}

IndependenceReport independence_conditions(const MultiplierState& s, double rel_tol) {
  IndependenceReport r;
  const Sym3d& L = s.lambda_ij;
  const Vec3d& w = s.lambda_ill;
  const Vec3d Lw = L.apply(w);
  const Vec3d L2w = sym_product(L, L).apply(w);
  r.det1 = det3(w, Lw, L2w);
  r.det1_threshold = rel_tol * std::max(norm(w) * norm(Lw) * norm(L2w), 1e-300);
  r.cond1 = std::abs(r.det1) > r.det1_threshold;

  const auto xb = compute_X(s);
  const auto v = compute_V(s);
  std::array<std::array<double, 4>, 4> m{};
  double norm_prod = 1.0;
  for (int row = 0; row < 4; ++row) {
    m[row][0] = row == 0 ? 8.0 * xb.x[0] : xb.x[row];
    for (int k = 0; k < 3; ++k) m[row][1 + k] = v[row][k];
    double rn = 0;
    for (int c = 0; c < 4; ++c) rn += m[row][c] * m[row][c];
    norm_prod *= std::sqrt(rn);
  }
  r.det2 = det4(m);
  r.det2_threshold = rel_tol * std::max(norm_prod, 1e-300);
  r.cond2 = std::abs(r.det2) > r.det2_threshold;
  return r;
}

MultiplierState frame_round_trip(const MultiplierState& s, int* newton_iters) {
  const CanonicalFrame f = canonicalize(s);
  const S1Set s1 = s1_from_state(f.canonical);
  const ReconstructedTensors t = reconstruct_tensors(s1, f.case_tag);
  const VectorRecovery v = reconstruct_lambda_vector(s1, t.lambda_ij, t.lambda_ill, s1.ppll);
  if (newton_iters) *newton_iters = v.iterations;
  MultiplierState out;
  out.lambda = v.lambda;
  out.lambda_i = v.lambda_i;
  out.lambda_ij = t.lambda_ij;
  out.lambda_ill = t.lambda_ill;
  out.lambda_ppll = s1.ppll;
  return out;
}

}  // namespace et14
