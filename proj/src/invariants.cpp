#include "et14/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "et14/state.hpp"

namespace et14 {

std::string state_digest(const MultiplierState& s) {
  const auto x = pack(s);
  double acc = 0;
  for (int i = 0; i < kStateDim; ++i) acc += x[i] * (i + 1) * 0.618033988749895;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6e/%.6e", x[0] + x[13], acc);
  return buf;
}

namespace {

struct GradView {
  double d_lambda;
  Vec3d d_v;
  Sym3d d_L;   // full-index convention: off-diagonal slots are half the
               // stored-coordinate derivative
  Vec3d d_w;
  double d_p;
};

GradView grad_view(const Dual<kStateDim>& r) {
  GradView g;
  g.d_lambda = r.g[0];
  for (int i = 0; i < 3; ++i) g.d_v[i] = r.g[1 + i];
  g.d_L(0, 0) = r.g[4];
  g.d_L(1, 1) = r.g[5];
  g.d_L(2, 2) = r.g[6];
  g.d_L(0, 1) = 0.5 * r.g[7];
  g.d_L(0, 2) = 0.5 * r.g[8];
  g.d_L(1, 2) = 0.5 * r.g[9];
  for (int i = 0; i < 3; ++i) g.d_w[i] = r.g[10 + i];
  g.d_p = r.g[13];
  return g;
}

void accumulate(DerivativeIdentity& row, double lhs, double rhs, double scale) {
  const double abs_err = std::abs(lhs - rhs);
  row.max_abs = std::max(row.max_abs, abs_err);
  row.max_rel = std::max(row.max_rel, abs_err / std::max(scale, 1e-30));
}

}  // namespace

DerivativeIdentityReport check_derivative_identities(const MultiplierState& s) {
  const auto sd = seed_state14(s);
  const auto xd = compute_X(sd);
  const auto x = compute_X(s);
  const auto v = compute_V(s);

  DerivativeIdentityReport rep;
  static const char* kNames[16] = {
      "dX1/dlambda_k=0", "dX2/dlambda_k=0", "dX3/dlambda_k=0", "dX4/dlambda_k=0",
      "dX5/dlambda_k=2V0", "dX6/dlambda_k=2V1", "dX7/dlambda_k=2V2", "dX8/dlambda_k=2V3",
      "dX1/dlambda=0", "dX2/dlambda=0", "dX3/dlambda=0", "dX4/dlambda=0",
      "dX5/dlambda=16X1", "dX6/dlambda=2X2", "dX7/dlambda=2X3", "dX8/dlambda=2X4"};
  for (int i = 0; i < 16; ++i) rep.rows[i] = {kNames[i], 0.0, 0.0, 0.0};

  std::array<GradView, 8> g;
  for (int h = 0; h < 8; ++h) g[h] = grad_view(xd.x[h]);

  // Rows 1-4 and 5-8: lambda_k gradients.
  for (int h = 0; h < 4; ++h) {
    double scale = std::max(std::abs(x.x[h]), 1.0);
    for (int k = 0; k < 3; ++k) accumulate(rep.rows[h], g[h].d_v[k], 0.0, scale);
  }
  for (int r = 0; r < 4; ++r) {
    auto& row = rep.rows[4 + r];
    for (int k = 0; k < 3; ++k) {
      const double rhs = 2.0 * v[r][k];
      const double scale = std::max(std::abs(g[4 + r].d_v[k]), std::abs(rhs));
      accumulate(row, g[4 + r].d_v[k], rhs, std::max(scale, 1e-12 * state_scale(s)));
    }
  }

  // Rows 9-12: lambda derivatives of X1..X4 vanish.
  for (int h = 0; h < 4; ++h) {
    double scale = std::max(std::abs(x.x[h]), 1.0);
    accumulate(rep.rows[8 + h], g[h].d_lambda, 0.0, scale);
  }

  // Rows 13-16: lambda derivatives of X5..X8. The asserted right-hand sides
  // are the ones forced by the closed-form differentiation of the invariants
  // (16X1, 2X2, 2X3, 2X4); the residual against the classical alternative
  // (16X1, -2X2, -4/3 X3, -X4) is recorded in alt_rel for row 14-16.
  const double corrected[4] = {16.0 * x.x[0], 2.0 * x.x[1], 2.0 * x.x[2], 2.0 * x.x[3]};
  const double alt[4] = {16.0 * x.x[0], -2.0 * x.x[1], -(4.0 / 3.0) * x.x[2], -x.x[3]};
  for (int r = 0; r < 4; ++r) {
    auto& row = rep.rows[12 + r];
    const double lhs = g[4 + r].d_lambda;
    const double scale = std::max({std::abs(lhs), std::abs(corrected[r]), 1e-12 * state_scale(s)});
    accumulate(row, lhs, corrected[r], scale);
    row.alt_rel = std::abs(lhs - alt[r]) / std::max(scale, 1e-30);
  }
  return rep;
}

}  // namespace et14
