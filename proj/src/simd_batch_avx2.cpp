// AVX2 instantiation of the X-invariant kernel: the same templated reference
// code evaluated on four-lane packs. Compiled with -mavx2 and dispatched at
// runtime; results are checked lane-exact against the scalar path.
#include <experimental/simd>

#include "et14/simd_batch.hpp"

namespace et14::batch {

namespace {

namespace stdx = std::experimental;
using pack = stdx::fixed_size_simd<double, 4>;

StateT<pack> load_state(const StateSoA& s, std::size_t j) {
  StateT<pack> out;
  const auto ld = [&](int col) {
    return pack([&](std::size_t lane) { return s.col[col][j + lane]; });
  };
  out.lambda = ld(0);
  for (int i = 0; i < 3; ++i) out.lambda_i[i] = ld(1 + i);
  for (int i = 0; i < 6; ++i) out.lambda_ij.a[i] = ld(4 + i);
  for (int i = 0; i < 3; ++i) out.lambda_ill[i] = ld(10 + i);
  out.lambda_ppll = ld(13);
  return out;
}

void store(std::vector<double>& dst, std::size_t j, const pack& v) {
  for (std::size_t lane = 0; lane < pack::size(); ++lane) dst[j + lane] = v[lane];
}

}  // namespace

void compute_x_sweep_avx2(const StateSoA& states, XBundleSoA& out) {
  const std::size_t n = states.size();
  out.resize(n);
  std::size_t j = 0;
  for (; j + pack::size() <= n; j += pack::size()) {
    const auto b = compute_X(load_state(states, j));
    for (int i = 0; i < 8; ++i) store(out.x[i], j, b.x[i]);
    store(out.q1, j, b.q1);
    store(out.q2, j, b.q2);
    store(out.q3, j, b.q3);
  }
  for (; j < n; ++j) {
    const auto b = compute_X(states.state(j));
    for (int i = 0; i < 8; ++i) out.x[i][j] = b.x[i];
    out.q1[j] = b.q1;
    out.q2[j] = b.q2;
    out.q3[j] = b.q3;
  }
}

}  // namespace et14::batch
