#include "et14/simd_batch.hpp"

namespace et14::batch {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

void compute_x_sweep_scalar(const StateSoA& states, XBundleSoA& out) {
  const std::size_t n = states.size();
  out.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto b = compute_X(states.state(j));
    for (int i = 0; i < 8; ++i) out.x[i][j] = b.x[i];
    out.q1[j] = b.q1;
    out.q2[j] = b.q2;
    out.q3[j] = b.q3;
  }
}

Kernel resolve(Kernel k) {
  if (k == Kernel::kAuto) return cpu_has_avx2() ? Kernel::kAvx2 : Kernel::kScalar;
  return k;
}

}  // namespace

const char* active_kernel_name(Kernel kernel) {
  return resolve(kernel) == Kernel::kAvx2 ? "avx2" : "scalar";
}

void compute_x_sweep(const StateSoA& states, XBundleSoA& out, Kernel kernel) {
  if (resolve(kernel) == Kernel::kAvx2)
    compute_x_sweep_avx2(states, out);
  else
    compute_x_sweep_scalar(states, out);
}

}  // namespace et14::batch
