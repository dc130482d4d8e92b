#pragma once

#include <cstddef>
#include <vector>

#include "et14/invariants.hpp"
#include "et14/state.hpp"

namespace et14::batch {

/// Structure-of-arrays layout for a sweep of states: 14 parallel columns.
struct StateSoA {
  std::vector<double> col[kStateDim];

  std::size_t size() const { return col[0].size(); }
  void push_back(const MultiplierState& s) {
    const auto x = pack(s);
    for (int i = 0; i < kStateDim; ++i) col[i].push_back(x[i]);
  }
  MultiplierState state(std::size_t j) const {
    std::array<double, kStateDim> x;
    for (int i = 0; i < kStateDim; ++i) x[i] = col[i][j];
    return unpack(x);
  }
};

struct XBundleSoA {
  std::vector<double> x[8];
  std::vector<double> q1, q2, q3;

  void resize(std::size_t n) {
    for (auto& c : x) c.assign(n, 0.0);
    q1.assign(n, 0.0);
    q2.assign(n, 0.0);
    q3.assign(n, 0.0);
  }
};

enum class Kernel { kAuto, kScalar, kAvx2 };

/// Evaluates the X-invariant kernel over the whole sweep. The scalar path
/// runs the reference kernel state by state; the AVX2 path instantiates the
/// same templated kernel with a SIMD pack and is selected at runtime when the
/// CPU supports it.
void compute_x_sweep(const StateSoA& states, XBundleSoA& out, Kernel kernel = Kernel::kAuto);

/// Name of the kernel the given request would dispatch to on this machine.
const char* active_kernel_name(Kernel kernel = Kernel::kAuto);

bool cpu_has_avx2();

// Internal: implemented in the AVX2 translation unit.
void compute_x_sweep_avx2(const StateSoA& states, XBundleSoA& out);

}  // namespace et14::batch
