#pragma once

#include <array>

#include "et14/state.hpp"

// Brute-force contraction oracle: a second, independent transcription of the
// invariant and generator formulas using full 3x3 arrays and explicit index
// loops. No helpers are shared with the library kernels.
namespace et14::oracle {

struct XOracle {
  std::array<double, 8> x{};
};

XOracle compute_x(const MultiplierState& s);
std::array<std::array<double, 3>, 4> compute_v(const MultiplierState& s);

// Central finite differences over the 14 packed coordinates.
std::array<double, kStateDim> fd_gradient(double (*f)(const MultiplierState&, const void*),
                                          const void* ctx, const MultiplierState& s,
                                          double step);

}  // namespace et14::oracle
