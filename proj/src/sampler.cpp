#include "et14/sampler.hpp"

#include <cmath>

#include "et14/errors.hpp"
#include "et14/frame.hpp"

namespace et14 {

namespace {

MultiplierState draw(const SamplerConfig& c, Rng& rng) {
  MultiplierState s;
  s.lambda = rng.uniform(c.lambda_range.first, c.lambda_range.second);
  for (int i = 0; i < 3; ++i)
    s.lambda_i[i] = rng.uniform(c.lambda_i_range.first, c.lambda_i_range.second);
  for (int i = 0; i < 6; ++i)
    s.lambda_ij.a[i] = rng.uniform(c.lambda_ij_range.first, c.lambda_ij_range.second);
  for (int i = 0; i < 3; ++i)
    s.lambda_ill[i] = rng.uniform(c.lambda_ill_range.first, c.lambda_ill_range.second);
  s.lambda_ppll = rng.uniform(c.lambda_ppll_range.first, c.lambda_ppll_range.second);
  if (c.require_x1_nonzero) {
    int guard = 0;
    while (std::abs(s.lambda_ppll) < c.eps1 && guard++ < 1000)
      s.lambda_ppll = rng.uniform(c.lambda_ppll_range.first, c.lambda_ppll_range.second);
  }
  return s;
}

}  // namespace

MultiplierState random_state(const SamplerConfig& config, std::uint64_t seed) {
  Rng rng(Rng::stream_seed(seed, 0x5741u));
  for (int attempt = 0; attempt < config.max_retries; ++attempt) {
    MultiplierState s = draw(config, rng);
    if (!config.require_independence) return s;
    const auto ic = independence_conditions(s, config.independence_tol);
    if (ic.cond1 && ic.cond2) return s;
  }
  throw RetriesExhausted("independence conditions not met within retry cap");
}

Mat3d random_rotation(std::uint64_t seed) {
  Rng rng(Rng::stream_seed(seed, 0x20F7u));
  // Unit quaternion from four gaussians (Box-Muller).
  double q[4];
  for (int i = 0; i < 4; i += 2) {
    const double u1 = std::max(rng.next_unit(), 1e-300);
    const double u2 = rng.next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    q[i] = r * std::cos(2.0 * M_PI * u2);
    q[i + 1] = r * std::sin(2.0 * M_PI * u2);
  }
  const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  const double w = q[0] / n, x = q[1] / n, y = q[2] / n, z = q[3] / n;
  Mat3d r;
  r[0] = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)};
  r[1] = {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)};
  r[2] = {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)};
  return r;
}

}  // namespace et14
