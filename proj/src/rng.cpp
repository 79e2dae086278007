#include "plankforge/rng.hpp"

#include <cmath>
#include <numbers>

namespace plankforge {

double standard_normal(SplitMix64& gen) noexcept {
  // 1 - U lies in (0, 1], so the logarithm is finite.
  const double u1 = 1.0 - gen.uniform();
  const double u2 = gen.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace plankforge
