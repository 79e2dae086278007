#pragma once

// Data-parallel inner loops. Every kernel exists twice with the same
// signature: `kernels::` runs under OpenMP, `reference::` is the plain serial
// loop the parallel version is tested and benchmarked against. Results must
// agree exactly except where noted.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "plankforge/space.hpp"
#include "plankforge/summability.hpp"

namespace plankforge {

struct Plank;
struct WitnessOptions;
struct WitnessRun;

/// Result of a search over sign patterns gamma with gamma_1 = +1.
/// Bit k-2 of `pattern` set means gamma_k = -1.
struct SignSearch {
  double best_norm = 0.0;
  std::uint64_t pattern = 0;
  std::uint64_t visited = 0;
};

/// Dense row-major view of n vectors of `stride` doubles each.
struct VectorBlock {
  std::vector<double> data;
  std::size_t count = 0;
  std::size_t stride = 0;
  double p = 2.0;  // norm exponent applied to the stored values (inf for sup)

  static VectorBlock from(std::span<const Vector> xs);
  std::span<const double> row(std::size_t i) const { return {data.data() + i * stride, stride}; }
};

/// Signed sum of gamma_k x_k for a pattern index; used by both kernels and tests.
std::vector<double> signed_sum(const VectorBlock& xs, std::uint64_t pattern);
double block_norm(std::span<const double> v, double p);

/// Sign-pattern chunk size for the exhaustive search; fixed so that results
/// do not depend on the thread count.
inline constexpr std::uint64_t kSignChunk = 4096;

namespace kernels {

/// |sum_m p_{n,m} - 1| for every row.
std::vector<double> row_sum_errors(const WeightMatrix& w);
/// p_transform at every row.
std::vector<double> row_transforms(const WeightMatrix& w, const ScalarSequence& a);
/// 1 if ball sample i lies in some plank.
std::vector<std::uint8_t> coverage_flags(std::span<const Plank> planks, const SpaceModel& space,
                                         double radius, std::size_t samples, std::uint64_t seed);
/// Exhaustive max over 2^{n-1} patterns. Chunks walk patterns in Gray-code
/// order; ties go to the lowest pattern index.
SignSearch best_sign_pattern(const VectorBlock& xs);
/// Seeded random patterns (a lower bound on the exhaustive maximum).
SignSearch sampled_sign_pattern(const VectorBlock& xs, std::uint64_t samples, std::uint64_t seed);
/// Mean of ‖sum gamma_k x_k‖^2 over all 2^n patterns.
double sign_mean_square(const VectorBlock& xs);
/// Independent restarts of the witness ascent.
std::vector<WitnessRun> witness_restarts(std::span<const Vector> xs, double radius,
                                         const WitnessOptions& options, bool orthogonal);

}  // namespace kernels

namespace reference {

std::vector<double> row_sum_errors(const WeightMatrix& w);
std::vector<double> row_transforms(const WeightMatrix& w, const ScalarSequence& a);
std::vector<std::uint8_t> coverage_flags(std::span<const Plank> planks, const SpaceModel& space,
                                         double radius, std::size_t samples, std::uint64_t seed);
/// Recomputes every pattern's sum from scratch in binary order. May differ
/// from the parallel kernel in the last bits of best_norm, and in `pattern`
/// only among near-ties.
SignSearch best_sign_pattern(const VectorBlock& xs);
SignSearch sampled_sign_pattern(const VectorBlock& xs, std::uint64_t samples, std::uint64_t seed);
double sign_mean_square(const VectorBlock& xs);
std::vector<WitnessRun> witness_restarts(std::span<const Vector> xs, double radius,
                                         const WitnessOptions& options, bool orthogonal);

}  // namespace reference

/// Applies PLANKFORGE_THREADS (0 or unset = OpenMP default).
void configure_threads_from_env();

}  // namespace plankforge
