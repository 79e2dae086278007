#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plankforge/space.hpp"
#include "plankforge/summability.hpp"

namespace plankforge {

enum class Divergence { divergent, convergent };

std::string to_string(Divergence d);

/// Prescribed norms a_n > 0.
///
///   power(c, alpha):      a_n = c * n^alpha
///   powerlog(alpha, beta): a_n = n^alpha * ln(n + 1)^beta
///   explicit:             a finite list (no divergence certificate)
class NormFamily {
 public:
  enum class Kind { power, powerlog, explicit_list };

  static NormFamily power(double c, double alpha);
  static NormFamily powerlog(double alpha, double beta);
  static NormFamily explicit_values(std::vector<double> values);
  /// `power:c:alpha`, `powerlog:alpha:beta` or `explicit:@file.csv`.
  static NormFamily parse(std::string_view descriptor);

  Kind kind() const noexcept { return kind_; }
  double value(std::size_t n) const;
  /// Analytic verdict for sum_n a_n^{-q}; throws NoCertificate for explicit lists.
  Divergence divergence(double q) const;
  /// Upper bound on sum_{n > N} a_n^{-q} from the integral test, when one is available.
  std::optional<double> tail_bound(double q, std::size_t N) const;
  /// Largest n for which value(n) is defined (max size_t for parametric families).
  std::size_t max_index() const noexcept;
  std::string descriptor() const;

 private:
  Kind kind_ = Kind::power;
  double first_ = 1.0;   // c or alpha
  double second_ = 0.0;  // alpha or beta
  std::vector<double> values_;
  std::string source_;
};

/// sum_{n <= N} a_n^{-q}, summed in increasing n.
double partial_sum(const NormFamily& fam, double q, std::size_t N);

/// Conjugate exponents 1/p + 1/p' = 1 with p in [2, inf].
struct ExponentPair {
  double p = 2.0;
  double p_prime = 2.0;

  static ExponentPair from_p(double p);
  static ExponentPair from_p_prime(double p_prime);
};

/// x_n = a_n e_n in a Euclidean model, optionally followed by a seeded rotation.
std::vector<Vector> main_theorem_sequence(const SpaceModel& space, const NormFamily& fam,
                                          std::size_t N,
                                          std::optional<std::uint64_t> rotation_seed = {});
/// Same, with a caller-supplied rotation.
std::vector<Vector> main_theorem_sequence(const SpaceModel& space, const NormFamily& fam,
                                          std::size_t N, const Rotation& rotation);

/// p_{n,m} = a_m^{-2} / sum_{j <= n} a_j^{-2} for m <= n.
WeightMatrix main_theorem_weights(const NormFamily& fam, std::size_t N);

/// Blocks (n_k, n_{k+1}] with sums S_k = sum_{j in block k} a_j^{-p'}.
struct BlockPartition {
  std::vector<std::size_t> boundaries;  // n_1 = 0 < n_2 < ... < n_{K+1}
  std::vector<double> sums;             // S_1..S_K
  double p_prime = 2.0;

  std::size_t blocks() const noexcept { return sums.size(); }
  std::size_t horizon() const noexcept { return boundaries.empty() ? 0 : boundaries.back(); }
  /// 1-based block containing index m.
  std::size_t block_of(std::size_t m) const;

  /// Builds a partition from explicit boundaries, recomputing the sums.
  static BlockPartition from_boundaries(const NormFamily& fam, double p_prime,
                                        std::vector<std::size_t> boundaries);
  /// Throws InvalidInput when boundaries are not strictly increasing from 0 or
  /// when a recorded sum differs from recomputation by more than 1e-12.
  void verify(const NormFamily& fam) const;
};

/// Greedy partition with S_k >= growth_target * k. Blocks after the first are
/// also extended until S_k >= S_1, so S_K >= S_1 always holds. Requires a
/// divergent certificate for sum a_n^{-p'}.
BlockPartition block_partition(const NormFamily& fam, double p_prime, std::size_t blocks,
                               double growth_target, std::size_t horizon_cap = 10'000'000);

/// p_{k,m} = a_m^{-p'} / S_k on block k and 0 elsewhere.
WeightMatrix block_weights(const NormFamily& fam, const BlockPartition& part);

struct PerturbationOptions {
  double amplitude = 0.01;
  std::uint64_t seed = 0;
  std::size_t samples_per_block = 100;
  std::size_t max_retries = 10;
};

/// Unit vectors e_1..e_{n_K} of an lp model grouped by a partition.
struct BlockBasis {
  SpaceModel space;
  std::vector<Vector> vectors;
  bool perturbed = false;
  /// Largest |‖sum b_j e_j‖ / ‖b‖_p - 1| over the sampled in-block coefficients.
  double measured_distortion = 0.0;
  std::size_t attempts = 1;

  /// Constant C in sum_m p_{k,m} |f(x_m)|^{p'} <= C ‖f‖^{p'} / S_k.
  double transform_constant() const noexcept { return perturbed ? 2.0 : 1.0; }
};

/// Canonical basis of lp(p, N). Zero distortion.
BlockBasis block_basis(const SpaceModel& space, const BlockPartition& part);
/// Seeded in-block coordinate noise, renormalized; retried until the measured
/// distortion is below 1/8.
BlockBasis block_basis(const SpaceModel& space, const BlockPartition& part,
                       const PerturbationOptions& perturbation);

/// Measured distortion of `vectors` on seeded in-block coefficient vectors.
double measure_block_distortion(const BlockBasis& basis, const BlockPartition& part,
                                std::uint64_t seed, std::size_t samples_per_block);

/// One evaluated inequality lhs <= rhs.
struct TransformBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 1.0;
  /// lhs * S / ‖f‖^{p'}: the smallest constant that would still make the bound hold.
  double measured_constant = 0.0;
  bool holds = true;
};

/// Block transform bound sum_m p_{k,m}|f(x_m)|^{p'} <= C ‖f‖^{p'} / S_k with
/// x_m = a_m e_m. Throws InvariantViolation if it fails.
TransformBound wpp_transform_bound(const BlockBasis& basis, const NormFamily& fam,
                                   const BlockPartition& part, const Functional& f,
                                   std::size_t k);

/// Triangular-weights bound sum_m p_{n,m} |<x_m, f>|^2 <= ‖f‖^2 / S_n for all
/// rows n = 1..N at once (S_n = partial_sum(fam, 2, n)). Does not throw; the
/// `holds` flag is evaluated with absolute slack `tol`.
std::vector<TransformBound> main_transform_bounds(const WeightMatrix& w, const NormFamily& fam,
                                                  std::span<const Vector> xs, const Functional& f,
                                                  double tol = 1e-9);

/// Finite surrogate of the weak-cluster-point extraction: some m* in the row
/// support has sum_k |f_k(x_{m*})|^{p'} <= sum_k C ‖f_k‖^{p'} / S_row.
struct ClusterWitness {
  std::size_t column = 0;
  double value = 0.0;
  double average = 0.0;
  double bound = 0.0;
  bool holds = false;
};

ClusterWitness cluster_surrogate(const WeightMatrix& w, std::span<const Vector> xs,
                                 std::span<const Functional> fs, double p_prime, std::size_t n,
                                 double row_sum, double constant);

}  // namespace plankforge
