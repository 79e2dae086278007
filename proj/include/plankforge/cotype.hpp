#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "plankforge/constructions.hpp"
#include "plankforge/space.hpp"
#include "plankforge/summability.hpp"

namespace plankforge {

/// Largest vector count handled by exhaustive sign enumeration.
inline constexpr std::size_t kMaxEnumeratedVectors = 24;

struct CotypeReport {
  /// max over signs of ‖sum gamma_k x_k‖ / (sum ‖x_k‖^p)^{1/p}
  double ratio = 0.0;
  std::vector<int> pattern;  // gamma_k in {+1, -1}, gamma_1 = +1
  std::size_t n = 0;
  double p = 2.0;
  std::uint64_t enumerated = 0;  // patterns visited
  bool lower_bound = false;      // true in sampling mode
  double best_norm = 0.0;
  double denominator = 0.0;
};

struct CotypeOptions {
  /// Use seeded random patterns instead of exhaustive enumeration.
  bool sampling = false;
  std::uint64_t samples = 1u << 16;
  std::uint64_t seed = 0;
};

/// Exhaustive over the 2^{n-1} patterns with gamma_1 = +1 (gamma and -gamma
/// give the same norm). Throws ResourceExhausted for n > 24 unless sampling.
CotypeReport cotype_ratio(const SpaceModel& space, std::span<const Vector> xs, double p,
                          const CotypeOptions& options = {});

/// ‖sum gamma_k x_k‖ for an explicit ±1 pattern.
double signed_norm(std::span<const Vector> xs, std::span<const int> pattern);

/// min over test sets of cotype_ratio.
double cotype_constant_estimate(const SpaceModel& space,
                                std::span<const std::vector<Vector>> test_sets, double p);

/// Average of ‖sum gamma_k x_k‖^2 over all 2^n sign patterns.
double sign_mean_square(const SpaceModel& space, std::span<const Vector> xs);

struct HolderCheck {
  double lhs = 1.0;
  double weighted_factor = 0.0;  // (sum (p_{n,m} ‖x_m‖)^p)^{1/p}, max form for p = inf
  double inverse_factor = 0.0;   // (sum ‖x_m‖^{-p'})^{1/p'}
  double product = 0.0;
  bool pass = false;
};

/// 1 <= weighted_factor * inverse_factor over the support of row n (Hölder
/// applied to sum_m p_{n,m} = 1). Passes when product >= 1 - 1e-9.
HolderCheck holder_row_check(const WeightMatrix& w, std::span<const Vector> xs,
                             const ExponentPair& exponents, std::size_t n);

enum class Consistency { consistent, inconsistent, indeterminate };

std::string to_string(Consistency c);

struct NecessaryReport {
  std::size_t horizon = 0;
  ExponentPair exponents;
  std::size_t quarter = 0;
  std::size_t half = 0;
  double sum_quarter = 0.0;
  double sum_half = 0.0;
  double sum_full = 0.0;
  std::optional<Divergence> verdict;
  std::optional<double> tail_half;     // tail bound beyond N/2
  std::optional<double> tail_quarter;  // tail bound beyond N/4
  Consistency consistency = Consistency::indeterminate;
};

/// Cross-checks the analytic verdict for sum a_n^{-p'} against partial sums at
/// N/4, N/2, N. Divergent: sums strictly increase and S_N >= 1.1 S_{N/2}.
/// Convergent: S_N - S_{N/2} and S_{N/2} - S_{N/4} stay below the tail bounds.
NecessaryReport necessary_condition_check(const NormFamily& fam, const ExponentPair& exponents,
                                          std::size_t N);

/// Empirical max over rows n and sampled f of sum_m p_{n,m} |f(x_m)| / ‖f‖.
/// Reported only; it is a lower estimate of the true operator constant.
double sup_functional_bound(const WeightMatrix& w, std::span<const Vector> xs,
                            std::span<const Functional> functionals);

}  // namespace plankforge
