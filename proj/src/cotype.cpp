#include "plankforge/cotype.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plankforge/error.hpp"
#include "plankforge/kernels.hpp"

namespace plankforge {

namespace {

void require_members(const SpaceModel& space, std::span<const Vector> xs) {
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!(xs[k].space == space)) {
      throw SpaceMismatch("x_" + std::to_string(k + 1) + " lives in " + xs[k].space.descriptor() +
                          ", expected " + space.descriptor());
    }
  }
}

std::vector<int> pattern_signs(std::uint64_t pattern, std::size_t n) {
  std::vector<int> out(n, 1);
  for (std::size_t k = 1; k < n; ++k) {
    if ((pattern >> (k - 1)) & 1u) out[k] = -1;
  }
  return out;
}

double p_mean(std::span<const double> values, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
  }
  double s = 0.0;
  for (double v : values) s += std::pow(v, p);
  return std::pow(s, 1.0 / p);
}

}  // namespace

CotypeReport cotype_ratio(const SpaceModel& space, std::span<const Vector> xs, double p,
                          const CotypeOptions& options) {
  if (xs.empty()) throw InvalidInput("cotype_ratio needs at least one vector");
  if (!(p >= 1.0)) throw InvalidInput("cotype exponent p must be >= 1");
  require_members(space, xs);
  const std::size_t n = xs.size();
  if (n > kMaxEnumeratedVectors && !options.sampling) {
    throw ResourceExhausted("cotype_ratio: " + std::to_string(n) +
                            " vectors exceed the exhaustive limit of 24; enable sampling mode for a "
                            "lower bound");
  }
  const VectorBlock block = VectorBlock::from(xs);
  const SignSearch search = options.sampling
                                ? kernels::sampled_sign_pattern(block, options.samples, options.seed)
                                : kernels::best_sign_pattern(block);

  CotypeReport r;
  r.n = n;
  r.p = p;
  r.enumerated = search.visited;
  r.lower_bound = options.sampling;
  r.pattern = pattern_signs(search.pattern, n);
  r.best_norm = signed_norm(xs, r.pattern);
  std::vector<double> norms(n);
  for (std::size_t k = 0; k < n; ++k) norms[k] = norm(xs[k]);
  r.denominator = p_mean(norms, p);
  r.ratio = r.denominator > 0.0 ? r.best_norm / r.denominator : 0.0;
  return r;
}

double signed_norm(std::span<const Vector> xs, std::span<const int> pattern) {
  if (xs.empty() || pattern.size() != xs.size()) {
    throw InvalidInput("signed_norm: pattern length must match the vector count");
  }
  Vector sum = Vector::zero(xs.front().space);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (pattern[k] != 1 && pattern[k] != -1) throw InvalidInput("sign pattern entries must be +1 or -1");
    sum = sum + static_cast<double>(pattern[k]) * xs[k];
  }
  return norm(sum);
}

double cotype_constant_estimate(const SpaceModel& space,
                                std::span<const std::vector<Vector>> test_sets, double p) {
  if (test_sets.empty()) throw InvalidInput("cotype_constant_estimate needs at least one test set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& set : test_sets) best = std::min(best, cotype_ratio(space, set, p).ratio);
  return best;
}

double sign_mean_square(const SpaceModel& space, std::span<const Vector> xs) {
  if (xs.empty()) throw InvalidInput("sign_mean_square needs at least one vector");
  require_members(space, xs);
  if (xs.size() > kMaxEnumeratedVectors) {
    throw ResourceExhausted("sign_mean_square enumerates at most 24 vectors");
  }
  return kernels::sign_mean_square(VectorBlock::from(xs));
}

HolderCheck holder_row_check(const WeightMatrix& w, std::span<const Vector> xs,
                             const ExponentPair& exponents, std::size_t n) {
  if (w.support_max(n) > xs.size()) {
    throw OutOfRange("row " + std::to_string(n) + " reaches column " +
                     std::to_string(w.support_max(n)) + " but only " + std::to_string(xs.size()) +
                     " vectors are given");
  }
  const double p = exponents.p;
  const double pp = exponents.p_prime;
  double weighted = 0.0;
  double inverse = 0.0;
  w.for_each_in_row(n, [&](std::size_t m, double pw) {
    const double a = norm(xs[m - 1]);
    if (!(a > 0.0)) {
      throw InvalidInput("holder_row_check: x_" + std::to_string(m) + " has zero norm");
    }
    if (std::isinf(p)) {
      weighted = std::max(weighted, pw * a);
    } else {
      weighted += std::pow(pw * a, p);
    }
    inverse += std::pow(a, -pp);
  });
  HolderCheck h;
  h.weighted_factor = std::isinf(p) ? weighted : std::pow(weighted, 1.0 / p);
  h.inverse_factor = std::pow(inverse, 1.0 / pp);
  h.product = h.weighted_factor * h.inverse_factor;
  h.pass = h.product >= 1.0 - 1e-9;
  return h;
}

std::string to_string(Consistency c) {
  switch (c) {
    case Consistency::consistent:
      return "consistent";
    case Consistency::inconsistent:
      return "inconsistent";
    case Consistency::indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

NecessaryReport necessary_condition_check(const NormFamily& fam, const ExponentPair& exponents,
                                          std::size_t N) {
  if (N < 8) throw InvalidInput("necessary_condition_check needs N >= 8");
  NecessaryReport r;
  r.horizon = N;
  r.exponents = exponents;
  r.quarter = N / 4;
  r.half = N / 2;
  const double q = exponents.p_prime;
  r.sum_quarter = partial_sum(fam, q, r.quarter);
  r.sum_half = partial_sum(fam, q, r.half);
  r.sum_full = partial_sum(fam, q, N);
  try {
    r.verdict = fam.divergence(q);
  } catch (const NoCertificate&) {
    r.consistency = Consistency::indeterminate;
    return r;
  }
  r.tail_half = fam.tail_bound(q, r.half);
  r.tail_quarter = fam.tail_bound(q, r.quarter);
  if (*r.verdict == Divergence::divergent) {
    const bool increasing = r.sum_quarter < r.sum_half && r.sum_half < r.sum_full;
    r.consistency = increasing && r.sum_full >= 1.1 * r.sum_half ? Consistency::consistent
                                                                 : Consistency::inconsistent;
    return r;
  }
  if (!r.tail_half || !r.tail_quarter) {
    r.consistency = Consistency::indeterminate;
    return r;
  }
  const bool late_ok = r.sum_full - r.sum_half <= *r.tail_half * (1.0 + 1e-12);
  const bool early_ok = r.sum_half - r.sum_quarter <= *r.tail_quarter * (1.0 + 1e-12);
  r.consistency = late_ok && early_ok ? Consistency::consistent : Consistency::inconsistent;
  return r;
}

double sup_functional_bound(const WeightMatrix& w, std::span<const Vector> xs,
                            std::span<const Functional> functionals) {
  if (w.empty()) throw InvalidInput("sup_functional_bound: weight matrix has no rows");
  if (functionals.empty()) throw InvalidInput("sup_functional_bound: empty functional sample");
  std::size_t reach = 0;
  for (std::size_t n = 1; n <= w.rows(); ++n) reach = std::max(reach, w.support_max(n));
  if (reach > xs.size()) throw OutOfRange("weight rows reach beyond the vector list");

  double best = 0.0;
  std::vector<double> values(reach);
  for (const auto& f : functionals) {
    const double fn = dual_norm(f);
    if (!(fn > 0.0)) continue;
    for (std::size_t m = 0; m < reach; ++m) values[m] = std::abs(pair(f, xs[m]));
    const auto row_values = kernels::row_transforms(w, ScalarSequence(values));
    for (double v : row_values) best = std::max(best, v / fn);
  }
  return best;
}

}  // namespace plankforge
