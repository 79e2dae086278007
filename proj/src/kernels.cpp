#include "plankforge/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>

#include "plankforge/error.hpp"
#include "plankforge/plank.hpp"
#include "plankforge/rng.hpp"

namespace plankforge {

VectorBlock VectorBlock::from(std::span<const Vector> xs) {
  VectorBlock b;
  b.count = xs.size();
  if (xs.empty()) return b;
  b.stride = xs.front().values.size();
  b.p = xs.front().space.p;
  b.data.reserve(b.count * b.stride);
  for (const auto& x : xs) {
    if (x.values.size() != b.stride) throw SpaceMismatch("vectors of different sizes");
    b.data.insert(b.data.end(), x.values.begin(), x.values.end());
  }
  return b;
}

double block_norm(std::span<const double> v, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s, 1.0 / p);
}

std::vector<double> signed_sum(const VectorBlock& xs, std::uint64_t pattern) {
  std::vector<double> sum(xs.stride, 0.0);
  for (std::size_t k = 0; k < xs.count; ++k) {
    const bool negative = k > 0 && ((pattern >> (k - 1)) & 1u);
    const auto row = xs.row(k);
    if (negative) {
      for (std::size_t i = 0; i < xs.stride; ++i) sum[i] -= row[i];
    } else {
      for (std::size_t i = 0; i < xs.stride; ++i) sum[i] += row[i];
    }
  }
  return sum;
}

namespace {

std::uint64_t pattern_count(const VectorBlock& xs) {
  if (xs.count == 0) throw InvalidInput("sign search needs at least one vector");
  if (xs.count > 64) throw ResourceExhausted("sign patterns limited to 64 vectors");
  return xs.count == 1 ? 1 : (std::uint64_t{1} << (xs.count - 1));
}

void check_horizon(const WeightMatrix& w, const ScalarSequence& a) {
  for (std::size_t n = 1; n <= w.rows(); ++n) {
    if (w.support_max(n) > a.horizon()) (void)p_transform(w, a, n);  // throws with the column
  }
}

double row_error(const WeightMatrix& w, std::size_t n) {
  double s = 0.0;
  w.for_each_in_row(n, [&](std::size_t, double p) { s += p; });
  return std::abs(s - 1.0);
}

double row_value(const WeightMatrix& w, const std::vector<double>& a, std::size_t n) {
  double s = 0.0;
  w.for_each_in_row(n, [&](std::size_t m, double p) { s += p * a[m - 1]; });
  return s;
}

bool covered_by_any(std::span<const Plank> planks, const Vector& v) {
  for (const auto& p : planks) {
    if (plank_contains(p, v)) return true;
  }
  return false;
}

// Better = larger norm, ties to the lower pattern index.
bool better(double norm, std::uint64_t pattern, const SignSearch& current) {
  return norm > current.best_norm || (norm == current.best_norm && pattern < current.pattern);
}

// Gray-code walk over positions [lo, hi); pattern at position i is i ^ (i >> 1).
template <class Visit>
void gray_walk(const VectorBlock& xs, std::uint64_t lo, std::uint64_t hi, Visit&& visit) {
  std::uint64_t g = lo ^ (lo >> 1);
  std::vector<double> sum = signed_sum(xs, g);
  visit(sum, g);
  for (std::uint64_t i = lo + 1; i < hi; ++i) {
    const int bit = std::countr_zero(i);
    g ^= std::uint64_t{1} << bit;
    const auto row = xs.row(static_cast<std::size_t>(bit) + 1);
    const double c = ((g >> bit) & 1u) ? -2.0 : 2.0;
    for (std::size_t j = 0; j < xs.stride; ++j) sum[j] += c * row[j];
    visit(sum, g);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Parallel kernels

namespace kernels {

std::vector<double> row_sum_errors(const WeightMatrix& w) {
  const auto rows = static_cast<std::ptrdiff_t>(w.rows());
  std::vector<double> out(w.rows());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t n = 1; n <= rows; ++n) out[n - 1] = row_error(w, static_cast<std::size_t>(n));
  return out;
}

std::vector<double> row_transforms(const WeightMatrix& w, const ScalarSequence& a) {
  check_horizon(w, a);
  const auto rows = static_cast<std::ptrdiff_t>(w.rows());
  std::vector<double> out(w.rows());
  const auto& values = a.values();
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t n = 1; n <= rows; ++n) {
    out[n - 1] = row_value(w, values, static_cast<std::size_t>(n));
  }
  return out;
}

std::vector<std::uint8_t> coverage_flags(std::span<const Plank> planks, const SpaceModel& space,
                                         double radius, std::size_t samples, std::uint64_t seed) {
  std::vector<std::uint8_t> out(samples, 0);
  const auto count = static_cast<std::ptrdiff_t>(samples);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const Vector v = ball_sample(space, radius, seed, static_cast<std::uint64_t>(i));
    out[i] = covered_by_any(planks, v) ? 1 : 0;
  }
  return out;
}

SignSearch best_sign_pattern(const VectorBlock& xs) {
  const std::uint64_t total = pattern_count(xs);
  const std::uint64_t chunks = (total + kSignChunk - 1) / kSignChunk;
  std::vector<SignSearch> partial(chunks);
  const auto nchunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
    const std::uint64_t lo = static_cast<std::uint64_t>(c) * kSignChunk;
    const std::uint64_t hi = std::min(total, lo + kSignChunk);
    SignSearch best{-1.0, 0, hi - lo};
    gray_walk(xs, lo, hi, [&](const std::vector<double>& sum, std::uint64_t g) {
      const double nrm = block_norm(sum, xs.p);
      if (better(nrm, g, best)) {
        best.best_norm = nrm;
        best.pattern = g;
      }
    });
    partial[static_cast<std::size_t>(c)] = best;
  }
  SignSearch out{-1.0, 0, 0};
  for (const auto& s : partial) {
    out.visited += s.visited;
    if (better(s.best_norm, s.pattern, out)) {
      out.best_norm = s.best_norm;
      out.pattern = s.pattern;
    }
  }
  return out;
}

SignSearch sampled_sign_pattern(const VectorBlock& xs, std::uint64_t samples, std::uint64_t seed) {
  const std::uint64_t total = pattern_count(xs);
  if (samples == 0) throw InvalidInput("sampling mode needs at least one sample");
  const std::uint64_t chunks = (samples + kSignChunk - 1) / kSignChunk;
  std::vector<SignSearch> partial(chunks);
  const auto nchunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
    const std::uint64_t lo = static_cast<std::uint64_t>(c) * kSignChunk;
    const std::uint64_t hi = std::min(samples, lo + kSignChunk);
    SignSearch best{-1.0, 0, hi - lo};
    for (std::uint64_t i = lo; i < hi; ++i) {
      SplitMix64 gen(seed, i);
      const std::uint64_t g = gen() & (total - 1);
      const double nrm = block_norm(signed_sum(xs, g), xs.p);
      if (better(nrm, g, best)) {
        best.best_norm = nrm;
        best.pattern = g;
      }
    }
    partial[static_cast<std::size_t>(c)] = best;
  }
  SignSearch out{-1.0, 0, 0};
  for (const auto& s : partial) {
    out.visited += s.visited;
    if (better(s.best_norm, s.pattern, out)) {
      out.best_norm = s.best_norm;
      out.pattern = s.pattern;
    }
  }
  return out;
}

double sign_mean_square(const VectorBlock& xs) {
  const std::uint64_t total = pattern_count(xs);
  const std::uint64_t chunks = (total + kSignChunk - 1) / kSignChunk;
  std::vector<double> partial(chunks, 0.0);
  const auto nchunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
    const std::uint64_t lo = static_cast<std::uint64_t>(c) * kSignChunk;
    const std::uint64_t hi = std::min(total, lo + kSignChunk);
    double s = 0.0;
    gray_walk(xs, lo, hi, [&](const std::vector<double>& sum, std::uint64_t) {
      const double nrm = block_norm(sum, xs.p);
      s += nrm * nrm;
    });
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total_sum = 0.0;
  for (double s : partial) total_sum += s;
  // gamma and -gamma give equal norms, so the half enumeration has the same mean.
  return total_sum / static_cast<double>(total);
}

std::vector<WitnessRun> witness_restarts(std::span<const Vector> xs, double radius,
                                         const WitnessOptions& options, bool orthogonal) {
  std::vector<WitnessRun> runs(options.restarts);
  const auto count = static_cast<std::ptrdiff_t>(options.restarts);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    const auto idx = static_cast<std::size_t>(r);
    runs[idx] = detail::witness_ascent(xs, detail::witness_start(xs, idx, radius, options, orthogonal),
                                       radius, options);
  }
  return runs;
}

}  // namespace kernels

// ---------------------------------------------------------------------------
// Serial references

namespace reference {

std::vector<double> row_sum_errors(const WeightMatrix& w) {
  std::vector<double> out(w.rows());
  for (std::size_t n = 1; n <= w.rows(); ++n) out[n - 1] = row_error(w, n);
  return out;
}

std::vector<double> row_transforms(const WeightMatrix& w, const ScalarSequence& a) {
  check_horizon(w, a);
  std::vector<double> out(w.rows());
  for (std::size_t n = 1; n <= w.rows(); ++n) out[n - 1] = row_value(w, a.values(), n);
  return out;
}

std::vector<std::uint8_t> coverage_flags(std::span<const Plank> planks, const SpaceModel& space,
                                         double radius, std::size_t samples, std::uint64_t seed) {
  std::vector<std::uint8_t> out(samples, 0);
  for (std::size_t i = 0; i < samples; ++i) {
    out[i] = covered_by_any(planks, ball_sample(space, radius, seed, i)) ? 1 : 0;
  }
  return out;
}

SignSearch best_sign_pattern(const VectorBlock& xs) {
  const std::uint64_t total = pattern_count(xs);
  SignSearch best{-1.0, 0, total};
  for (std::uint64_t g = 0; g < total; ++g) {
    const double nrm = block_norm(signed_sum(xs, g), xs.p);
    if (nrm > best.best_norm) {
      best.best_norm = nrm;
      best.pattern = g;
    }
  }
  return best;
}

SignSearch sampled_sign_pattern(const VectorBlock& xs, std::uint64_t samples, std::uint64_t seed) {
  const std::uint64_t total = pattern_count(xs);
  if (samples == 0) throw InvalidInput("sampling mode needs at least one sample");
  SignSearch best{-1.0, 0, samples};
  for (std::uint64_t i = 0; i < samples; ++i) {
    SplitMix64 gen(seed, i);
    const std::uint64_t g = gen() & (total - 1);
    const double nrm = block_norm(signed_sum(xs, g), xs.p);
    if (better(nrm, g, best)) {
      best.best_norm = nrm;
      best.pattern = g;
    }
  }
  return best;
}

double sign_mean_square(const VectorBlock& xs) {
  const std::uint64_t total = pattern_count(xs);
  double s = 0.0;
  for (std::uint64_t g = 0; g < total; ++g) {
    const double nrm = block_norm(signed_sum(xs, g), xs.p);
    s += nrm * nrm;
  }
  return s / static_cast<double>(total);
}

std::vector<WitnessRun> witness_restarts(std::span<const Vector> xs, double radius,
                                         const WitnessOptions& options, bool orthogonal) {
  std::vector<WitnessRun> runs;
  runs.reserve(options.restarts);
  for (std::size_t r = 0; r < options.restarts; ++r) {
    runs.push_back(detail::witness_ascent(xs, detail::witness_start(xs, r, radius, options, orthogonal),
                                          radius, options));
  }
  return runs;
}

}  // namespace reference

void configure_threads_from_env() {
  const char* env = std::getenv("PLANKFORGE_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 0) {
    throw InvalidInput(std::string("PLANKFORGE_THREADS must be a nonnegative integer, got '") + env + "'");
  }
  if (v > 0) omp_set_num_threads(static_cast<int>(v));
}

}  // namespace plankforge
