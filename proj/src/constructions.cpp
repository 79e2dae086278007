#include "plankforge/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "plankforge/error.hpp"
#include "plankforge/kernels.hpp"
#include "plankforge/rng.hpp"
#include "util.hpp"

namespace plankforge {

namespace {

// q*alpha == 1 is decided with this slack so that e.g. 3 * (1/3) counts as 1.
constexpr double kCriticalSlack = 1e-12;

double inverse_power(double a, double q) {
  if (q == 2.0) return 1.0 / (a * a);
  if (q == 1.0) return 1.0 / a;
  return std::pow(a, -q);
}

std::vector<double> read_value_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("explicit family: cannot open '" + path + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    for (const auto& field : detail::split(line, ',')) {
      const std::string t = detail::trim(field);
      if (t.empty()) continue;
      values.push_back(detail::parse_double(t, "explicit family value"));
    }
  }
  return values;
}

WeightMatrix::Row block_row(const NormFamily& fam, const BlockPartition& part, std::size_t k) {
  WeightMatrix::Row row;
  const double s = part.sums[k - 1];
  for (std::size_t m = part.boundaries[k - 1] + 1; m <= part.boundaries[k]; ++m) {
    row.push_back({m, inverse_power(fam.value(m), part.p_prime) / s});
  }
  return row;
}

double pow_abs(double x, double q) {
  x = std::abs(x);
  if (q == 1.0) return x;
  if (q == 2.0) return x * x;
  return std::pow(x, q);
}

}  // namespace

std::string to_string(Divergence d) {
  return d == Divergence::divergent ? "divergent" : "convergent";
}

// ---------------------------------------------------------------------------
// NormFamily

NormFamily NormFamily::power(double c, double alpha) {
  if (!(c > 0.0) || !std::isfinite(c) || !std::isfinite(alpha)) {
    throw InvalidInput("power family needs c > 0 and finite alpha");
  }
  NormFamily f;
  f.kind_ = Kind::power;
  f.first_ = c;
  f.second_ = alpha;
  return f;
}

NormFamily NormFamily::powerlog(double alpha, double beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw InvalidInput("powerlog family needs finite alpha and beta");
  }
  NormFamily f;
  f.kind_ = Kind::powerlog;
  f.first_ = alpha;
  f.second_ = beta;
  return f;
}

NormFamily NormFamily::explicit_values(std::vector<double> values) {
  if (values.empty()) throw InvalidInput("explicit family needs at least one value");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw InvalidInput("explicit family: a_" + std::to_string(i + 1) + " must be positive");
    }
  }
  NormFamily f;
  f.kind_ = Kind::explicit_list;
  f.values_ = std::move(values);
  return f;
}

NormFamily NormFamily::parse(std::string_view descriptor) {
  const auto parts = detail::split(descriptor, ':');
  const std::string& kind = parts[0];
  if (kind == "power" && parts.size() == 3) {
    return power(detail::parse_double(parts[1], "power c"),
                 detail::parse_double(parts[2], "power alpha"));
  }
  if (kind == "powerlog" && parts.size() == 3) {
    return powerlog(detail::parse_double(parts[1], "powerlog alpha"),
                    detail::parse_double(parts[2], "powerlog beta"));
  }
  if (kind == "explicit" && parts.size() >= 2) {
    // Rejoin in case the path itself contains ':'.
    std::string rest(descriptor.substr(kind.size() + 1));
    if (rest.empty() || rest.front() != '@') {
      throw InvalidInput("explicit family descriptor must be explicit:@file.csv");
    }
    NormFamily f = explicit_values(read_value_list(rest.substr(1)));
    f.source_ = rest.substr(1);
    return f;
  }
  throw InvalidInput("family descriptor '" + std::string(descriptor) +
                     "' must be power:c:alpha, powerlog:alpha:beta or explicit:@file.csv");
}

double NormFamily::value(std::size_t n) const {
  if (n == 0) throw OutOfRange("norm family is indexed from n = 1");
  switch (kind_) {
    case Kind::power:
      return first_ * std::pow(static_cast<double>(n), second_);
    case Kind::powerlog:
      return std::pow(static_cast<double>(n), first_) *
             std::pow(std::log(static_cast<double>(n) + 1.0), second_);
    case Kind::explicit_list:
      if (n > values_.size()) {
        throw OutOfRange("explicit family has " + std::to_string(values_.size()) +
                         " values, a_" + std::to_string(n) + " requested");
      }
      return values_[n - 1];
  }
  return 0.0;
}

Divergence NormFamily::divergence(double q) const {
  if (!(q > 0.0)) throw InvalidInput("divergence exponent q must be positive");
  switch (kind_) {
    case Kind::power:
      return q * second_ <= 1.0 + kCriticalSlack ? Divergence::divergent : Divergence::convergent;
    case Kind::powerlog: {
      const double qa = q * first_;
      if (qa < 1.0 - kCriticalSlack) return Divergence::divergent;
      if (qa <= 1.0 + kCriticalSlack) {
        return q * second_ <= 1.0 + kCriticalSlack ? Divergence::divergent : Divergence::convergent;
      }
      return Divergence::convergent;
    }
    case Kind::explicit_list:
      throw NoCertificate("explicit families carry no divergence certificate; use partial sums");
  }
  return Divergence::convergent;
}

std::optional<double> NormFamily::tail_bound(double q, std::size_t N) const {
  if (!(q > 0.0) || N == 0) return std::nullopt;
  const double n = static_cast<double>(N);
  switch (kind_) {
    case Kind::power: {
      const double qa = q * second_;
      if (!(second_ > 0.0) || qa <= 1.0 + kCriticalSlack) return std::nullopt;
      return std::pow(first_, -q) * std::pow(n, 1.0 - qa) / (qa - 1.0);
    }
    case Kind::powerlog: {
      const double qa = q * first_;
      const double qb = q * second_;
      if (!(first_ > 0.0) || second_ < 0.0) return std::nullopt;
      if (qa > 1.0 + kCriticalSlack) {
        return std::pow(std::log(n + 1.0), -qb) * std::pow(n, 1.0 - qa) / (qa - 1.0);
      }
      // Critical case: x^{-1} ln(x+1)^{-qb} <= x^{-1} ln(x)^{-qb}, integrable for qb > 1.
      if (qa >= 1.0 - kCriticalSlack && qb > 1.0 && N >= 2) {
        return std::pow(std::log(n), 1.0 - qb) / (qb - 1.0);
      }
      return std::nullopt;
    }
    case Kind::explicit_list:
      return std::nullopt;
  }
  return std::nullopt;
}

std::size_t NormFamily::max_index() const noexcept {
  return kind_ == Kind::explicit_list ? values_.size() : std::numeric_limits<std::size_t>::max();
}

std::string NormFamily::descriptor() const {
  switch (kind_) {
    case Kind::power:
      return "power:" + detail::format_double(first_) + ":" + detail::format_double(second_);
    case Kind::powerlog:
      return "powerlog:" + detail::format_double(first_) + ":" + detail::format_double(second_);
    case Kind::explicit_list:
      return "explicit:@" + source_;
  }
  return {};
}

double partial_sum(const NormFamily& fam, double q, std::size_t N) {
  if (N == 0) throw InvalidInput("partial_sum needs N >= 1");
  double s = 0.0;
  for (std::size_t n = 1; n <= N; ++n) s += inverse_power(fam.value(n), q);
  return s;
}

// ---------------------------------------------------------------------------
// ExponentPair

ExponentPair ExponentPair::from_p(double p) {
  if (!(p >= 2.0)) throw InvalidInput("exponent p must lie in [2, inf]");
  if (std::isinf(p)) return {p, 1.0};
  return {p, p / (p - 1.0)};
}

ExponentPair ExponentPair::from_p_prime(double p_prime) {
  if (!(p_prime >= 1.0 && p_prime <= 2.0)) throw InvalidInput("exponent p' must lie in [1, 2]");
  if (p_prime == 1.0) return {std::numeric_limits<double>::infinity(), 1.0};
  return {p_prime / (p_prime - 1.0), p_prime};
}

// ---------------------------------------------------------------------------
// Main-theorem construction

std::vector<Vector> main_theorem_sequence(const SpaceModel& space, const NormFamily& fam,
                                          std::size_t N,
                                          std::optional<std::uint64_t> rotation_seed) {
  if (rotation_seed) return main_theorem_sequence(space, fam, N, random_rotation(space, *rotation_seed));
  if (space.dimension < N) {
    throw InvalidInput("main_theorem_sequence: dimension " + std::to_string(space.dimension) +
                       " < N = " + std::to_string(N));
  }
  std::vector<Vector> xs;
  xs.reserve(N);
  for (std::size_t n = 1; n <= N; ++n) xs.push_back(fam.value(n) * Vector::basis(space, n));
  return xs;
}

std::vector<Vector> main_theorem_sequence(const SpaceModel& space, const NormFamily& fam,
                                          std::size_t N, const Rotation& rotation) {
  if (!(rotation.space() == space)) {
    throw SpaceMismatch("rotation lives in " + rotation.space().descriptor());
  }
  if (space.dimension < N) {
    throw InvalidInput("main_theorem_sequence: dimension " + std::to_string(space.dimension) +
                       " < N = " + std::to_string(N));
  }
  std::vector<Vector> xs;
  xs.reserve(N);
  // R(a_n e_n) = a_n * (column n of R)
  for (std::size_t n = 1; n <= N; ++n) xs.push_back(fam.value(n) * rotation.column(n));
  return xs;
}

WeightMatrix main_theorem_weights(const NormFamily& fam, std::size_t N) {
  if (N == 0) throw InvalidInput("main_theorem_weights needs N >= 1");
  std::vector<double> column_mass(N);
  std::vector<double> row_mass(N);
  double s = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    column_mass[n - 1] = inverse_power(fam.value(n), 2.0);
    s += column_mass[n - 1];
    row_mass[n - 1] = s;
  }
  return WeightMatrix::normalized_prefix(std::move(column_mass), std::move(row_mass));
}

// ---------------------------------------------------------------------------
// Block construction

std::size_t BlockPartition::block_of(std::size_t m) const {
  if (m == 0 || m > horizon()) {
    throw OutOfRange("index " + std::to_string(m) + " outside partition horizon " +
                     std::to_string(horizon()));
  }
  const auto it = std::lower_bound(boundaries.begin() + 1, boundaries.end(), m);
  return static_cast<std::size_t>(it - boundaries.begin());
}

BlockPartition BlockPartition::from_boundaries(const NormFamily& fam, double p_prime,
                                               std::vector<std::size_t> boundaries) {
  if (boundaries.size() < 2 || boundaries.front() != 0) {
    throw InvalidInput("partition boundaries must start at 0 and contain at least one block");
  }
  BlockPartition part;
  part.p_prime = p_prime;
  for (std::size_t k = 1; k < boundaries.size(); ++k) {
    if (boundaries[k] <= boundaries[k - 1]) {
      throw InvalidInput("partition boundaries must be strictly increasing");
    }
    double s = 0.0;
    for (std::size_t j = boundaries[k - 1] + 1; j <= boundaries[k]; ++j) {
      s += inverse_power(fam.value(j), p_prime);
    }
    part.sums.push_back(s);
  }
  part.boundaries = std::move(boundaries);
  return part;
}

void BlockPartition::verify(const NormFamily& fam) const {
  const BlockPartition fresh = from_boundaries(fam, p_prime, boundaries);
  if (fresh.sums.size() != sums.size()) throw InvalidInput("partition has one sum per block");
  for (std::size_t k = 0; k < sums.size(); ++k) {
    if (std::abs(fresh.sums[k] - sums[k]) > 1e-12) {
      throw InvalidInput("block " + std::to_string(k + 1) + " sum does not match recomputation");
    }
  }
}

BlockPartition block_partition(const NormFamily& fam, double p_prime, std::size_t blocks,
                               double growth_target, std::size_t horizon_cap) {
  if (blocks == 0) throw InvalidInput("block_partition needs K >= 1");
  if (fam.divergence(p_prime) == Divergence::convergent) {
    throw ConstructionImpossible(
        "sum a_n^{-p'} converges for " + fam.descriptor() + " at p' = " +
        detail::format_double(p_prime) +
        "; block sums cannot grow without bound, so no such partition exists");
  }
  std::vector<std::size_t> boundaries{0};
  std::size_t m = 0;
  double first_sum = 0.0;
  for (std::size_t k = 1; k <= blocks; ++k) {
    const double target = growth_target * static_cast<double>(k);
    double s = 0.0;
    do {
      if (m >= horizon_cap || m >= fam.max_index()) {
        throw ResourceExhausted("block_partition: block " + std::to_string(k) +
                                " needs a horizon beyond the cap " + std::to_string(horizon_cap));
      }
      ++m;
      s += inverse_power(fam.value(m), p_prime);
    } while (s < target || (k > 1 && s < first_sum));
    if (k == 1) first_sum = s;
    boundaries.push_back(m);
  }
  return BlockPartition::from_boundaries(fam, p_prime, std::move(boundaries));
}

WeightMatrix block_weights(const NormFamily& fam, const BlockPartition& part) {
  std::vector<WeightMatrix::Row> rows(part.blocks());
  for (std::size_t k = 1; k <= part.blocks(); ++k) rows[k - 1] = block_row(fam, part, k);
  return WeightMatrix::from_rows(std::move(rows));
}

BlockBasis block_basis(const SpaceModel& space, const BlockPartition& part) {
  if (space.dimension < part.horizon()) {
    throw InvalidInput("block_basis: dimension " + std::to_string(space.dimension) +
                       " < n_K = " + std::to_string(part.horizon()));
  }
  if (std::abs(space.dual_exponent() - part.p_prime) > 1e-12) {
    throw InvalidInput("block_basis: " + space.descriptor() + " has dual exponent " +
                       detail::format_double(space.dual_exponent()) + ", partition uses p' = " +
                       detail::format_double(part.p_prime));
  }
  BlockBasis basis;
  basis.space = space;
  basis.vectors.reserve(part.horizon());
  for (std::size_t n = 1; n <= part.horizon(); ++n) basis.vectors.push_back(Vector::basis(space, n));
  return basis;
}

BlockBasis block_basis(const SpaceModel& space, const BlockPartition& part,
                       const PerturbationOptions& perturbation) {
  BlockBasis exact = block_basis(space, part);
  double last = 0.0;
  for (std::size_t attempt = 0; attempt <= perturbation.max_retries; ++attempt) {
    const std::uint64_t key = stream_key(perturbation.seed, attempt);
    BlockBasis basis = exact;
    basis.perturbed = true;
    basis.attempts = attempt + 1;
    for (std::size_t k = 1; k <= part.blocks(); ++k) {
      const std::size_t lo = part.boundaries[k - 1] + 1;
      const std::size_t hi = part.boundaries[k];
      for (std::size_t j = lo; j <= hi; ++j) {
        SplitMix64 gen(key, j);
        Vector& e = basis.vectors[j - 1];
        for (std::size_t i = lo; i <= hi; ++i) {
          e.values[i - 1] += perturbation.amplitude * standard_normal(gen);
        }
        e = (1.0 / norm(e)) * e;
      }
    }
    basis.measured_distortion =
        measure_block_distortion(basis, part, stream_key(key, 0xd157), perturbation.samples_per_block);
    last = basis.measured_distortion;
    if (basis.measured_distortion < 0.125) return basis;
  }
  throw ResourceExhausted("block_basis: measured distortion " + detail::format_double(last) +
                          " >= 1/8 after " + std::to_string(perturbation.max_retries) +
                          " retries; lower the perturbation amplitude");
}

double measure_block_distortion(const BlockBasis& basis, const BlockPartition& part,
                                std::uint64_t seed, std::size_t samples_per_block) {
  double worst = 0.0;
  const double p = basis.space.p;
  for (std::size_t k = 1; k <= part.blocks(); ++k) {
    const std::size_t lo = part.boundaries[k - 1] + 1;
    const std::size_t hi = part.boundaries[k];
    for (std::size_t s = 0; s < samples_per_block; ++s) {
      SplitMix64 gen(stream_key(seed, k), s);
      Vector sum = Vector::zero(basis.space);
      double bp = 0.0;
      for (std::size_t j = lo; j <= hi; ++j) {
        const double b = standard_normal(gen);
        bp += std::pow(std::abs(b), p);
        const auto& e = basis.vectors[j - 1].values;
        for (std::size_t i = 0; i < e.size(); ++i) sum.values[i] += b * e[i];
      }
      const double denom = std::pow(bp, 1.0 / p);
      if (denom == 0.0) continue;
      worst = std::max(worst, std::abs(norm(sum) / denom - 1.0));
    }
  }
  return worst;
}

TransformBound wpp_transform_bound(const BlockBasis& basis, const NormFamily& fam,
                                   const BlockPartition& part, const Functional& f,
                                   std::size_t k) {
  if (k == 0 || k > part.blocks()) {
    throw OutOfRange("block " + std::to_string(k) + " outside 1.." + std::to_string(part.blocks()));
  }
  if (!(f.space == basis.space)) {
    throw SpaceMismatch("functional lives in " + f.space.descriptor() + ", basis in " +
                        basis.space.descriptor());
  }
  const double pp = part.p_prime;
  TransformBound b;
  b.constant = basis.transform_constant();
  for (const auto& e : block_row(fam, part, k)) {
    const double fx = fam.value(e.column) * std::abs(pair(f, basis.vectors[e.column - 1]));
    b.lhs += e.weight * pow_abs(fx, pp);
  }
  const double fnorm = pow_abs(dual_norm(f), pp);
  const double s = part.sums[k - 1];
  b.rhs = b.constant * fnorm / s;
  b.measured_constant = fnorm > 0.0 ? b.lhs * s / fnorm : 0.0;
  // Relative slack covers the equality case (C = 1, f = e_m) up to rounding.
  b.holds = b.lhs <= b.rhs * (1.0 + 1e-12);
  if (!b.holds) {
    throw InvariantViolation("block transform bound fails on block " + std::to_string(k) + ": " +
                             detail::format_double(b.lhs) + " > " + detail::format_double(b.rhs));
  }
  return b;
}

std::vector<TransformBound> main_transform_bounds(const WeightMatrix& w, const NormFamily& fam,
                                                  std::span<const Vector> xs, const Functional& f,
                                                  double tol) {
  const std::size_t rows = w.rows();
  if (xs.size() < rows) throw InvalidInput("main_transform_bounds: fewer vectors than rows");
  std::vector<double> b(xs.size());
  for (std::size_t m = 0; m < xs.size(); ++m) b[m] = std::norm(pair(f, xs[m]));
  const std::vector<double> lhs = kernels::row_transforms(w, ScalarSequence(std::move(b)));
  const double fn = dual_norm(f);
  const double fsq = fn * fn;
  std::vector<TransformBound> out(rows);
  double s = 0.0;
  for (std::size_t n = 1; n <= rows; ++n) {
    s += inverse_power(fam.value(n), 2.0);
    auto& r = out[n - 1];
    r.lhs = lhs[n - 1];
    r.rhs = fsq / s;
    r.constant = 1.0;
    r.measured_constant = fsq > 0.0 ? r.lhs * s / fsq : 0.0;
    r.holds = r.lhs <= r.rhs + tol;
  }
  return out;
}

ClusterWitness cluster_surrogate(const WeightMatrix& w, std::span<const Vector> xs,
                                 std::span<const Functional> fs, double p_prime, std::size_t n,
                                 double row_sum, double constant) {
  if (w.support_max(n) > xs.size()) throw OutOfRange("row support exceeds the vector list");
  ClusterWitness out;
  bool found = false;
  w.for_each_in_row(n, [&](std::size_t m, double p) {
    double c = 0.0;
    for (const auto& f : fs) c += pow_abs(std::abs(pair(f, xs[m - 1])), p_prime);
    out.average += p * c;
    if (!found || c < out.value) {
      out.value = c;
      out.column = m;
      found = true;
    }
  });
  for (const auto& f : fs) out.bound += constant * pow_abs(dual_norm(f), p_prime) / row_sum;
  out.holds = found && out.value <= out.bound * (1.0 + 1e-12) + 1e-15;
  return out;
}

}  // namespace plankforge
