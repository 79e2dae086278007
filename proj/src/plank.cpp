#include "plankforge/plank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plankforge/error.hpp"
#include "plankforge/kernels.hpp"
#include "plankforge/rng.hpp"

namespace plankforge {

namespace {

void require_euclidean(const SpaceModel& space, const char* what) {
  if (!space.is_euclidean()) {
    throw InvalidInput(std::string(what) + " needs a Euclidean model, got " + space.descriptor());
  }
}

double euclid_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void project_to_ball(std::vector<double>& h, double radius) {
  const double n = euclid_norm(h);
  if (n > radius) {
    const double c = radius / n;
    for (auto& x : h) x *= c;
  }
}

// Pairing data for one ascent: xs stored densely, complex as re,im pairs.
struct AscentProblem {
  std::span<const Vector> xs;
  bool complex = false;
  std::size_t stride = 0;
  double threshold = 0.5;

  // Fills z_n = |<h, x_n>| - threshold and the unit phases u_n = conj(s_n)/|s_n|.
  void evaluate(const std::vector<double>& h, std::vector<double>& z,
                std::vector<Scalar>& phase) const {
    for (std::size_t n = 0; n < xs.size(); ++n) {
      const auto& x = xs[n].values;
      Scalar s;
      if (!complex) {
        double acc = 0.0;
        for (std::size_t i = 0; i < stride; ++i) acc += h[i] * x[i];
        s = {acc, 0.0};
      } else {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t i = 0; i < stride; i += 2) {
          re += h[i] * x[i] + h[i + 1] * x[i + 1];
          im += h[i] * x[i + 1] - h[i + 1] * x[i];
        }
        s = {re, im};
      }
      const double a = std::abs(s);
      z[n] = a - threshold;
      phase[n] = a > 0.0 ? std::conj(s) / a : Scalar(1.0, 0.0);
    }
  }
};

// softmin_tau(z) = zmin - tau * log sum exp(-(z - zmin)/tau); also fills the softmax weights.
double softmin(const std::vector<double>& z, double tau, std::vector<double>& weights) {
  const double zmin = *std::min_element(z.begin(), z.end());
  double total = 0.0;
  for (std::size_t n = 0; n < z.size(); ++n) {
    weights[n] = std::exp(-(z[n] - zmin) / tau);
    total += weights[n];
  }
  for (auto& w : weights) w /= total;
  return zmin - tau * std::log(total);
}

// Support indices of a vector's storage.
std::vector<std::size_t> nonzero_slots(const Vector& v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    if (v.values[i] != 0.0) out.push_back(i);
  }
  return out;
}

// sum_j |<g_j, x>|^2 over the stored support of a real x; equal to
// product_pair_sq(g, x) because the omitted terms are exact zeros.
double product_pair_sq_on_support(const ProductVector& g, const Vector& x,
                                  std::span<const std::size_t> support) {
  double total = 0.0;
  for (const auto& c : g.components) {
    double s = 0.0;
    for (std::size_t i : support) s += c.values[i] * x.values[i];
    total += s * s;
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Planks

Plank Plank::make(Vector direction, double width, std::optional<Vector> offset) {
  if (!(width > 0.0) || !std::isfinite(width)) throw InvalidInput("plank width must be > 0");
  if (std::abs(norm(direction) - 1.0) > 1e-9) {
    throw InvalidInput("plank direction must have norm 1 within 1e-9");
  }
  Plank p;
  p.offset = offset ? std::move(*offset) : Vector::zero(direction.space);
  if (!(p.offset.space == direction.space)) throw SpaceMismatch("plank offset and direction differ");
  p.direction = std::move(direction);
  p.width = width;
  return p;
}

bool plank_contains(const Plank& plank, const Vector& v) {
  if (!(plank.direction.space == v.space)) {
    throw SpaceMismatch("plank lives in " + plank.direction.space.descriptor() + ", point in " +
                        v.space.descriptor());
  }
  return std::abs(inner(v - plank.offset, plank.direction)) <= plank.width / 2.0;
}

std::vector<Plank> planks_from_sequence(std::span<const Vector> xs) {
  std::vector<Plank> out;
  out.reserve(xs.size());
  for (std::size_t n = 0; n < xs.size(); ++n) {
    const double a = norm(xs[n]);
    if (!(a > 0.0)) throw InvalidInput("x_" + std::to_string(n + 1) + " is the zero vector");
    Plank p;
    p.direction = (1.0 / a) * xs[n];
    p.width = 1.0 / a;
    p.offset = Vector::zero(xs[n].space);
    out.push_back(std::move(p));
  }
  return out;
}

Vector ball_sample(const SpaceModel& space, double radius, std::uint64_t seed, std::uint64_t index) {
  SplitMix64 gen(seed, index);
  const std::size_t d = space.storage_size();
  std::vector<double> v(d);
  for (auto& x : v) x = standard_normal(gen);
  const double n = euclid_norm(v);
  const double r = radius * std::pow(gen.uniform(), 1.0 / static_cast<double>(d));
  const double c = n > 0.0 ? r / n : 0.0;
  for (auto& x : v) x *= c;
  return Vector::from_values(space, std::move(v));
}

CoverageReport coverage_mc(std::span<const Plank> planks, const SpaceModel& space, double radius,
                           std::size_t samples, std::uint64_t seed) {
  require_euclidean(space, "coverage_mc");
  if (!(radius > 0.0)) throw InvalidInput("coverage_mc: radius must be > 0");
  if (samples == 0) throw InvalidInput("coverage_mc: samples must be >= 1");
  for (const auto& p : planks) {
    if (!(p.direction.space == space)) throw SpaceMismatch("plank not in " + space.descriptor());
  }
  const auto covered = kernels::coverage_flags(planks, space, radius, samples, seed);
  CoverageReport r;
  r.samples = samples;
  r.radius = radius;
  r.seed = seed;
  for (std::size_t i = 0; i < samples; ++i) {
    if (covered[i]) continue;
    ++r.uncovered;
    if (r.uncovered_points.size() < 10) r.uncovered_points.push_back(ball_sample(space, radius, seed, i));
  }
  r.uncovered_fraction = static_cast<double>(r.uncovered) / static_cast<double>(samples);
  return r;
}

BudgetSums budget_sums(std::span<const Plank> planks) {
  BudgetSums b;
  for (const auto& p : planks) {
    b.sum_widths += p.width;
    b.sum_widths_sq += p.width * p.width;
  }
  return b;
}

bool parallel_planks_cover_ball(std::span<const Plank> planks, const Vector& center, double radius) {
  if (!(radius > 0.0)) throw InvalidInput("radius must be > 0");
  if (planks.empty()) return false;
  if (center.space.is_complex()) {
    throw InvalidInput("parallel_planks_cover_ball: the interval argument needs a real model");
  }
  const Vector& axis = planks.front().direction;
  struct Interval {
    double lo;
    double hi;
  };
  std::vector<Interval> intervals;
  for (const auto& p : planks) {
    const Scalar c = inner(axis, p.direction);
    if (std::abs(std::abs(c) - 1.0) > 1e-12 || std::abs(c.imag()) > 1e-12) {
      throw InvalidInput("parallel_planks_cover_ball: plank directions are not parallel");
    }
    // Membership depends on t = <v, axis> only: |t - <h0, axis>| <= w/2.
    const double mid = inner(axis, p.offset).real();
    intervals.push_back({mid - p.width / 2.0, mid + p.width / 2.0});
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  const double c0 = inner(axis, center).real();
  double reach = c0 - radius;
  for (const auto& iv : intervals) {
    if (iv.lo > reach) break;
    reach = std::max(reach, iv.hi);
    if (reach >= c0 + radius) return true;
  }
  return reach >= c0 + radius;
}

// ---------------------------------------------------------------------------
// Witness search

std::vector<double> witness_margins(std::span<const Vector> xs, const Vector& h, double threshold) {
  std::vector<double> out(xs.size());
  for (std::size_t n = 0; n < xs.size(); ++n) out[n] = std::abs(inner(h, xs[n])) - threshold;
  return out;
}

bool mutually_orthogonal(std::span<const Vector> xs) {
  // Disjoint supports settle the common axis-aligned case without a Gram scan.
  std::vector<std::uint8_t> used(xs.empty() ? 0 : xs.front().values.size(), 0);
  bool disjoint = true;
  for (const auto& x : xs) {
    for (std::size_t i = 0; i < x.values.size() && disjoint; ++i) {
      if (x.values[i] == 0.0) continue;
      // Complex coordinates occupy two slots; compare by coordinate.
      const std::size_t slot = x.space.is_complex() ? i / 2 * 2 : i;
      if (used[slot]) disjoint = false;
    }
    if (!disjoint) break;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
      if (x.values[i] != 0.0) used[x.space.is_complex() ? i / 2 * 2 : i] = 1;
    }
  }
  if (disjoint) return true;
  std::vector<double> norms(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) norms[i] = norm(xs[i]);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if (std::abs(inner(xs[i], xs[j])) > 1e-9 * norms[i] * norms[j]) return false;
    }
  }
  return true;
}

Vector orthogonal_initializer(std::span<const Vector> xs, double threshold, double delta) {
  Vector h = Vector::zero(xs.front().space);
  for (const auto& x : xs) {
    const double a = norm(x);
    // (1 + delta) * threshold / a along x/a; threshold = 1/2 gives (1+delta)/(2a).
    h = h + ((1.0 + delta) * threshold / (a * a)) * x;
  }
  return h;
}

namespace detail {

Vector witness_start(std::span<const Vector> xs, std::size_t r, double radius,
                     const WitnessOptions& options, bool orthogonal) {
  if (r == 0 && orthogonal) {
    Vector h = orthogonal_initializer(xs, options.threshold, options.delta);
    project_to_ball(h.values, radius);
    return h;
  }
  return ball_sample(xs.front().space, radius, stream_key(options.seed, 0x5747), r);
}

WitnessRun witness_ascent(std::span<const Vector> xs, Vector start, double radius,
                          const WitnessOptions& options) {
  AscentProblem prob{xs, xs.front().space.is_complex(), xs.front().values.size(), options.threshold};
  const std::size_t n = xs.size();
  std::vector<double> z(n), weights(n), z_try(n), weights_try(n);
  std::vector<Scalar> phase(n), phase_try(n);

  std::vector<double> h = std::move(start.values);
  project_to_ball(h, radius);
  std::size_t evals = 0;

  prob.evaluate(h, z, phase);
  ++evals;
  std::vector<double> best = h;
  double best_min = *std::min_element(z.begin(), z.end());

  const std::size_t stages = std::max<std::size_t>(1, options.stages);
  const std::size_t per_stage = std::max<std::size_t>(2, options.budget / stages);
  const double ratio = stages > 1 ? std::pow(options.tau_end / options.tau_start,
                                             1.0 / static_cast<double>(stages - 1))
                                  : 1.0;
  std::vector<double> grad(h.size()), trial(h.size());
  double tau = options.tau_start;
  double step = radius;

  for (std::size_t stage = 0; stage < stages && evals < options.budget; ++stage, tau *= ratio) {
    double f = softmin(z, tau, weights);
    const std::size_t stage_end = std::min(options.budget, evals + per_stage);
    while (evals < stage_end) {
      // Gradient of softmin: sum_n w_n * d|<h, x_n>|/dh.
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        const auto& x = xs[k].values;
        const double w = weights[k];
        if (!prob.complex) {
          const double c = w * phase[k].real();
          for (std::size_t i = 0; i < h.size(); ++i) grad[i] += c * x[i];
        } else {
          const Scalar u = w * phase[k];
          for (std::size_t i = 0; i < h.size(); i += 2) {
            const Scalar t = u * Scalar(x[i], x[i + 1]);
            grad[i] += t.real();
            grad[i + 1] += t.imag();
          }
        }
      }
      bool accepted = false;
      step = std::min(2.0 * step, 4.0 * radius);
      while (evals < stage_end) {
        for (std::size_t i = 0; i < h.size(); ++i) trial[i] = h[i] + step * grad[i];
        project_to_ball(trial, radius);
        double dir = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) dir += grad[i] * (trial[i] - h[i]);
        prob.evaluate(trial, z_try, phase_try);
        ++evals;
        const double f_try = softmin(z_try, tau, weights_try);
        if (f_try >= f + 1e-4 * dir && dir > 0.0) {
          h.swap(trial);
          z.swap(z_try);
          phase.swap(phase_try);
          weights.swap(weights_try);
          f = f_try;
          accepted = true;
          break;
        }
        step *= 0.5;
        if (step < 1e-14 * radius) break;
      }
      if (accepted) {
        const double m = *std::min_element(z.begin(), z.end());
        if (m > best_min) {
          best_min = m;
          best = h;
        }
      }
      if (!accepted) break;  // stationary at this temperature
    }
  }
  WitnessRun run;
  run.h = Vector::from_values(xs.front().space, std::move(best));
  run.min_margin = best_min;
  run.evaluations = evals;
  return run;
}

}  // namespace detail

WitnessReport witness_search(std::span<const Vector> xs, const WitnessOptions& options) {
  if (xs.empty()) throw InvalidInput("witness_search needs at least one vector");
  const SpaceModel& space = xs.front().space;
  require_euclidean(space, "witness_search");
  double r2 = 0.0;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    if (!(xs[n].space == space)) throw SpaceMismatch("x_" + std::to_string(n + 1) + " not in " + space.descriptor());
    const double a = norm(xs[n]);
    if (!(a > 0.0)) throw InvalidInput("x_" + std::to_string(n + 1) + " is the zero vector");
    r2 += 1.0 / (a * a);
  }
  if (options.restarts == 0) throw InvalidInput("witness_search needs at least one restart");

  WitnessReport report;
  report.norm_radius = std::sqrt(r2);
  report.target_radius = report.norm_radius + options.epsilon;
  report.search_radius = options.radius.value_or(report.target_radius);
  if (!(report.search_radius > 0.0)) throw InvalidInput("witness_search: radius must be > 0");
  report.seed = options.seed;
  report.budget = options.budget;
  report.orthogonal_start = mutually_orthogonal(xs);

  const auto runs = kernels::witness_restarts(xs, report.search_radius, options, report.orthogonal_start);
  std::size_t best = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    report.iterations += runs[r].evaluations;
    if (runs[r].min_margin > runs[best].min_margin) best = r;
  }
  report.best_restart = best;
  report.witness = runs[best].h;
  report.margins = witness_margins(xs, report.witness, options.threshold);
  const auto it = std::min_element(report.margins.begin(), report.margins.end());
  report.min_margin = *it;
  report.min_index = static_cast<std::size_t>(it - report.margins.begin()) + 1;
  report.witness_norm = norm(report.witness);
  report.success = report.min_margin > 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// Cylinders

Cylinder Cylinder::make(Vector x, std::size_t k, double threshold) {
  if (k == 0) throw InvalidInput("cylinder needs k >= 1");
  if (!(threshold > 0.0)) throw InvalidInput("cylinder threshold must be > 0");
  const double a = norm(x);
  if (!(a > 0.0)) throw InvalidInput("cylinder defining vector must be nonzero");
  Cylinder c;
  c.base_radius = std::sqrt(threshold) / a;
  c.x = std::move(x);
  c.k = k;
  c.threshold = threshold;
  return c;
}

bool cylinder_contains(const Cylinder& c, const ProductVector& g) {
  if (g.k() != c.k) {
    throw InvalidInput("cylinder has k = " + std::to_string(c.k) + ", point has " +
                       std::to_string(g.k()) + " components");
  }
  if (!(g.space() == c.x.space)) throw SpaceMismatch("cylinder and point live in different models");
  return product_pair_sq(g, c.x) <= c.threshold;
}

NeighborhoodMin separating_neighborhood(const ProductVector& g, std::span<const Vector> xs) {
  if (xs.empty()) throw InvalidInput("separating_neighborhood needs at least one vector");
  NeighborhoodMin out{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t n = 0; n < xs.size(); ++n) {
    const double v = product_pair_sq(g, xs[n]);
    if (v < out.value) out = {v, n + 1};
  }
  return out;
}

DemoReport counterexample_demo(const NormFamily& fam, std::size_t N, const DemoOptions& options) {
  if (N == 0) throw InvalidInput("counterexample_demo needs N >= 1");
  if (fam.divergence(2.0) != Divergence::divergent) {
    throw PreconditionFailed("counterexample_demo: sum a_n^{-2} must diverge for " + fam.descriptor());
  }
  if (fam.divergence(3.0) != Divergence::convergent) {
    throw PreconditionFailed("counterexample_demo: sum a_n^{-3} must converge for " + fam.descriptor());
  }
  constexpr std::size_t k = 3;
  const SpaceModel space = SpaceModel::euclidean_real(N + 1);
  const SpaceModel probe_space = SpaceModel::euclidean_real(N);

  // Probes are supported on coordinates 1..N.
  std::vector<ProductVector> probes;
  probes.reserve(options.probes);
  for (std::size_t i = 0; i < options.probes; ++i) {
    std::vector<Vector> comps;
    for (std::size_t j = 0; j < k; ++j) {
      Vector u = random_unit(probe_space, options.seed, k * i + j);
      u.values.push_back(0.0);
      comps.push_back(options.probe_scale * Vector::from_values(space, std::move(u.values)));
    }
    probes.push_back(ProductVector::make(std::move(comps)));
  }

  DemoReport report;
  report.family = fam.descriptor();
  report.horizon = N;
  report.seed = options.seed;
  report.r3_tail_bound = fam.tail_bound(3.0, N);

  const std::size_t total = N + 1;
  std::vector<double> base_radius(total);
  // values[n * probes + i] = sum_j |<g_j, x_n>|^2
  std::vector<double> values(total * probes.size());

#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t n = 1; n <= total; ++n) {
    const Cylinder c = Cylinder::make(fam.value(n) * Vector::basis(space, n), k, 1.0);
    base_radius[n - 1] = c.base_radius;
    const auto support = nonzero_slots(c.x);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      values[(n - 1) * probes.size() + i] = product_pair_sq_on_support(probes[i], c.x, support);
    }
  }

  for (std::size_t n = 1; n <= N; ++n) {
    const double r = base_radius[n - 1];
    report.r3_partial_sum += r * r * r;
  }
  report.a2_partial_sum = partial_sum(fam, 2.0, N);

  report.probes.resize(probes.size());
  report.all_probes_covered = true;
  report.no_probe_separates = true;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    auto& pr = report.probes[i];
    pr.neighborhood = {std::numeric_limits<double>::infinity(), 0};
    for (std::size_t n = 1; n <= total; ++n) {
      const double v = values[(n - 1) * probes.size() + i];
      if (v <= 1.0) pr.covering_indices.push_back(n);
      if (v < pr.neighborhood.value) pr.neighborhood = {v, n};
    }
    if (pr.covering_indices.empty()) report.all_probes_covered = false;
    if (pr.neighborhood.value > 1.0) report.no_probe_separates = false;
  }
  return report;
}

}  // namespace plankforge
