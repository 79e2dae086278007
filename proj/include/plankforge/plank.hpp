#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "plankforge/constructions.hpp"
#include "plankforge/space.hpp"

namespace plankforge {

/// {v : |<v - h0, e>| <= w/2} with ‖e‖ = 1.
struct Plank {
  Vector direction;
  double width = 1.0;
  Vector offset;

  /// Validates ‖e‖ = 1 within 1e-9 and w > 0. The offset defaults to 0.
  static Plank make(Vector direction, double width, std::optional<Vector> offset = {});
};

/// Boundary points belong to the plank.
bool plank_contains(const Plank& plank, const Vector& v);

/// P_n = {h : |<h, x_n>| <= 1/2}: direction x_n/‖x_n‖, width 1/‖x_n‖.
std::vector<Plank> planks_from_sequence(std::span<const Vector> xs);

struct CoverageReport {
  double uncovered_fraction = 0.0;
  std::size_t samples = 0;
  std::size_t uncovered = 0;
  std::vector<Vector> uncovered_points;  // at most 10, lowest sample index first
  double radius = 0.0;
  std::uint64_t seed = 0;
};

/// Monte Carlo estimate of the part of the ball B(0, radius) in `space` not
/// covered by `planks`. Sample i depends only on (seed, i).
CoverageReport coverage_mc(std::span<const Plank> planks, const SpaceModel& space, double radius,
                           std::size_t samples, std::uint64_t seed);

/// Point used for Monte Carlo sample `index`: uniform in the ball of `radius`.
Vector ball_sample(const SpaceModel& space, double radius, std::uint64_t seed, std::uint64_t index);

struct BudgetSums {
  double sum_widths = 0.0;
  double sum_widths_sq = 0.0;
};

BudgetSums budget_sums(std::span<const Plank> planks);

/// Exact covering decision for planks that all share one direction (up to
/// sign): the ball B(center, radius) is covered iff the union of the planks'
/// intervals on that axis covers [<center, e> - radius, <center, e> + radius].
/// Throws InvalidInput if the directions are not parallel.
bool parallel_planks_cover_ball(std::span<const Plank> planks, const Vector& center, double radius);

struct WitnessOptions {
  double threshold = 0.5;  // plank half-width in pairing units
  std::size_t budget = 10'000;  // objective evaluations per restart
  std::size_t restarts = 32;
  std::uint64_t seed = 0;
  double delta = 0.2;  // closed-form initializer overshoot
  double epsilon = 0.1;
  /// Search ball radius; defaults to R + epsilon with R^2 = sum ‖x_n‖^{-2}.
  std::optional<double> radius;
  std::size_t stages = 10;
  double tau_start = 1.0;
  double tau_end = 0.01;
};

struct WitnessReport {
  Vector witness;
  std::vector<double> margins;  // |<h, x_n>| - threshold
  double min_margin = 0.0;
  std::size_t min_index = 0;
  double witness_norm = 0.0;
  double norm_radius = 0.0;    // R
  double target_radius = 0.0;  // R + epsilon
  double search_radius = 0.0;
  std::size_t iterations = 0;  // total objective evaluations
  std::size_t best_restart = 0;
  bool orthogonal_start = false;
  bool success = false;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
};

/// One restart of the annealed smoothed-min ascent.
struct WitnessRun {
  Vector h;
  double min_margin = 0.0;
  std::size_t evaluations = 0;
};

/// Searches for h in the ball of `search_radius` with |<h, x_n>| > threshold
/// for every n. Restart 0 starts from the closed form when the x_n are
/// mutually orthogonal, other restarts from seeded random points. Failure is
/// reported through `success`, never as an exception.
WitnessReport witness_search(std::span<const Vector> xs, const WitnessOptions& options = {});

/// Margins |<h, x_n>| - threshold recomputed from scratch.
std::vector<double> witness_margins(std::span<const Vector> xs, const Vector& h, double threshold);

/// Whether every pair of vectors is orthogonal up to 1e-9 relative.
bool mutually_orthogonal(std::span<const Vector> xs);

/// h = sum_n (1 + delta) / (2 ‖x_n‖) * x_n / ‖x_n‖ for mutually orthogonal x_n.
Vector orthogonal_initializer(std::span<const Vector> xs, double threshold, double delta);

namespace detail {
/// Single ascent from `start`, projected onto the ball of `radius`.
WitnessRun witness_ascent(std::span<const Vector> xs, Vector start, double radius,
                          const WitnessOptions& options);
/// Starting point of restart `r`.
Vector witness_start(std::span<const Vector> xs, std::size_t r, double radius,
                     const WitnessOptions& options, bool orthogonal);
}  // namespace detail

/// {g in H^k : sum_j |<g_j, x>|^2 <= t}; base radius sqrt(t)/‖x‖.
struct Cylinder {
  Vector x;
  std::size_t k = 3;
  double threshold = 1.0;
  double base_radius = 0.0;

  static Cylinder make(Vector x, std::size_t k, double threshold = 1.0);
};

bool cylinder_contains(const Cylinder& c, const ProductVector& g);

struct NeighborhoodMin {
  double value = 0.0;
  std::size_t index = 0;  // 1-based, smallest on ties
};

/// min_n sum_j |<g_j, x_n>|^2; g separates xs from 0 iff the minimum exceeds 1.
NeighborhoodMin separating_neighborhood(const ProductVector& g, std::span<const Vector> xs);

struct ProbeResult {
  std::vector<std::size_t> covering_indices;
  NeighborhoodMin neighborhood;
};

struct DemoReport {
  std::string family;
  std::size_t horizon = 0;
  double r3_partial_sum = 0.0;
  std::optional<double> r3_tail_bound;
  double a2_partial_sum = 0.0;
  std::vector<ProbeResult> probes;
  bool all_probes_covered = false;
  bool no_probe_separates = false;
  std::uint64_t seed = 0;
};

struct DemoOptions {
  std::size_t probes = 100;
  std::uint64_t seed = 0;
  /// Component norm of each probe.
  double probe_scale = 10.0;
};

/// Cylinders C_n over x_n = a_n e_n in euclidean-real(N + 1) with k = 3, t = 1.
/// Requires sum a_n^{-2} divergent and sum a_n^{-3} convergent.
DemoReport counterexample_demo(const NormFamily& fam, std::size_t N, const DemoOptions& options = {});

}  // namespace plankforge
