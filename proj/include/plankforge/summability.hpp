#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "plankforge/error.hpp"

namespace plankforge {

/// One stored weight p_{n,m}; columns are 1-based.
struct WeightEntry {
  std::size_t column = 0;
  double weight = 0.0;

  friend bool operator==(const WeightEntry&, const WeightEntry&) = default;
};

/// Row-finite weight matrix P = {p_{n,m}} over a stored prefix of rows.
///
/// Rows and columns are 1-based. Two storage layouts exist:
///   * explicit sparse rows, and
///   * a normalized prefix, p_{n,m} = column_mass[m] / row_mass[n] for m <= n,
///     which keeps triangular matrices with 10^4 rows in O(N) memory.
/// Both layouts expose the same row visitation order (increasing m), so every
/// sum over a row is evaluated identically regardless of layout.
///
/// Construction enforces structure only (columns >= 1, distinct, sorted).
/// Nonnegativity, row sums and column decay are checked by validate_weights so
/// that invalid matrices can still be represented and reported on.
class WeightMatrix {
 public:
  using Row = std::vector<WeightEntry>;

  WeightMatrix() = default;

  static WeightMatrix from_rows(std::vector<Row> rows);
  static WeightMatrix normalized_prefix(std::vector<double> column_mass,
                                        std::vector<double> row_mass);
  /// p_{n,n} = 1.
  static WeightMatrix identity(std::size_t rows);

  std::size_t rows() const noexcept;
  bool empty() const noexcept { return rows() == 0; }
  bool is_prefix() const noexcept { return prefix_; }

  std::size_t support_size(std::size_t n) const;
  /// Largest column with a stored entry in row n (0 for an empty row).
  std::size_t support_max(std::size_t n) const;
  double weight(std::size_t n, std::size_t m) const;
  /// Materialized copy of row n.
  Row row(std::size_t n) const;

  /// Calls f(m, p_{n,m}) for every stored entry of row n in increasing m.
  template <class F>
  void for_each_in_row(std::size_t n, F&& f) const {
    check_row(n);
    if (prefix_) {
      const double denom = row_mass_[n - 1];
      for (std::size_t m = 1; m <= n; ++m) f(m, column_mass_[m - 1] / denom);
      return;
    }
    for (const auto& e : rows_[n - 1]) f(e.column, e.weight);
  }

 private:
  void check_row(std::size_t n) const;

  bool prefix_ = false;
  std::vector<Row> rows_;
  std::vector<double> column_mass_;
  std::vector<double> row_mass_;
};

/// Finite prefix a_1..a_N of a real sequence, 1-based.
class ScalarSequence {
 public:
  ScalarSequence() = default;
  explicit ScalarSequence(std::vector<double> values);
  static ScalarSequence from_function(std::size_t horizon,
                                      const std::function<double(std::size_t)>& a);

  std::size_t horizon() const noexcept { return values_.size(); }
  double at(std::size_t m) const;
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

ScalarSequence operator+(const ScalarSequence& a, const ScalarSequence& b);

enum class ViolationKind { negative_weight, row_sum, column_not_null };

std::string to_string(ViolationKind kind);

/// (row, column) of a failed check; column is 0 for row-level violations.
struct Violation {
  ViolationKind kind = ViolationKind::row_sum;
  std::size_t row = 0;
  std::size_t column = 0;
  double value = 0.0;
};

struct ValidationReport {
  bool pass = false;
  double row_tol = 0.0;
  double column_null_threshold = 0.0;
  std::vector<double> row_sum_errors;  // |sum_m p_{n,m} - 1| per row
  double max_row_sum_error = 0.0;
  /// Largest weight over the last quarter of stored rows, and where it occurs.
  double max_late_column_weight = 0.0;
  std::size_t late_row = 0;
  std::size_t late_column = 0;
  std::vector<Violation> violations;
};

/// Checks nonnegativity, row sums within row_tol, and the finite-horizon column
/// decay surrogate: for every column, the largest weight over the last quarter
/// of stored rows must be below column_null_threshold.
ValidationReport validate_weights(const WeightMatrix& w, double row_tol,
                                  double column_null_threshold);

/// sum_{m in supp(n)} p_{n,m} a_m, summed in increasing m.
double p_transform(const WeightMatrix& w, const ScalarSequence& a, std::size_t n);

struct TrendReport {
  std::vector<double> values;  // transform at rows 1..rows
  std::size_t mid_row = 0;
  double first_value = 0.0;
  double mid_value = 0.0;
  double last_value = 0.0;
  double threshold = 0.0;
  bool decaying = false;
};

/// Finite-horizon surrogate for P-lim a = 0. "decaying" iff the last transform
/// is below half the first one and below `threshold`. Raw values are always
/// returned so callers can apply their own criterion.
TrendReport p_limit_trend(const WeightMatrix& w, const ScalarSequence& a, double threshold);

struct SupportMinimum {
  std::size_t column = 0;
  double value = 0.0;
};

/// Smallest a_m over the support of row n (ties go to the smallest m).
SupportMinimum min_on_support(const WeightMatrix& w, const ScalarSequence& a, std::size_t n);

}  // namespace plankforge
