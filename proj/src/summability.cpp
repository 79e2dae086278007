#include "plankforge/summability.hpp"

#include <algorithm>
#include <cmath>

#include "plankforge/kernels.hpp"

namespace plankforge {

// ---------------------------------------------------------------------------
// WeightMatrix

WeightMatrix WeightMatrix::from_rows(std::vector<Row> rows) {
  for (std::size_t n = 0; n < rows.size(); ++n) {
    auto& row = rows[n];
    std::sort(row.begin(), row.end(),
              [](const WeightEntry& a, const WeightEntry& b) { return a.column < b.column; });
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].column == 0) {
        throw InvalidInput("row " + std::to_string(n + 1) + ": column indices are 1-based");
      }
      if (i > 0 && row[i].column == row[i - 1].column) {
        throw InvalidInput("row " + std::to_string(n + 1) + ": duplicate column " +
                           std::to_string(row[i].column));
      }
      if (!std::isfinite(row[i].weight)) {
        throw InvalidInput("row " + std::to_string(n + 1) + ": non-finite weight");
      }
    }
  }
  WeightMatrix w;
  w.rows_ = std::move(rows);
  return w;
}

WeightMatrix WeightMatrix::normalized_prefix(std::vector<double> column_mass,
                                             std::vector<double> row_mass) {
  if (column_mass.size() != row_mass.size()) {
    throw InvalidInput("normalized prefix needs one column mass per row");
  }
  for (std::size_t n = 0; n < row_mass.size(); ++n) {
    if (!(row_mass[n] > 0.0) || !std::isfinite(row_mass[n])) {
      throw InvalidInput("row " + std::to_string(n + 1) + ": normalizer must be positive");
    }
    if (!std::isfinite(column_mass[n])) {
      throw InvalidInput("column " + std::to_string(n + 1) + ": non-finite mass");
    }
  }
  WeightMatrix w;
  w.prefix_ = true;
  w.column_mass_ = std::move(column_mass);
  w.row_mass_ = std::move(row_mass);
  return w;
}

WeightMatrix WeightMatrix::identity(std::size_t rows) {
  std::vector<Row> out(rows);
  for (std::size_t n = 0; n < rows; ++n) out[n] = {{n + 1, 1.0}};
  return from_rows(std::move(out));
}

std::size_t WeightMatrix::rows() const noexcept {
  return prefix_ ? row_mass_.size() : rows_.size();
}

void WeightMatrix::check_row(std::size_t n) const {
  if (n == 0 || n > rows()) {
    throw OutOfRange("row " + std::to_string(n) + " outside 1.." + std::to_string(rows()));
  }
}

std::size_t WeightMatrix::support_size(std::size_t n) const {
  check_row(n);
  return prefix_ ? n : rows_[n - 1].size();
}

std::size_t WeightMatrix::support_max(std::size_t n) const {
  check_row(n);
  if (prefix_) return n;
  const auto& row = rows_[n - 1];
  return row.empty() ? 0 : row.back().column;
}

double WeightMatrix::weight(std::size_t n, std::size_t m) const {
  check_row(n);
  if (prefix_) return (m >= 1 && m <= n) ? column_mass_[m - 1] / row_mass_[n - 1] : 0.0;
  const auto& row = rows_[n - 1];
  const auto it = std::lower_bound(row.begin(), row.end(), m, [](const WeightEntry& e, std::size_t c) {
    return e.column < c;
  });
  return (it != row.end() && it->column == m) ? it->weight : 0.0;
}

WeightMatrix::Row WeightMatrix::row(std::size_t n) const {
  Row out;
  out.reserve(support_size(n));
  for_each_in_row(n, [&](std::size_t m, double p) { out.push_back({m, p}); });
  return out;
}

// ---------------------------------------------------------------------------
// ScalarSequence

ScalarSequence::ScalarSequence(std::vector<double> values) : values_(std::move(values)) {}

ScalarSequence ScalarSequence::from_function(std::size_t horizon,
                                             const std::function<double(std::size_t)>& a) {
  std::vector<double> v(horizon);
  for (std::size_t m = 1; m <= horizon; ++m) v[m - 1] = a(m);
  return ScalarSequence(std::move(v));
}

double ScalarSequence::at(std::size_t m) const {
  if (m == 0 || m > values_.size()) {
    throw OutOfRange("sequence index " + std::to_string(m) + " outside horizon 1.." +
                     std::to_string(values_.size()));
  }
  return values_[m - 1];
}

ScalarSequence operator+(const ScalarSequence& a, const ScalarSequence& b) {
  if (a.horizon() != b.horizon()) throw InvalidInput("sequence horizons differ");
  std::vector<double> v(a.horizon());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values()[i] + b.values()[i];
  return ScalarSequence(std::move(v));
}

// ---------------------------------------------------------------------------
// Operations

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::negative_weight:
      return "negative_weight";
    case ViolationKind::row_sum:
      return "row_sum";
    case ViolationKind::column_not_null:
      return "column_not_null";
  }
  return "unknown";
}

ValidationReport validate_weights(const WeightMatrix& w, double row_tol,
                                  double column_null_threshold) {
  if (w.empty()) throw InvalidInput("validate_weights: empty weight matrix");
  ValidationReport report;
  report.row_tol = row_tol;
  report.column_null_threshold = column_null_threshold;

  const std::size_t rows = w.rows();
  report.row_sum_errors = kernels::row_sum_errors(w);
  for (std::size_t n = 1; n <= rows; ++n) {
    const double err = report.row_sum_errors[n - 1];
    report.max_row_sum_error = std::max(report.max_row_sum_error, err);
    if (!(err <= row_tol)) report.violations.push_back({ViolationKind::row_sum, n, 0, err});
    w.for_each_in_row(n, [&](std::size_t m, double p) {
      if (p < 0.0) report.violations.push_back({ViolationKind::negative_weight, n, m, p});
    });
  }

  // Column decay surrogate over the last quarter of stored rows.
  const std::size_t late = std::max<std::size_t>(1, rows / 4);
  const std::size_t first_late = rows - late + 1;
  std::vector<double> col_max;
  std::vector<std::size_t> col_row;
  for (std::size_t n = first_late; n <= rows; ++n) {
    w.for_each_in_row(n, [&](std::size_t m, double p) {
      if (m > col_max.size()) {
        col_max.resize(m, -1.0);
        col_row.resize(m, 0);
      }
      if (p > col_max[m - 1]) {
        col_max[m - 1] = p;
        col_row[m - 1] = n;
      }
      if (p > report.max_late_column_weight || report.late_row == 0) {
        report.max_late_column_weight = p;
        report.late_row = n;
        report.late_column = m;
      }
    });
  }
  for (std::size_t m = 1; m <= col_max.size(); ++m) {
    if (col_row[m - 1] != 0 && !(col_max[m - 1] < column_null_threshold)) {
      report.violations.push_back({ViolationKind::column_not_null, col_row[m - 1], m, col_max[m - 1]});
    }
  }
  report.pass = report.violations.empty();
  return report;
}

double p_transform(const WeightMatrix& w, const ScalarSequence& a, std::size_t n) {
  if (w.support_max(n) > a.horizon()) {
    std::size_t offending = 0;
    w.for_each_in_row(n, [&](std::size_t m, double) {
      if (offending == 0 && m > a.horizon()) offending = m;
    });
    throw OutOfRange("row " + std::to_string(n) + " uses column m=" + std::to_string(offending) +
                     " beyond sequence horizon " + std::to_string(a.horizon()));
  }
  double s = 0.0;
  const auto& v = a.values();
  w.for_each_in_row(n, [&](std::size_t m, double p) { s += p * v[m - 1]; });
  return s;
}

TrendReport p_limit_trend(const WeightMatrix& w, const ScalarSequence& a, double threshold) {
  const std::size_t rows = w.rows();
  if (rows < 4) {
    throw InsufficientData("p_limit_trend needs at least 4 rows, got " + std::to_string(rows));
  }
  for (std::size_t n = 1; n <= rows; ++n) {
    if (w.support_max(n) > a.horizon()) (void)p_transform(w, a, n);  // throws with the column
  }
  TrendReport r;
  r.values = kernels::row_transforms(w, a);
  r.threshold = threshold;
  r.mid_row = (rows + 1) / 2;
  r.first_value = r.values.front();
  r.mid_value = r.values[r.mid_row - 1];
  r.last_value = r.values.back();
  r.decaying = r.last_value < 0.5 * r.first_value && r.last_value < threshold;
  return r;
}

SupportMinimum min_on_support(const WeightMatrix& w, const ScalarSequence& a, std::size_t n) {
  if (w.support_max(n) > a.horizon()) (void)p_transform(w, a, n);
  SupportMinimum best;
  bool found = false;
  w.for_each_in_row(n, [&](std::size_t m, double) {
    const double v = a.at(m);
    if (v < 0.0) {
      throw PreconditionFailed("min_on_support: a_" + std::to_string(m) + " = " +
                               std::to_string(v) + " is negative on the support of row " +
                               std::to_string(n));
    }
    if (!found || v < best.value) {
      best = {m, v};
      found = true;
    }
  });
  if (!found) throw InvalidInput("row " + std::to_string(n) + " has empty support");
  return best;
}

}  // namespace plankforge
