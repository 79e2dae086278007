#include "plankforge/space.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "plankforge/error.hpp"
#include "plankforge/rng.hpp"
#include "util.hpp"

namespace plankforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same(const SpaceModel& a, const SpaceModel& b, const char* what) {
  if (!(a == b)) {
    throw SpaceMismatch(std::string(what) + ": " + a.descriptor() + " vs " + b.descriptor());
  }
}

double lp_norm(std::span<const double> xs, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::abs(x));
    return m;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (double x : xs) s += x * x;
    return std::sqrt(s);
  }
  if (p == 1.0) {
    double s = 0.0;
    for (double x : xs) s += std::abs(x);
    return s;
  }
  double s = 0.0;
  for (double x : xs) s += std::pow(std::abs(x), p);
  return std::pow(s, 1.0 / p);
}

std::vector<double> gaussian_values(std::size_t count, std::uint64_t seed, std::uint64_t index) {
  SplitMix64 gen(seed, index);
  std::vector<double> out(count);
  for (auto& x : out) x = standard_normal(gen);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// SpaceModel

SpaceModel SpaceModel::euclidean_real(std::size_t dimension) {
  if (dimension == 0) throw InvalidInput("space dimension must be >= 1");
  return {SpaceKind::euclidean_real, dimension, 2.0};
}

SpaceModel SpaceModel::euclidean_complex(std::size_t dimension) {
  if (dimension == 0) throw InvalidInput("space dimension must be >= 1");
  return {SpaceKind::euclidean_complex, dimension, 2.0};
}

SpaceModel SpaceModel::lp(double p, std::size_t dimension) {
  if (dimension == 0) throw InvalidInput("space dimension must be >= 1");
  if (!(p >= 1.0) || std::isinf(p)) throw InvalidInput("lp model needs 1 <= p < inf");
  return {SpaceKind::lp, dimension, p};
}

SpaceModel SpaceModel::sup(std::size_t dimension) {
  if (dimension == 0) throw InvalidInput("space dimension must be >= 1");
  return {SpaceKind::sup, dimension, kInf};
}

double SpaceModel::dual_exponent() const noexcept {
  switch (kind) {
    case SpaceKind::euclidean_real:
    case SpaceKind::euclidean_complex:
      return 2.0;
    case SpaceKind::sup:
      return 1.0;
    case SpaceKind::lp:
      return p == 1.0 ? kInf : p / (p - 1.0);
  }
  return 2.0;
}

SpaceModel SpaceModel::with_dimension(std::size_t d) const {
  SpaceModel s = *this;
  if (d == 0) throw InvalidInput("space dimension must be >= 1");
  s.dimension = d;
  return s;
}

std::string SpaceModel::descriptor() const {
  const std::string dim = std::to_string(dimension);
  switch (kind) {
    case SpaceKind::euclidean_real:
      return "euclidean-real:2:" + dim;
    case SpaceKind::euclidean_complex:
      return "euclidean-complex:2:" + dim;
    case SpaceKind::sup:
      return "sup:inf:" + dim;
    case SpaceKind::lp:
      return "lp:" + detail::format_double(p) + ":" + dim;
  }
  return {};
}

SpaceModel SpaceModel::parse(std::string_view descriptor) {
  const auto parts = detail::split(descriptor, ':');
  if (parts.size() < 2 || parts.size() > 3) {
    throw InvalidInput("space descriptor '" + std::string(descriptor) +
                       "' must look like kind:param:dimension");
  }
  const std::string& kind = parts[0];
  const std::size_t dim = detail::parse_size(parts.back(), "space dimension");
  if (kind == "euclidean-real" || kind == "euclidean-complex") {
    if (parts.size() == 3 && parts[1] != "2") {
      throw InvalidInput("euclidean space descriptor must have parameter 2");
    }
    return kind == "euclidean-real" ? euclidean_real(dim) : euclidean_complex(dim);
  }
  if (kind == "sup") {
    if (parts.size() == 3 && parts[1] != "inf") {
      throw InvalidInput("sup space descriptor must have parameter inf");
    }
    return sup(dim);
  }
  if (kind == "lp") {
    if (parts.size() != 3) throw InvalidInput("lp descriptor needs lp:p:dimension");
    return lp(detail::parse_double(parts[1], "lp exponent"), dim);
  }
  throw InvalidInput("unknown space kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Coordinates, vectors, functionals

Scalar Coordinates::coordinate(std::size_t i) const {
  if (i == 0 || i > space.dimension) {
    throw OutOfRange("coordinate " + std::to_string(i) + " outside 1.." +
                     std::to_string(space.dimension));
  }
  if (space.is_complex()) return {values[2 * (i - 1)], values[2 * (i - 1) + 1]};
  return {values[i - 1], 0.0};
}

void Coordinates::set_coordinate(std::size_t i, Scalar value) {
  if (i == 0 || i > space.dimension) {
    throw OutOfRange("coordinate " + std::to_string(i) + " outside 1.." +
                     std::to_string(space.dimension));
  }
  if (space.is_complex()) {
    values[2 * (i - 1)] = value.real();
    values[2 * (i - 1) + 1] = value.imag();
    return;
  }
  if (value.imag() != 0.0) throw InvalidInput("complex coordinate in a real model");
  values[i - 1] = value.real();
}

Vector Vector::zero(const SpaceModel& space) {
  Vector v;
  v.space = space;
  v.values.assign(space.storage_size(), 0.0);
  return v;
}

Vector Vector::basis(const SpaceModel& space, std::size_t i) {
  Vector v = zero(space);
  v.set_coordinate(i, 1.0);
  return v;
}

Vector Vector::from_values(const SpaceModel& space, std::vector<double> values) {
  if (values.size() != space.storage_size()) {
    throw InvalidInput("vector has " + std::to_string(values.size()) + " stored values, " +
                       space.descriptor() + " needs " + std::to_string(space.storage_size()));
  }
  Vector v;
  v.space = space;
  v.values = std::move(values);
  return v;
}

Functional Functional::basis(const SpaceModel& space, std::size_t i) {
  return as_functional(Vector::basis(space, i));
}

Functional Functional::from_values(const SpaceModel& space, std::vector<double> values) {
  return as_functional(Vector::from_values(space, std::move(values)));
}

Functional as_functional(const Vector& v) {
  Functional f;
  f.space = v.space;
  f.values = v.values;
  return f;
}

Vector as_vector(const Functional& f) {
  Vector v;
  v.space = f.space;
  v.values = f.values;
  return v;
}

Vector operator+(const Vector& a, const Vector& b) {
  require_same(a.space, b.space, "vector sum");
  Vector out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  return out;
}

Vector operator-(const Vector& a, const Vector& b) {
  require_same(a.space, b.space, "vector difference");
  Vector out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

Vector operator*(double c, const Vector& v) {
  Vector out = v;
  for (auto& x : out.values) x *= c;
  return out;
}

Vector scaled(const Vector& v, Scalar c) {
  if (!v.space.is_complex()) {
    if (c.imag() != 0.0) throw InvalidInput("complex scalar applied in a real model");
    return c.real() * v;
  }
  Vector out = v;
  for (std::size_t i = 0; i < v.values.size(); i += 2) {
    const Scalar z = c * Scalar(v.values[i], v.values[i + 1]);
    out.values[i] = z.real();
    out.values[i + 1] = z.imag();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Norms and pairing

double norm(const Vector& v) {
  // Complex Euclidean norm is the real l2 norm of the interleaved storage.
  return lp_norm(v.values, v.space.p);
}

double norm(const SpaceModel& space, const Vector& v) {
  require_same(space, v.space, "norm");
  return norm(v);
}

double dual_norm(const Functional& f) { return lp_norm(f.values, f.space.dual_exponent()); }

double dual_norm(const SpaceModel& space, const Functional& f) {
  require_same(space, f.space, "dual_norm");
  return dual_norm(f);
}

Scalar pair(const Functional& f, const Vector& v) {
  require_same(f.space, v.space, "pairing");
  const auto& a = f.values;
  const auto& b = v.values;
  if (!f.space.is_complex()) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return {s, 0.0};
  }
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < a.size(); i += 2) {
    // conj(a) * b
    re += a[i] * b[i] + a[i + 1] * b[i + 1];
    im += a[i] * b[i + 1] - a[i + 1] * b[i];
  }
  return {re, im};
}

Scalar pair(const SpaceModel& space, const Functional& f, const Vector& v) {
  require_same(space, f.space, "pairing");
  return pair(f, v);
}

Scalar inner(const Vector& a, const Vector& b) {
  require_same(a.space, b.space, "inner product");
  Functional f;
  f.space = a.space;
  f.values = a.values;
  return pair(f, b);
}

// ---------------------------------------------------------------------------
// Random generation

Vector random_unit(const SpaceModel& space, std::uint64_t seed, std::uint64_t index) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    // A second stream is only consulted if the first draw is exactly zero.
    const std::uint64_t key = attempt == 0 ? seed : stream_key(seed, attempt);
    Vector v = Vector::from_values(space, gaussian_values(space.storage_size(), key, index));
    const double n = norm(v);
    if (n > 0.0) return (1.0 / n) * v;
  }
}

Functional random_unit_functional(const SpaceModel& space, std::uint64_t seed,
                                  std::uint64_t index) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t key = attempt == 0 ? seed : stream_key(seed, attempt);
    Functional f = Functional::from_values(space, gaussian_values(space.storage_size(), key, index));
    const double n = dual_norm(f);
    if (n > 0.0) {
      for (auto& x : f.values) x /= n;
      return f;
    }
  }
}

// ---------------------------------------------------------------------------
// Rotations

Rotation random_rotation(const SpaceModel& space, std::uint64_t seed) {
  if (!space.is_euclidean()) {
    throw InvalidInput("random_rotation requires a Euclidean model, got " + space.descriptor());
  }
  const auto d = static_cast<Eigen::Index>(space.dimension);
  Rotation r;
  r.space_ = space;
  SplitMix64 gen(seed, 0);
  if (!space.is_complex()) {
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) g(i, j) = standard_normal(gen);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd& rr = qr.matrixQR();
    for (Eigen::Index j = 0; j < d; ++j) {
      if (rr(j, j) < 0.0) q.col(j) *= -1.0;
    }
    r.matrix_.assign(q.data(), q.data() + d * d);
    return r;
  }
  Eigen::MatrixXcd g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double re = standard_normal(gen);
      const double im = standard_normal(gen);
      g(i, j) = {re, im};
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
  const Eigen::MatrixXcd& rr = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j) {
    const double m = std::abs(rr(j, j));
    if (m > 0.0) q.col(j) *= rr(j, j) / m;
  }
  r.matrix_.resize(static_cast<std::size_t>(2 * d * d));
  for (Eigen::Index k = 0; k < d * d; ++k) {
    r.matrix_[2 * k] = q.data()[k].real();
    r.matrix_[2 * k + 1] = q.data()[k].imag();
  }
  return r;
}

std::vector<double> Rotation::apply_raw(std::span<const double> x, bool adjoint) const {
  const std::size_t d = space_.dimension;
  if (!space_.is_complex()) {
    std::vector<double> y(d, 0.0);
    if (!adjoint) {
      for (std::size_t j = 0; j < d; ++j) {
        const double xj = x[j];
        if (xj == 0.0) continue;
        const double* col = matrix_.data() + j * d;
        for (std::size_t i = 0; i < d; ++i) y[i] += col[i] * xj;
      }
    } else {
      for (std::size_t j = 0; j < d; ++j) {
        const double* col = matrix_.data() + j * d;
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += col[i] * x[i];
        y[j] = s;
      }
    }
    return y;
  }
  std::vector<double> y(2 * d, 0.0);
  if (!adjoint) {
    for (std::size_t j = 0; j < d; ++j) {
      const double xr = x[2 * j];
      const double xi = x[2 * j + 1];
      if (xr == 0.0 && xi == 0.0) continue;
      const double* col = matrix_.data() + 2 * j * d;
      for (std::size_t i = 0; i < d; ++i) {
        const double qr = col[2 * i];
        const double qi = col[2 * i + 1];
        y[2 * i] += qr * xr - qi * xi;
        y[2 * i + 1] += qr * xi + qi * xr;
      }
    }
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      const double* col = matrix_.data() + 2 * j * d;
      double sr = 0.0;
      double si = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double qr = col[2 * i];
        const double qi = col[2 * i + 1];
        // conj(q) * x
        sr += qr * x[2 * i] + qi * x[2 * i + 1];
        si += qr * x[2 * i + 1] - qi * x[2 * i];
      }
      y[2 * j] = sr;
      y[2 * j + 1] = si;
    }
  }
  return y;
}

Vector Rotation::apply(const Vector& v) const {
  require_same(space_, v.space, "rotation");
  return Vector::from_values(space_, apply_raw(v.values, false));
}

Functional Rotation::apply(const Functional& f) const {
  require_same(space_, f.space, "rotation");
  return Functional::from_values(space_, apply_raw(f.values, false));
}

Vector Rotation::apply_adjoint(const Vector& v) const {
  require_same(space_, v.space, "rotation adjoint");
  return Vector::from_values(space_, apply_raw(v.values, true));
}

Vector Rotation::column(std::size_t i) const {
  if (i == 0 || i > space_.dimension) {
    throw OutOfRange("rotation column " + std::to_string(i) + " outside 1.." +
                     std::to_string(space_.dimension));
  }
  const std::size_t stride = space_.storage_size();
  const auto first = matrix_.begin() + static_cast<std::ptrdiff_t>((i - 1) * stride);
  return Vector::from_values(space_, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(stride)));
}

// ---------------------------------------------------------------------------
// Product vectors

const SpaceModel& ProductVector::space() const {
  if (components.empty()) throw InvalidInput("product vector has no components");
  return components.front().space;
}

ProductVector ProductVector::make(std::vector<Vector> components) {
  if (components.empty()) throw InvalidInput("product vector needs k >= 1 components");
  for (const auto& c : components) require_same(components.front().space, c.space, "product vector");
  return ProductVector{std::move(components)};
}

double norm(const ProductVector& g) {
  double s = 0.0;
  for (const auto& c : g.components) {
    const double n = norm(c);
    s += n * n;
  }
  return std::sqrt(s);
}

double product_pair_sq(const ProductVector& g, const Vector& x) {
  double s = 0.0;
  for (const auto& c : g.components) s += std::norm(inner(c, x));
  return s;
}

}  // namespace plankforge
