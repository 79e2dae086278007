#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace plankforge {

using Scalar = std::complex<double>;

enum class SpaceKind { euclidean_real, euclidean_complex, lp, sup };

/// Finite-dimensional truncation model of a Hilbert or Banach space.
///
/// Descriptor strings have the form `kind:param:dimension`, for example
/// `lp:3:64`, `euclidean-real:2:100`, `euclidean-complex:2:8`, `sup:inf:16`.
/// The short forms `euclidean-real:100` and `sup:16` are accepted on input.
struct SpaceModel {
  SpaceKind kind = SpaceKind::euclidean_real;
  std::size_t dimension = 1;
  double p = 2.0;  // 2 for Euclidean kinds, +inf for sup

  static SpaceModel euclidean_real(std::size_t dimension);
  static SpaceModel euclidean_complex(std::size_t dimension);
  static SpaceModel lp(double p, std::size_t dimension);
  static SpaceModel sup(std::size_t dimension);
  static SpaceModel parse(std::string_view descriptor);

  double dual_exponent() const noexcept;
  bool is_complex() const noexcept { return kind == SpaceKind::euclidean_complex; }
  bool is_euclidean() const noexcept {
    return kind == SpaceKind::euclidean_real || kind == SpaceKind::euclidean_complex;
  }
  /// Number of doubles per element (complex coordinates are stored as re, im pairs).
  std::size_t storage_size() const noexcept { return is_complex() ? 2 * dimension : dimension; }
  /// Same kind and exponent, different dimension.
  SpaceModel with_dimension(std::size_t d) const;
  std::string descriptor() const;

  friend bool operator==(const SpaceModel&, const SpaceModel&) = default;
};

/// Coordinate storage shared by vectors and functionals.
struct Coordinates {
  SpaceModel space;
  std::vector<double> values;  // length storage_size(); re,im interleaved when complex

  std::size_t dimension() const noexcept { return space.dimension; }
  /// 1-based coordinate as a complex number (imaginary part 0 in real models).
  Scalar coordinate(std::size_t i) const;
  void set_coordinate(std::size_t i, Scalar value);
};

struct Vector : Coordinates {
  static Vector zero(const SpaceModel& space);
  /// Canonical unit vector e_i, 1-based.
  static Vector basis(const SpaceModel& space, std::size_t i);
  static Vector from_values(const SpaceModel& space, std::vector<double> values);
};

/// Element of the dual model. Evaluation is the coordinate pairing.
struct Functional : Coordinates {
  static Functional basis(const SpaceModel& space, std::size_t i);
  static Functional from_values(const SpaceModel& space, std::vector<double> values);
};

Functional as_functional(const Vector& v);
Vector as_vector(const Functional& f);

Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double c, const Vector& v);
Vector scaled(const Vector& v, Scalar c);

double norm(const Vector& v);
/// Checks that `v` lives in `space` before taking the model norm.
double norm(const SpaceModel& space, const Vector& v);
double dual_norm(const Functional& f);
double dual_norm(const SpaceModel& space, const Functional& f);

/// Coordinate pairing sum_i conj(f_i) v_i; conjugate-linear in the functional.
Scalar pair(const Functional& f, const Vector& v);
Scalar pair(const SpaceModel& space, const Functional& f, const Vector& v);
/// Pairing of two vectors (the Hilbert-space inner product <a, b> in Euclidean models).
Scalar inner(const Vector& a, const Vector& b);

/// Deterministic unit vector; stream `index` under `seed`.
Vector random_unit(const SpaceModel& space, std::uint64_t seed, std::uint64_t index = 0);
/// Deterministic functional of dual norm 1.
Functional random_unit_functional(const SpaceModel& space, std::uint64_t seed,
                                  std::uint64_t index = 0);

/// Orthogonal (unitary in the complex model) map on a Euclidean model.
class Rotation {
 public:
  const SpaceModel& space() const noexcept { return space_; }
  Vector apply(const Vector& v) const;
  Functional apply(const Functional& f) const;
  Vector apply_adjoint(const Vector& v) const;
  /// Image of the canonical basis vector e_i (column i), 1-based.
  Vector column(std::size_t i) const;

 private:
  friend Rotation random_rotation(const SpaceModel& space, std::uint64_t seed);
  std::vector<double> apply_raw(std::span<const double> x, bool adjoint) const;

  SpaceModel space_;
  std::vector<double> matrix_;  // column-major; re,im interleaved when complex
};

/// Seeded Gaussian matrix orthonormalized by Householder QR, with the column
/// phases fixed by the diagonal of R.
Rotation random_rotation(const SpaceModel& space, std::uint64_t seed);

/// Element of H (+) ... (+) H with the orthogonal-sum norm.
struct ProductVector {
  std::vector<Vector> components;

  std::size_t k() const noexcept { return components.size(); }
  const SpaceModel& space() const;
  static ProductVector make(std::vector<Vector> components);
};

double norm(const ProductVector& g);
/// sum_j |<g_j, x>|^2.
double product_pair_sq(const ProductVector& g, const Vector& x);

}  // namespace plankforge
