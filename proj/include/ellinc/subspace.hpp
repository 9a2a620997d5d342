#pragma once

#include <filesystem>
#include <ostream>
#include <span>

#include "ellinc/types.hpp"

namespace ellinc {

/// A linear subspace of R^n held as orthonormal basis columns.
class Subspace {
 public:
  /// `basis` must have orthonormal columns (to 1e-12); throws InputError
  /// otherwise. Use `spanned_by` for arbitrary spanning sets.
  Subspace(Index ambient_dim, Matrix basis, double tol = kDefaultTol);

  static Subspace whole(Index n);
  static Subspace trivial(Index n);
  /// Span of the standard basis vectors e_i for the given indices.
  static Subspace coordinate_span(Index n, std::span<const Index> indices);
  /// Orthonormalizes the columns of `vectors` (rank rule as kernel_basis).
  static Subspace spanned_by(const Matrix& vectors, double tol = kDefaultTol);

  Index ambient_dim() const noexcept { return ambient_dim_; }
  Index dim() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }
  double tol() const noexcept { return tol_; }
  bool is_whole() const noexcept { return dim() == ambient_dim_; }

  /// Orthogonal projection of `x`.
  Vector project(const Vector& x) const;
  /// Component of `x` orthogonal to the subspace.
  Vector reject(const Vector& x) const;
  /// Coefficients of the projection of `x` in the basis.
  Vector coordinates(const Vector& x) const;
  Vector lift(const Vector& coords) const;
  /// True when |x - Px| <= tol * max(1, |x|).
  bool contains(const Vector& x, double tol) const;

  Subspace orthogonal_complement() const;
  Subspace intersect(const Subspace& other) const;

 private:
  Index ambient_dim_;
  Matrix basis_;
  double tol_;
};

/// Dense column dump: one ambient coordinate per line, basis vectors as
/// whitespace-separated columns.
void write_dense_columns(std::ostream& out, const Subspace& s);
void write_dense_columns(const std::filesystem::path& path, const Subspace& s);

}  // namespace ellinc
