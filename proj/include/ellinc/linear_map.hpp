#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "ellinc/types.hpp"

namespace ellinc {

/// A finite matrix with explicit domain (cols) and codomain (rows)
/// dimensions. Storage is dense; sparse input is accepted through
/// `from_triplets` and densified, which is fine at desk scale.
class LinearMap {
 public:
  /// Throws InputError on empty dimensions or non-finite entries.
  explicit LinearMap(Matrix entries);

  static LinearMap identity(Index n);
  static LinearMap zero(Index rows, Index cols);
  static LinearMap from_triplets(Index rows, Index cols,
                                 const std::vector<Eigen::Triplet<double>>& triplets);

  Index rows() const noexcept { return entries_.rows(); }
  Index cols() const noexcept { return entries_.cols(); }
  const Matrix& dense() const noexcept { return entries_; }

  Vector apply(const Vector& x) const;
  Vector apply_adjoint(const Vector& y) const;

  /// The real adjoint (transpose).
  LinearMap adjoint() const;
  /// `this * right`.
  LinearMap compose(const LinearMap& right) const;

 private:
  Matrix entries_;
};

}  // namespace ellinc
