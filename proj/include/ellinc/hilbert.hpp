#pragma once

#include <optional>

#include "ellinc/linear_map.hpp"
#include "ellinc/subspace.hpp"

namespace ellinc {

/// Orthonormal basis of N(M). Singular values at or below
/// tol * sigma_max count as zero. Throws InputError if `tol` < 0.
Subspace kernel_basis(const LinearMap& m, double tol = kDefaultTol);

/// Orthonormal basis of R(M) under the same rank rule.
Subspace range_basis(const LinearMap& m, double tol = kDefaultTol);

/// Orthogonal projection onto `s`; throws InputError on length mismatch.
Vector project(const Subspace& s, const Vector& x);

/// The operator A restricted to N(A)^perp -> R(A), together with the four
/// fundamental subspaces. `b_matrix` is B in the coordinates of the
/// `ran_adj` (domain) and `ran` (codomain) bases; it is square and
/// invertible, possibly 0x0.
class RestrictedOperator {
 public:
  RestrictedOperator(LinearMap full_map, double tol = kDefaultTol);

  const LinearMap& full_map() const noexcept { return full_map_; }
  const Subspace& ker() const noexcept { return ker_; }
  const Subspace& coker() const noexcept { return coker_; }
  const Subspace& ran() const noexcept { return ran_; }
  const Subspace& ran_adj() const noexcept { return ran_adj_; }
  const Matrix& b_matrix() const noexcept { return b_matrix_; }
  Index rank() const noexcept { return b_matrix_.rows(); }
  double tol() const noexcept { return tol_; }
  /// Smallest singular value of B (the discrete Poincare constant); 0 for
  /// the empty operator.
  double sigma_min() const noexcept { return sigma_min_; }
  double sigma_max() const noexcept { return sigma_max_; }

  /// Solve B * coords = rhs and B^T * coords = rhs in B-coordinates.
  Vector solve_b(const Vector& rhs) const;
  Vector solve_bt(const Vector& rhs) const;

 private:
  LinearMap full_map_;
  double tol_;
  Subspace ker_, coker_, ran_, ran_adj_;
  Matrix b_matrix_;
  Eigen::PartialPivLU<Matrix> b_lu_;
  double sigma_min_ = 0.0;
  double sigma_max_ = 0.0;
};

inline RestrictedOperator restrict_operator(const LinearMap& m, double tol = kDefaultTol) {
  return RestrictedOperator(m, tol);
}

enum class SobolevNormKind { H1_B, H0, Hm1_B, H1_C_plus_i, Hm1_C_plus_i };

const char* to_string(SobolevNormKind kind) noexcept;

/// Norms of the Sobolev chains generated by B and by |C|+i:
///   H1_B: |Ax|,  H0: |x|,  Hm1_B: sqrt(<x, (B*B)^{-1} x>),
///   H1_C_plus_i: sqrt(|Cx|^2 + |x|^2),  Hm1_C_plus_i: sqrt(<x, (C*C+1)^{-1} x>).
/// The B-kinds require x in N(A)^perp (DomainError otherwise); the C-kinds
/// require `c`.
double sobolev_norm(const RestrictedOperator& ctx, SobolevNormKind kind, const Vector& x,
                    const LinearMap* c = nullptr);

/// Unique w in R(A) with A^T w = f, for f in N(A)^perp.
Vector b_star_inverse(const RestrictedOperator& ctx, const Vector& f);

/// Unique u in N(A)^perp with A u = v, for v in R(A).
Vector b_inverse(const RestrictedOperator& ctx, const Vector& v);

/// Smallest L with sqrt(|Ch|^2 + |h|^2) <= L |Ah| on N(A)^perp, where the
/// caller guarantees C acts on the same space as A. Returns 0 when
/// N(A)^perp is trivial.
double embedding_constant(const RestrictedOperator& ctx, const LinearMap& c);

}  // namespace ellinc
