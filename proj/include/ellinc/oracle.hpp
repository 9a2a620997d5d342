#pragma once

#include <optional>
#include <vector>

#include "ellinc/linear_map.hpp"
#include "ellinc/scalar_graph.hpp"

// Brute-force reference solvers for small instances. None of them touch
// the SVD-based subspace machinery, the relation resolvents, or the
// Douglas-Rachford loop: kernels come from LU, least squares from complete
// orthogonal decompositions, and scalar graphs are re-derived here.
namespace ellinc::oracle {

enum class Branch { Single, Negative, Zero, Positive, Below, Middle, Above };

/// One piece per codomain coordinate.
using BranchAssignment = std::vector<Branch>;

struct ActiveSetResult {
  Vector u;
  Vector v;  // a valid element of c s + beta(s), s = Au + offset, with A^T v = f
  BranchAssignment branches;
  std::size_t consistent_assignments = 0;
};

/// Solves A^T (c s + beta(s)) contains f with s = A u + offset, u in
/// N(A)^perp, for piecewise-linear graphs (Linear, Sign, Clamp, Relay) by
/// enumerating every branch assignment. rows(A) <= 12.
ActiveSetResult active_set_solve(const LinearMap& a, double c, const std::vector<ScalarGraph>& graphs,
                                 const Vector& f, const std::optional<Vector>& offset = std::nullopt);

/// (c/2)|Au|^2 + sum phi_i((Au)_i) - <f, u> for potential graphs
/// (Linear: m s^2/2, Sign: |s|, Power: |s|^p/p).
double convex_objective(const LinearMap& a, double c, const std::vector<ScalarGraph>& graphs,
                        const Vector& f, const Vector& u);

/// Minimizes `convex_objective` over N(A)^perp. The problem is rewritten in
/// y = Au and solved by accelerated gradient ascent on the dual of the
/// constraint y in R(A); each dual gradient is a scalar prox.
Vector convex_min_solve(const LinearMap& a, double c, const std::vector<ScalarGraph>& graphs,
                        const Vector& f, std::size_t max_iter = 1'000'000);

/// Dense solve of A^T M A u = f with u in N(A)^perp.
Vector linear_direct_solve(const LinearMap& a, const Matrix& m, const Vector& f);

}  // namespace ellinc::oracle
