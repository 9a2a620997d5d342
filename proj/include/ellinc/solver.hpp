#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "ellinc/hilbert.hpp"
#include "ellinc/relations.hpp"

namespace ellinc {

enum class ProblemKind { Homogeneous, Dirichlet, Neumann };

const char* to_string(ProblemKind kind) noexcept;

struct SolverOptions {
  double tol = kDefaultTol;
  std::optional<double> lambda;  // Douglas-Rachford step, default 1/c
  std::size_t max_iter = 100000;
  std::optional<Vector> dr_start;
  /// The relation acts on coordinates of the orthonormal R(A) basis
  /// (dim(a) == rank A) instead of on the whole codomain.
  bool range_coordinates = false;
  /// Neumann only: accept right-hand sides with a N(A) component instead
  /// of rejecting them.
  bool accept_kernel_rhs = false;
};

/// One boundary value inclusion.
///
///   Homogeneous: A^T a A  contains (u, f), u in N(A)^perp.
///   Dirichlet:   A^T a C  contains (u, f), u - u0 in the inclusion
///                subspace, where A = C E and E is the inclusion basis.
///   Neumann:     C^T a A  contains (u, f) weakly, with D(C) = inclusion
///                subspace of the domain of A and u0 in the codomain.
struct Problem {
  ProblemKind kind;
  LinearMap a;
  std::optional<LinearMap> c;
  std::optional<Subspace> inclusion;
  Relation relation;
  Vector f;
  std::optional<Vector> u0;
  SolverOptions options;

  static Problem homogeneous(LinearMap a, Relation relation, Vector f, SolverOptions options = {});
  static Problem dirichlet(LinearMap a, LinearMap c, Subspace inclusion, Relation relation,
                           Vector f, Vector u0, SolverOptions options = {});
  static Problem neumann(LinearMap a, Subspace inclusion, Relation relation, Vector f,
                         std::optional<Vector> u0 = std::nullopt, SolverOptions options = {});
};

struct Solution {
  Vector u;
  /// (Au, v) in a (Homogeneous, Neumann) or (Cu, v) in a (Dirichlet).
  GraphPoint certificate;
  /// (B^*)^{-1} f for Homogeneous/Dirichlet; the flux v for Neumann.
  Vector w;
  std::map<std::string, double> diagnostics;
  std::size_t iterations = 0;
};

Solution solve_homogeneous(const Problem& p);
Solution solve_dirichlet(const Problem& p);
Solution solve_neumann(const Problem& p);
/// Dispatches on p.kind.
Solution solve(const Problem& p);

/// True when every certificate residual in `s.diagnostics` is within
/// 10 * tol.
bool certificate_ok(const Problem& p, const Solution& s);

struct EstimateReport {
  double lhs = 0.0;
  double rhs = 0.0;
  std::map<std::string, double> constants;
  bool pass = false;
};

/// Continuity estimate for two Dirichlet problems sharing A, C and a:
/// |u - v|_{H1(|C|+i)} <= L1 sqrt(K) + L1 |C(u0 - v0)| + |u0 - v0|_{H1(|C|+i)}
/// with K = (2/c) |f-g|_{-1} |C(u0-v0)| + (1/c^2) (|f-g|_{-1} + |w0|)^2.
/// Needs a linear relation (w0 = M^T C(u0 - v0)) or equal boundary data
/// (w0 = 0); CapabilityError otherwise.
EstimateReport verify_dirichlet_estimate(const Problem& p1, const Problem& p2, const Solution& s1,
                                         const Solution& s2);

/// |u - v|_{H1(B)} <= (1/c) |xi - eta|_{H-1(B)} + (1/c) |P(u0 - v0)|.
EstimateReport verify_neumann_estimate(const Problem& p1, const Problem& p2, const Solution& s1,
                                       const Solution& s2);

struct LipschitzReport {
  std::size_t pairs = 0;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
};

/// Solves `pairs` random pairs of admissible right-hand sides with the
/// template's operator and relation and records
/// |u1 - u2|_{H1(B)} / |f1 - f2|_{H-1(B)}.
LipschitzReport lipschitz_probe(const Problem& homogeneous_template, std::size_t pairs,
                                std::uint64_t seed);

/// The subspace W = N(A)^perp intersected with D(C) of a Neumann problem,
/// and its complement in N(A)^perp for the <A., A.> inner product.
struct NeumannSpaces {
  Subspace w;
  Subspace w_perp;
};
NeumannSpaces neumann_spaces(const RestrictedOperator& ctx, const Subspace& inclusion);

}  // namespace ellinc
