#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ellinc/linear_map.hpp"
#include "ellinc/scalar_graph.hpp"
#include "ellinc/subspace.hpp"

namespace ellinc {

/// Resolvent J_mu(b) of the maximal monotone part b = a - c of a relation.
/// Implementations must be total and nonexpansive for every mu > 0.
class BaseResolvent {
 public:
  virtual ~BaseResolvent() = default;
  virtual Vector apply(double mu, const Vector& z) const = 0;
  /// z -> J_mu(b)(z) with the mu-dependent setup (e.g. a factorization)
  /// done once.
  virtual std::function<Vector(const Vector&)> bind(double mu) const;
};

/// a = M with positive definite symmetric part.
struct LinearPD {
  Matrix matrix;
};
/// a(x)_i = c x_i + beta_i(x_i).
struct DiagonalGraph {
  std::vector<ScalarGraph> graphs;
};
/// Only the base resolvent is known.
struct CustomRelation {
  std::string name;
};
using RelationDescriptor = std::variant<LinearPD, DiagonalGraph, CustomRelation>;

/// A c-maximal monotone relation a on R^dim with full pre-set, represented
/// by the resolvent of b = a - c. The descriptor names the unshifted
/// relation; `shift_input`/`shift_output` hold the accumulated offsets
/// (p, q) so that the relation equals descriptor - (p, q).
class Relation {
 public:
  using ResolventFn = std::function<Vector(double mu, const Vector& z)>;

  Relation(Index dim, double c, std::shared_ptr<const BaseResolvent> base,
           RelationDescriptor descriptor);

  /// Wraps a user supplied base resolvent. The caller vouches for
  /// nonexpansiveness; `monotonicity_probe` can check it on samples.
  static Relation custom(Index dim, double c, ResolventFn base, std::string name);

  Index dim() const noexcept { return dim_; }
  double c() const noexcept { return c_; }
  const RelationDescriptor& descriptor() const noexcept { return descriptor_; }
  const Vector& shift_input() const noexcept { return p_; }
  const Vector& shift_output() const noexcept { return q_; }
  bool is_shifted() const noexcept { return p_.any() || q_.any(); }

  Vector base_resolvent(double mu, const Vector& z) const;
  /// J_lambda(a)(z) = J_mu(b)(z / (1 + lambda c)), mu = lambda / (1 + lambda c).
  Vector resolvent(double lambda, const Vector& z) const;
  std::function<Vector(const Vector&)> resolvent_map(double lambda) const;
  /// The unique x with y in a(x): J_{1/c}(b)(y / c).
  Vector inverse(const Vector& y) const;

  /// a - (p, q) = {(x - p, y - q) : (x, y) in a}.
  Relation shifted(const Vector& p, const Vector& q) const;

  std::string describe() const;

 private:
  Index dim_;
  double c_;
  std::shared_ptr<const BaseResolvent> base_;
  RelationDescriptor descriptor_;
  Vector p_, q_;
};

/// Linear relation x -> M x. c is the smallest eigenvalue of (M + M^T)/2,
/// which must exceed `tol` (ConstructionError otherwise).
Relation make_linear(const Matrix& m, double tol = kDefaultTol);
Relation make_linear(const LinearMap& m, double tol = kDefaultTol);
/// x -> c x componentwise plus the given scalar graphs.
Relation make_diagonal(double c, std::vector<ScalarGraph> graphs);
/// x -> c x on R^dim.
Relation make_scaled_identity(Index dim, double c = 1.0);

Vector resolvent(const Relation& a, double lambda, const Vector& z);
Vector inverse(const Relation& a, const Vector& y);
Relation shift(const Relation& a, const Vector& p, const Vector& q);

/// A pair (x, y) with its membership residual.
struct GraphPoint {
  Vector x;
  Vector y;
  double residual = 0.0;
};

/// |x - J_{1/c}(a)(x + y / c)|; zero iff (x, y) in a.
double graph_residual(const Relation& a, const Vector& x, const Vector& y);

struct DouglasRachfordOptions {
  std::optional<double> lambda;  // defaults to 1/c
  double tol = kDefaultTol;
  std::size_t max_iter = 100000;
  std::optional<Vector> start;  // initial s; zero by default
};

struct ProjectedSolution {
  GraphPoint point;  // x in U and v in a(x) with P_U v = w
  std::size_t iterations = 0;
  double last_step = 0.0;
};

/// Solves w in P a(x), x in U, by Douglas-Rachford splitting of
/// (a - (0, w)) + N_U. When U is the whole space this is a single
/// `inverse` evaluation. Throws DomainError if w is not in U and
/// ConvergenceError if the budget runs out.
ProjectedSolution projected_inverse(const Relation& a, const Subspace& u, const Vector& w,
                                    const DouglasRachfordOptions& options = {});

struct MonotonicityReport {
  std::size_t trials = 0;
  double min_quotient = 0.0;  // min <x1-x2, y1-y2> / |x1-x2|^2
  std::size_t violations = 0;
  bool pass = true;
};

/// Samples outputs y, maps them through `inverse`, and checks c-strong
/// monotonicity <x1-x2, y1-y2> >= c |x1-x2|^2 - 1e-9.
MonotonicityReport monotonicity_probe(const Relation& a, std::size_t trials, std::uint64_t seed);

}  // namespace ellinc
