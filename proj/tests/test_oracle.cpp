#include <doctest.h>

#include "ellinc/errors.hpp"
#include "ellinc/hilbert.hpp"
#include "ellinc/oracle.hpp"
#include "ellinc/solver.hpp"
#include "support.hpp"

using namespace ellinc;
using ellinc::testing::gaussian;

namespace {

Matrix dirichlet_grad3() {
  Matrix a(4, 3);
  a << 1, 0, 0, -1, 1, 0, 0, -1, 1, 0, 0, -1;
  return a;
}

}  // namespace

TEST_CASE("active set with linear graphs is a least-squares solve") {
  const LinearMap a(dirichlet_grad3());
  const auto r = oracle::active_set_solve(a, 1.0, std::vector<ScalarGraph>(4, LinearGraph{0.0}), Vector::Ones(3));
  CHECK((r.u - (Vector(3) << 1.5, 2.0, 1.5).finished()).norm() <= 1e-12);
  CHECK(r.consistent_assignments == 1);
  CHECK((a.apply_adjoint(r.v) - Vector::Ones(3)).norm() <= 1e-12);
}

TEST_CASE("active set on the single interior node") {
  const LinearMap a((Matrix(2, 1) << 1, -1).finished());
  const std::vector<ScalarGraph> sign(2, SignGraph{});
  const auto small = oracle::active_set_solve(a, 1.0, sign, Vector::Constant(1, 1.0));
  CHECK(small.u.norm() <= 1e-14);
  CHECK(small.branches[0] == oracle::Branch::Zero);
  // s = 0 sits on the kink of the second graph, so the tie admits more than
  // one consistent assignment.
  CHECK(small.consistent_assignments >= 1);
  CHECK(small.branches[1] != oracle::Branch::Positive);
  CHECK(small.v.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  CHECK(small.v(0) - small.v(1) == doctest::Approx(1.0));

  const auto large = oracle::active_set_solve(a, 1.0, sign, Vector::Constant(1, 4.0));
  CHECK(large.u(0) == doctest::Approx(1.0));
  CHECK(large.branches[0] == oracle::Branch::Positive);
  CHECK(large.branches[1] == oracle::Branch::Negative);
}

TEST_CASE("active set rejects unsupported input") {
  const LinearMap a((Matrix(2, 1) << 1, -1).finished());
  CHECK_THROWS_AS(oracle::active_set_solve(a, 1.0, {PowerGraph{3.0}, SignGraph{}}, Vector::Ones(1)),
                  CapabilityError);
  CHECK_THROWS_AS(oracle::active_set_solve(a, 1.0, {SignGraph{}}, Vector::Ones(1)), InputError);
  const LinearMap tall(Matrix::Ones(13, 1));
  CHECK_THROWS_AS(oracle::active_set_solve(tall, 1.0, std::vector<ScalarGraph>(13, SignGraph{}), Vector::Ones(1)),
                  InputError);
  // f with a kernel component has no consistent assignment.
  const LinearMap grad((Matrix(1, 2) << -1, 1).finished());
  CHECK_THROWS_AS(oracle::active_set_solve(grad, 1.0, {SignGraph{}}, Vector::Ones(2)), OracleFailure);
}

TEST_CASE("active set agrees with the pipeline for clamp and relay graphs") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Index m = ellinc::testing::uniform(rng, Index{2}, Index{5});
    const Index n = ellinc::testing::uniform(rng, Index{1}, Index{4});
    const LinearMap a(ellinc::testing::random_rank(rng, m, n, std::min(m, n)));
    std::vector<ScalarGraph> graphs;
    for (Index i = 0; i < m; ++i) {
      switch (ellinc::testing::uniform(rng, Index{0}, Index{3})) {
        case 0: graphs.push_back(ClampGraph{-0.5, 1.0}); break;
        case 1: graphs.push_back(RelayGraph{1.5}); break;
        case 2: graphs.push_back(SignGraph{}); break;
        default: graphs.push_back(LinearGraph{0.5}); break;
      }
    }
    const RestrictedOperator ctx(a);
    const Vector f = ctx.ran_adj().project(gaussian(rng, n, 2.0));
    SolverOptions o;
    o.tol = 1e-13;
    const Solution s = solve(Problem::homogeneous(a, make_diagonal(0.8, graphs), f, o));
    const auto r = oracle::active_set_solve(a, 0.8, graphs, f);
    CHECK((s.u - r.u).norm() <= 1e-8 * std::max(1.0, r.u.norm()));
  }
}

TEST_CASE("convex minimization oracle") {
  const LinearMap a(dirichlet_grad3());
  SUBCASE("quadratic case matches the direct solve") {
    const Vector u = oracle::convex_min_solve(a, 1.0, std::vector<ScalarGraph>(4, LinearGraph{1.0}), Vector::Ones(3));
    const Vector ref = oracle::linear_direct_solve(a, 2.0 * Matrix::Identity(4, 4), Vector::Ones(3));
    CHECK((u - ref).norm() <= 1e-8);
  }
  SUBCASE("zero right-hand side") {
    CHECK(oracle::convex_min_solve(a, 1.0, std::vector<ScalarGraph>(4, SignGraph{}), Vector::Zero(3)).norm() <= 1e-12);
  }
  SUBCASE("non-potential graphs") {
    CHECK_THROWS_AS(oracle::convex_min_solve(a, 1.0, std::vector<ScalarGraph>(4, RelayGraph{1.0}), Vector::Ones(3)),
                    CapabilityError);
    CHECK_THROWS_AS(oracle::convex_objective(a, 1.0, std::vector<ScalarGraph>(4, ClampGraph{}), Vector::Ones(3),
                                             Vector::Ones(3)),
                    CapabilityError);
  }
  SUBCASE("sign graphs match the active-set oracle") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
      const Index m = ellinc::testing::uniform(rng, Index{2}, Index{6});
      const Index n = ellinc::testing::uniform(rng, Index{1}, Index{5});
      const Index r = ellinc::testing::uniform(rng, Index{1}, std::min(m, n));
      const LinearMap b(ellinc::testing::random_rank(rng, m, n, r));
      const std::vector<ScalarGraph> graphs(static_cast<std::size_t>(m), SignGraph{});
      const Vector f = RestrictedOperator(b).ran_adj().project(gaussian(rng, n, 2.0));
      const Vector u1 = oracle::convex_min_solve(b, 1.0, graphs, f);
      const Vector u2 = oracle::active_set_solve(b, 1.0, graphs, f).u;
      CHECK((u1 - u2).norm() <= 1e-6 * std::max(1.0, u2.norm()));
      CHECK(oracle::convex_objective(b, 1.0, graphs, f, u1) ==
            doctest::Approx(oracle::convex_objective(b, 1.0, graphs, f, u2)).epsilon(1e-10));
    }
  }
  SUBCASE("power graphs minimize the objective") {
    const std::vector<ScalarGraph> graphs(4, PowerGraph{3.0});
    const Vector f = (Vector(3) << 1.0, -2.0, 0.5).finished();
    const Vector u = oracle::convex_min_solve(a, 0.5, graphs, f);
    const double best = oracle::convex_objective(a, 0.5, graphs, f, u);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i)
      CHECK(oracle::convex_objective(a, 0.5, graphs, f, u + 1e-3 * gaussian(rng, 3)) >= best);
  }
}

TEST_CASE("linear direct solve") {
  const LinearMap a(dirichlet_grad3());
  const Vector u = oracle::linear_direct_solve(a, Matrix::Identity(4, 4), Vector::Ones(3));
  CHECK((u - (Vector(3) << 1.5, 2.0, 1.5).finished()).norm() <= 1e-12);
  const Vector half = oracle::linear_direct_solve(a, 2.0 * Matrix::Identity(4, 4), Vector::Ones(3));
  CHECK((2.0 * half - u).norm() <= 1e-12);
  CHECK_THROWS_AS(oracle::linear_direct_solve(a, Matrix::Zero(4, 4), Vector::Ones(3)), OracleFailure);
  CHECK_THROWS_AS(oracle::linear_direct_solve(a, Matrix::Identity(3, 3), Vector::Ones(3)), InputError);
}
