// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: ellinc_acceptance PATH_TO_CLI CONFIG_DIR

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ellinc/errors.hpp"
#include "ellinc/hilbert.hpp"
#include "ellinc/operators.hpp"
#include "ellinc/oracle.hpp"
#include "ellinc/solver.hpp"
#include "support.hpp"

using namespace ellinc;
using ellinc::testing::gaussian;
using ellinc::testing::uniform;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Running maximum of a measured error against its bound.
struct Worst {
  double value = 0.0;
  void add(double v) { value = std::max(value, std::isnan(v) ? INFINITY : v); }
};

std::string fmt(const char* label, double v) {
  std::ostringstream s;
  s << label << "=" << v;
  return s.str();
}

OperatorSpec grid(OperatorFamily f, std::vector<Index> shape, Boundary b = Boundary::Free, double h = 1.0) {
  OperatorSpec s;
  s.family = f;
  s.shape = std::move(shape);
  s.boundary = b;
  s.spacing = h;
  return s;
}

ScalarGraph random_graph(std::mt19937_64& rng) {
  switch (uniform(rng, Index{0}, Index{4})) {
    case 0: return SignGraph{};
    case 1: return PowerGraph{uniform(rng, 1.5, 4.0)};
    case 2: return ClampGraph{-uniform(rng, 0.1, 1.0), uniform(rng, 0.1, 1.0)};
    case 3: return RelayGraph{uniform(rng, 0.5, 2.0)};
    default: return LinearGraph{uniform(rng, 0.0, 2.0)};
  }
}

Relation random_diagonal(std::mt19937_64& rng, Index dim) {
  std::vector<ScalarGraph> graphs;
  for (Index i = 0; i < dim; ++i) graphs.push_back(random_graph(rng));
  return make_diagonal(uniform(rng, 0.3, 2.0), std::move(graphs));
}

// A random grid pair for the boundary value problems.
OperatorPair random_pair(std::mt19937_64& rng) {
  switch (uniform(rng, Index{0}, Index{2})) {
    case 0: return operator_pair(grid(OperatorFamily::Grad1D, {uniform(rng, Index{3}, Index{8})}));
    case 1:
      return operator_pair(grid(OperatorFamily::Grad2D, {uniform(rng, Index{3}, Index{5}), uniform(rng, Index{3}, Index{4})},
                                Boundary::Free, uniform(rng, 0.5, 1.5)));
    default: return operator_pair(grid(OperatorFamily::SymGrad2D, {3, uniform(rng, Index{3}, Index{4})}));
  }
}

SolverOptions with_tol(double tol) {
  SolverOptions o;
  o.tol = tol;
  return o;
}

// Unitarity of A: N(A)^perp with the H1(B) norm onto R(A), and of A^T:
// R(A) onto N(A)^perp with the H-1(B) norm.
Outcome unitarity() {
  std::mt19937_64 rng(101);
  Worst h1, hm1;
  for (int trial = 0; trial < 25; ++trial) {
    const Index m = uniform(rng, Index{1}, Index{20});
    const Index n = uniform(rng, Index{1}, Index{15});
    const Index r = uniform(rng, Index{0}, std::min(m, n));
    const RestrictedOperator ctx{LinearMap(ellinc::testing::random_rank(rng, m, n, r))};
    for (int k = 0; k < 10; ++k) {
      const Vector x = ctx.ran_adj().project(gaussian(rng, n));
      h1.add(std::abs(ctx.full_map().apply(x).norm() - sobolev_norm(ctx, SobolevNormKind::H1_B, x)));
      const Vector y = ctx.ran().project(gaussian(rng, m));
      const Vector aty = ctx.ran_adj().project(ctx.full_map().apply_adjoint(y));
      hm1.add(std::abs(sobolev_norm(ctx, SobolevNormKind::Hm1_B, aty) - y.norm()) / std::max(1.0, y.norm()));
    }
  }
  return {h1.value == 0.0 && hm1.value <= 1e-9, fmt("max_H1_gap", h1.value) + " " + fmt("max_Hm1_gap", hm1.value)};
}

// Nonexpansive resolvents and the 1/c bound for inverses.
Outcome resolvents() {
  std::mt19937_64 rng(202);
  Worst nonexp, inv;
  const std::array<double, 3> lambdas{0.1, 1.0, 10.0};
  for (int family = 0; family < 4; ++family) {
    for (int pair = 0; pair < 200; ++pair) {
      const Index n = uniform(rng, Index{1}, Index{6});
      std::vector<ScalarGraph> graphs(static_cast<std::size_t>(n));
      const double c = uniform(rng, 0.2, 2.0);
      Relation a = make_scaled_identity(n, c);
      switch (family) {
        case 0: a = make_linear(ellinc::testing::random_pd(rng, n, c)); break;
        case 1: std::fill(graphs.begin(), graphs.end(), SignGraph{}); a = make_diagonal(c, graphs); break;
        case 2:
          for (auto& g : graphs) g = PowerGraph{uniform(rng, 1.2, 5.0)};
          a = make_diagonal(c, graphs);
          break;
        default:
          for (auto& g : graphs) g = random_graph(rng);
          a = make_diagonal(c, graphs);
          break;
      }
      const Vector z1 = gaussian(rng, n, 3.0), z2 = gaussian(rng, n, 3.0);
      for (double lambda : lambdas) {
        const double gap = (a.resolvent(lambda, z1) - a.resolvent(lambda, z2)).norm() - (z1 - z2).norm();
        nonexp.add(gap);
      }
      inv.add((a.inverse(z1) - a.inverse(z2)).norm() - (z1 - z2).norm() / a.c());
    }
  }
  return {nonexp.value <= 1e-12 && inv.value <= 1e-10,
          fmt("max_expansion", nonexp.value) + " " + fmt("max_inverse_excess", inv.value)};
}

// Linear relations: pipeline against the direct reduced solve.
Outcome factorization() {
  std::mt19937_64 rng(303);
  Worst rel;
  for (int trial = 0; trial < 25; ++trial) {
    const Index m = uniform(rng, Index{2}, Index{12});
    const Index n = uniform(rng, Index{1}, Index{10});
    const Index r = uniform(rng, Index{1}, std::min(m, n));
    const LinearMap a(ellinc::testing::random_rank(rng, m, n, r));
    const Matrix mm = ellinc::testing::random_pd(rng, m, uniform(rng, 0.2, 2.0));
    const Vector f = RestrictedOperator(a).ran_adj().project(gaussian(rng, n));
    const Solution s = solve(Problem::homogeneous(a, make_linear(mm), f, with_tol(1e-13)));
    const Vector ref = oracle::linear_direct_solve(a, mm, f);
    rel.add((s.u - ref).norm() / std::max(ref.norm(), 1e-300));
  }
  return {rel.value <= 1e-9, fmt("max_relative_error", rel.value)};
}

// The solution map has Lipschitz constant exactly |a^{-1}|_Lip.
Outcome lipschitz_equality() {
  const LinearMap grad = build_operator(grid(OperatorFamily::Grad2D, {3, 3}, Boundary::ZeroBoundary)).matrix;
  double worst = 0.0;
  for (double c : {0.5, 2.0, 3.0}) {
    const LipschitzReport r = lipschitz_probe(
        Problem::homogeneous(grad, make_scaled_identity(grad.rows(), c), Vector::Zero(grad.cols()), with_tol(1e-13)),
        50, 17);
    worst = std::max({worst, std::abs(r.max_ratio - 1.0 / c), std::abs(r.min_ratio - 1.0 / c)});
  }

  // Full range A (orthonormal rows) and symmetric M with eigenvalues {1, 4}.
  std::mt19937_64 rng(404);
  const Matrix q = Eigen::HouseholderQR<Matrix>(ellinc::testing::gaussian_matrix(rng, 3, 3)).householderQ();
  const LinearMap a(q.topRows(2));
  const Matrix v = Eigen::HouseholderQR<Matrix>(ellinc::testing::gaussian_matrix(rng, 2, 2)).householderQ();
  const Matrix m = v * Eigen::Vector2d(1.0, 4.0).asDiagonal() * v.transpose();
  const LipschitzReport sup = lipschitz_probe(Problem::homogeneous(a, make_linear(m), Vector::Zero(3), with_tol(1e-13)), 500, 23);
  const bool ok = worst <= 1e-10 && sup.max_ratio >= 0.99 && sup.max_ratio <= 1.0 + 1e-8;
  return {ok, fmt("max_ratio_gap", worst) + " " + fmt("pd_sup_ratio", sup.max_ratio) + " (1/lambda_min=1)"};
}

// Sign-diagonal relations against the branch enumeration and the convex
// minimization oracles.
Outcome multivalued() {
  std::mt19937_64 rng(505);
  Worst active, convex;
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = uniform(rng, Index{1}, Index{6});
    const Index n = uniform(rng, Index{1}, Index{5});
    const Index r = uniform(rng, Index{1}, std::min(m, n));
    const LinearMap a(ellinc::testing::random_rank(rng, m, n, r));
    const double c = uniform(rng, 0.3, 2.0);
    const std::vector<ScalarGraph> graphs(static_cast<std::size_t>(m), SignGraph{});
    const Vector f = RestrictedOperator(a).ran_adj().project(gaussian(rng, n, 2.0));
    const Solution s = solve(Problem::homogeneous(a, make_diagonal(c, graphs), f, with_tol(1e-13)));
    const Vector ua = oracle::active_set_solve(a, c, graphs, f).u;
    const Vector uc = oracle::convex_min_solve(a, c, graphs, f);
    active.add((s.u - ua).norm() / std::max(1.0, ua.norm()));
    convex.add((s.u - uc).norm() / std::max(1.0, uc.norm()));
  }
  return {active.value <= 1e-8 && convex.value <= 1e-6,
          fmt("max_active_set_delta", active.value) + " " + fmt("max_convex_min_delta", convex.value)};
}

Outcome dirichlet() {
  // Harmonic ramp: boundary data that already solves the equation.
  const OperatorPair pair = operator_pair(grid(OperatorFamily::Grad1D, {6}));
  const LinearMap& a = pair.zero_boundary.matrix;
  const LinearMap& cm = pair.free.matrix;
  const Vector ramp = Vector::LinSpaced(6, -1.0, 4.0);
  const Relation sign = make_diagonal(1.0, std::vector<ScalarGraph>(5, SignGraph{}));
  const Solution sr = solve(Problem::dirichlet(a, cm, pair.inclusion, sign, Vector::Zero(4), ramp, with_tol(1e-13)));
  const double ramp_gap = (sr.u - ramp).norm();

  // u0 = 0 reduces to the homogeneous problem.
  std::mt19937_64 rng(606);
  const Vector f0 = gaussian(rng, 4);
  const Solution sd = solve(Problem::dirichlet(a, cm, pair.inclusion, sign, f0, Vector::Zero(6), with_tol(1e-14)));
  const Solution sh = solve(Problem::homogeneous(a, sign, f0, with_tol(1e-14)));
  const double zero_gap = (sd.u - pair.inclusion.basis() * sh.u).norm();

  Worst cert;
  for (int trial = 0; trial < 50; ++trial) {
    const OperatorPair p = random_pair(rng);
    const LinearMap& za = p.zero_boundary.matrix;
    const LinearMap& fc = p.free.matrix;
    const Relation rel = random_diagonal(rng, za.rows());
    const Vector f = gaussian(rng, za.cols());
    const Vector u0 = gaussian(rng, fc.cols());
    const Solution s = solve(Problem::dirichlet(za, fc, p.inclusion, rel, f, u0, with_tol(1e-12)));
    cert.add(graph_residual(rel, fc.apply(s.u), s.certificate.y));
    cert.add((za.apply_adjoint(s.certificate.y) - f).norm());
    cert.add(p.inclusion.reject(s.u - u0).norm());
  }
  const bool ok = ramp_gap <= 1e-10 && zero_gap <= 1e-12 && cert.value <= 1e-9;
  return {ok, fmt("ramp_gap", ramp_gap) + " " + fmt("zero_data_gap", zero_gap) + " " +
                  fmt("max_certificate_residual", cert.value)};
}

Outcome neumann() {
  std::mt19937_64 rng(707);
  // Kernel data with the identity relation gives u = 0.
  const OperatorPair p5 = operator_pair(grid(OperatorFamily::Grad2D, {4, 3}));
  SolverOptions accept = with_tol(1e-12);
  accept.accept_kernel_rhs = true;
  const Vector constant = Vector::Constant(12, 1.7);
  const double kernel_u =
      solve(Problem::neumann(p5.free.matrix, p5.inclusion, make_scaled_identity(p5.free.matrix.rows(), 1.0), constant,
                             std::nullopt, accept))
          .u.norm();

  Worst weak, boundary, unique;
  for (int trial = 0; trial < 50; ++trial) {
    const OperatorPair p = random_pair(rng);
    const LinearMap& a = p.free.matrix;
    const RestrictedOperator ctx(a);
    const Relation rel = random_diagonal(rng, a.rows());
    const Vector f = ctx.ran_adj().project(gaussian(rng, a.cols()));
    const Vector u0 = gaussian(rng, a.rows());
    SolverOptions o1 = with_tol(1e-12), o2 = with_tol(1e-12);
    o2.dr_start = gaussian(rng, a.rows(), 5.0);
    const Solution s1 = solve(Problem::neumann(a, p.inclusion, rel, f, u0, o1));
    const Solution s2 = solve(Problem::neumann(a, p.inclusion, rel, f, u0, o2));
    unique.add((s1.u - s2.u).norm());

    const NeumannSpaces spaces = neumann_spaces(ctx, p.inclusion);
    const Vector& v = s1.w;
    for (Index j = 0; j < spaces.w.dim(); ++j) {
      const Vector z = spaces.w.basis().col(j);
      weak.add(std::abs(f.dot(z) - v.dot(a.apply(z))));
    }
    for (Index j = 0; j < spaces.w_perp.dim(); ++j) {
      const Vector x = spaces.w_perp.basis().col(j);
      boundary.add(std::abs((v - u0).dot(a.apply(x))));
    }
  }
  const bool ok = kernel_u <= 1e-9 && weak.value <= 1e-8 && boundary.value <= 1e-8 && unique.value <= 1e-8;
  return {ok, fmt("kernel_rhs_norm_u", kernel_u) + " " + fmt("max_weak_residual", weak.value) + " " +
                  fmt("max_boundary_residual", boundary.value) + " " + fmt("max_start_gap", unique.value)};
}

Outcome estimates() {
  std::mt19937_64 rng(808);
  Worst dir, neu;
  std::size_t count = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const OperatorPair p = random_pair(rng);
    const LinearMap& za = p.zero_boundary.matrix;
    const LinearMap& fc = p.free.matrix;
    const bool linear = trial % 2 == 0;
    const double c = uniform(rng, 0.3, 2.0);
    const Relation rel =
        linear ? make_linear(ellinc::testing::random_pd(rng, za.rows(), c, 0.5)) : random_diagonal(rng, za.rows());
    const Vector u0 = gaussian(rng, fc.cols());
    const Vector v0 = linear ? Vector(gaussian(rng, fc.cols())) : u0;
    const Problem d1 = Problem::dirichlet(za, fc, p.inclusion, rel, gaussian(rng, za.cols()), u0, with_tol(1e-12));
    const Problem d2 = Problem::dirichlet(za, fc, p.inclusion, rel, gaussian(rng, za.cols()), v0, with_tol(1e-12));
    const EstimateReport e = verify_dirichlet_estimate(d1, d2, solve(d1), solve(d2));
    dir.add(e.lhs - e.rhs);

    const RestrictedOperator ctx(fc);
    const Problem n1 = Problem::neumann(fc, p.inclusion, rel, ctx.ran_adj().project(gaussian(rng, fc.cols())),
                                        gaussian(rng, fc.rows()), with_tol(1e-12));
    const Problem n2 = Problem::neumann(fc, p.inclusion, rel, ctx.ran_adj().project(gaussian(rng, fc.cols())),
                                        gaussian(rng, fc.rows()), with_tol(1e-12));
    const EstimateReport g = verify_neumann_estimate(n1, n2, solve(n1), solve(n2));
    neu.add(g.lhs - g.rhs);
    count += 2;
  }
  return {dir.value <= 1e-9 && neu.value <= 1e-9,
          fmt("max_dirichlet_excess", dir.value) + " " + fmt("max_neumann_excess", neu.value) + " pairs=" +
              std::to_string(count)};
}

// Projected inverse on random subspaces; outputs must be c-strongly
// monotone among themselves.
Outcome projection() {
  std::mt19937_64 rng(909);
  const double tol = 1e-10;
  Worst mono, membership;
  std::size_t failures = 0, triples = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = uniform(rng, Index{1}, Index{8});
    const Relation a = trial % 3 == 0 ? make_linear(ellinc::testing::random_pd(rng, n, uniform(rng, 0.3, 2.0)))
                                      : random_diagonal(rng, n);
    const Subspace u = Subspace::spanned_by(ellinc::testing::gaussian_matrix(rng, n, uniform(rng, Index{1}, n)));
    std::vector<GraphPoint> points;
    for (int k = 0; k < 8; ++k) {
      ++triples;
      const Vector w = u.project(gaussian(rng, n, 2.0));
      try {
        DouglasRachfordOptions o;
        o.tol = tol;
        const ProjectedSolution s = projected_inverse(a, u, w, o);
        membership.add(s.point.residual);
        membership.add(u.reject(s.point.x).norm());
        membership.add((u.project(s.point.y) - w).norm());
        points.push_back(s.point);
      } catch (const ConvergenceError&) {
        ++failures;
      }
    }
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j) {
        const Vector dx = points[i].x - points[j].x;
        mono.add(a.c() * dx.squaredNorm() - dx.dot(points[i].y - points[j].y));
      }
  }
  const bool ok = failures == 0 && mono.value <= 10 * tol && membership.value <= 10 * tol;
  return {ok, "triples=" + std::to_string(triples) + " failures=" + std::to_string(failures) + " " +
                  fmt("max_monotonicity_deficit", mono.value) + " " + fmt("max_membership_residual", membership.value)};
}

// Exact trace-sum over base points for a free symmetric gradient.
double trace_sum(const Vector& u, Index nx, Index ny, double h) {
  const Index n = nx * ny;
  auto at = [&](Index comp, Index i, Index j) { return u(comp * n + i + nx * j); };
  double total = 0.0;
  for (Index j = 0; j + 1 < ny; ++j)
    for (Index i = 0; i + 1 < nx; ++i) {
      const double e11 = (at(0, i + 1, j) - at(0, i, j)) / h;
      const double e22 = (at(1, i, j + 1) - at(1, i, j)) / h;
      const double e12 = 0.5 * ((at(0, i, j + 1) - at(0, i, j)) / h + (at(1, i + 1, j) - at(1, i, j)) / h);
      total += h * h * (e11 * e11 + e22 * e22 + 2.0 * e12 * e12);
    }
  return total;
}

Outcome builders() {
  bool ok = true;
  std::ostringstream detail;
  for (const auto& s : {grid(OperatorFamily::Grad1D, {7}), grid(OperatorFamily::Grad2D, {4, 5}, Boundary::Free, 0.3),
                        grid(OperatorFamily::Grad3D, {3, 2, 4})}) {
    const BuiltOperator op = build_operator(s);
    const bool constants = kernel_basis(op.matrix).dim() == 1 &&
                           op.matrix.apply(Vector::Ones(op.matrix.cols())).cwiseAbs().maxCoeff() == 0.0;
    ok = ok && constants;
  }
  double min_poincare = INFINITY;
  for (const auto& s : {grid(OperatorFamily::Grad1D, {6}, Boundary::ZeroBoundary),
                        grid(OperatorFamily::Grad2D, {4, 3}, Boundary::ZeroBoundary),
                        grid(OperatorFamily::Grad3D, {2, 3, 2}, Boundary::ZeroBoundary),
                        grid(OperatorFamily::SymGrad2D, {3, 3}, Boundary::ZeroBoundary)})
    min_poincare = std::min(min_poincare, poincare_constant(build_operator(s)));
  ok = ok && min_poincare > 0.0;

  const Matrix cg = build_operator(grid(OperatorFamily::Curl3D, {4, 4, 4})).matrix.dense() *
                    build_operator(grid(OperatorFamily::Grad3D, {4, 4, 4})).matrix.dense();
  const double curl_grad = cg.cwiseAbs().maxCoeff();
  ok = ok && curl_grad == 0.0;

  std::mt19937_64 rng(1010);
  Worst voigt;
  for (double h : {1.0, 0.5, 0.2}) {
    const BuiltOperator op = build_operator(grid(OperatorFamily::SymGrad2D, {4, 3}, Boundary::Free, h));
    for (int k = 0; k < 20; ++k) {
      const Vector u = gaussian(rng, op.matrix.cols());
      const double ref = trace_sum(u, 4, 3, h);
      voigt.add(std::abs(op.matrix.apply(u).squaredNorm() - ref) / std::max(1.0, ref));
    }
  }
  ok = ok && voigt.value <= 1e-12;
  detail << fmt("min_poincare", min_poincare) << " " << fmt("curl_grad_max", curl_grad) << " "
         << fmt("max_voigt_gap", voigt.value);
  return {ok, detail.str()};
}

std::string run_capture(const std::string& command, int& status) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  status = pclose(pipe);
  return out;
}

Outcome cli_determinism(const std::string& cli, const std::string& config_dir) {
  std::size_t compared = 0;
  for (const char* name : {"poisson1d.json", "dirichlet_ramp_sign.json", "elasticity_power.json"}) {
    std::vector<std::string> runs;
    for (int k = 0; k < 3; ++k) {
      int status = 0;
      const std::string out =
          run_capture("'" + cli + "' verify --config '" + config_dir + "/" + name + "' --seed 7", status);
      if (status != 0) return {false, std::string("non-zero exit for ") + name};
      nlohmann::json doc = nlohmann::json::parse(out);
      doc.erase("timing_ms");
      runs.push_back(doc.dump(2));
    }
    if (runs[0] != runs[1] || runs[1] != runs[2]) return {false, std::string("reports differ for ") + name};
    ++compared;
  }
  return {true, "configs=" + std::to_string(compared) + " runs_each=3"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: " << argv[0] << " PATH_TO_CLI CONFIG_DIR\n";
    return 2;
  }
  const std::string cli = argv[1], config_dir = argv[2];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"unitarity", unitarity},
      {"resolvents", resolvents},
      {"factorization", factorization},
      {"lipschitz_equality", lipschitz_equality},
      {"multivalued_oracles", multivalued},
      {"dirichlet", dirichlet},
      {"neumann", neumann},
      {"continuity_estimates", estimates},
      {"projection", projection},
      {"operator_builders", builders},
      {"cli_determinism", [&] { return cli_determinism(cli, config_dir); }},
  };
  bool all = true;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << index << " " << name << ": " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
