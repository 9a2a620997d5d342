#include "ellinc/solver.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ellinc/errors.hpp"

namespace ellinc {

namespace {

struct Reduced {
  Vector u;  // in N(A)^perp
  Vector g;  // A u
  Vector v;  // (g, v) in a, P v = w
  Vector w;  // (B^*)^{-1} f
  double graph_residual = 0.0;
  std::size_t iterations = 0;
};

// u = B^{-1} (P a P^*)^{-1} (B^*)^{-1} f.
Reduced solve_reduced(const RestrictedOperator& ctx, const Relation& a, const Vector& f,
                      const SolverOptions& opt) {
  Reduced r;
  r.w = b_star_inverse(ctx, f);
  if (opt.range_coordinates) {
    if (a.dim() != ctx.rank()) {
      throw InputError("relation dimension " + std::to_string(a.dim()) +
                       " != rank(A) = " + std::to_string(ctx.rank()) + " in range coordinates");
    }
    const Vector wc = ctx.ran().coordinates(r.w);
    const Vector gc = a.inverse(wc);
    r.graph_residual = graph_residual(a, gc, wc);
    r.g = ctx.ran().lift(gc);
    r.v = r.w;
  } else {
    if (a.dim() != ctx.full_map().rows()) {
      throw InputError("relation dimension " + std::to_string(a.dim()) +
                       " != rows(A) = " + std::to_string(ctx.full_map().rows()));
    }
    DouglasRachfordOptions dr;
    dr.lambda = opt.lambda;
    dr.tol = opt.tol;
    dr.max_iter = opt.max_iter;
    dr.start = opt.dr_start;
    const ProjectedSolution ps = projected_inverse(a, ctx.ran(), r.w, dr);
    r.g = ps.point.x;
    r.v = ps.point.y;
    r.graph_residual = ps.point.residual;
    r.iterations = ps.iterations;
  }
  r.u = b_inverse(ctx, ctx.ran().project(r.g));
  return r;
}

void require_rhs_length(const Vector& f, Index n) {
  if (f.size() != n) {
    throw InputError("right-hand side length " + std::to_string(f.size()) +
                     " != domain dimension " + std::to_string(n));
  }
}

void add_norms(Solution& s, const RestrictedOperator& ctx, const Vector& u_reduced,
               const Vector& f) {
  s.diagnostics["kernel_leak_u"] = ctx.ker().project(u_reduced).norm();
  s.diagnostics["norm_u_H1_B"] = ctx.full_map().apply(u_reduced).norm();
  s.diagnostics["norm_u_H0"] = s.u.norm();
  s.diagnostics["norm_f_H0"] = f.norm();
  s.diagnostics["norm_f_Hm1_B"] = ctx.solve_bt(ctx.ran_adj().coordinates(f)).norm();
}

// Certificate relation for homogeneous/Dirichlet problems in range
// coordinates lives on R(A) coordinates; membership is checked there.
double certificate_residual(const RestrictedOperator& ctx, const Relation& a, const Vector& x,
                            const Vector& y, bool range_coordinates) {
  if (range_coordinates)
    return graph_residual(a, ctx.ran().coordinates(x), ctx.ran().coordinates(y));
  return graph_residual(a, x, y);
}

bool same_relation(const Relation& a, const Relation& b) {
  if (a.dim() != b.dim() || a.c() != b.c()) return false;
  if (a.shift_input() != b.shift_input() || a.shift_output() != b.shift_output()) return false;
  const auto* la = std::get_if<LinearPD>(&a.descriptor());
  const auto* lb = std::get_if<LinearPD>(&b.descriptor());
  if (la || lb) return la && lb && la->matrix == lb->matrix;
  return a.describe() == b.describe();
}

void require_same_setup(const Problem& p1, const Problem& p2, ProblemKind kind) {
  if (p1.kind != kind || p2.kind != kind) {
    throw InputError(std::string("estimate needs two ") + to_string(kind) + " problems");
  }
  if (p1.a.dense() != p2.a.dense()) throw InputError("estimate problems use different A");
  if (!same_relation(p1.relation, p2.relation))
    throw InputError("estimate problems use different relations");
  if (p1.inclusion.has_value() != p2.inclusion.has_value() ||
      (p1.inclusion && p1.inclusion->basis() != p2.inclusion->basis()))
    throw InputError("estimate problems use different inclusion subspaces");
  if (p1.c.has_value() != p2.c.has_value() || (p1.c && p1.c->dense() != p2.c->dense()))
    throw InputError("estimate problems use different C");
}

}  // namespace

const char* to_string(ProblemKind kind) noexcept {
  switch (kind) {
    case ProblemKind::Homogeneous: return "homogeneous";
    case ProblemKind::Dirichlet: return "dirichlet";
    case ProblemKind::Neumann: return "neumann";
  }
  return "unknown";
}

Problem Problem::homogeneous(LinearMap a, Relation relation, Vector f, SolverOptions options) {
  return Problem{ProblemKind::Homogeneous, std::move(a),        std::nullopt, std::nullopt,
                 std::move(relation),      std::move(f),        std::nullopt, std::move(options)};
}

Problem Problem::dirichlet(LinearMap a, LinearMap c, Subspace inclusion, Relation relation,
                           Vector f, Vector u0, SolverOptions options) {
  return Problem{ProblemKind::Dirichlet, std::move(a), std::move(c),  std::move(inclusion),
                 std::move(relation),    std::move(f), std::move(u0), std::move(options)};
}

Problem Problem::neumann(LinearMap a, Subspace inclusion, Relation relation, Vector f,
                         std::optional<Vector> u0, SolverOptions options) {
  return Problem{ProblemKind::Neumann, std::move(a), std::nullopt,  std::move(inclusion),
                 std::move(relation),  std::move(f), std::move(u0), std::move(options)};
}

Solution solve_homogeneous(const Problem& p) {
  require_rhs_length(p.f, p.a.cols());
  const RestrictedOperator ctx(p.a, kDefaultTol);
  const Reduced r = solve_reduced(ctx, p.relation, p.f, p.options);

  Solution s;
  s.u = r.u;
  s.w = r.w;
  s.iterations = r.iterations;
  s.certificate = {p.a.apply(r.u), r.v, 0.0};
  s.certificate.residual =
      certificate_residual(ctx, p.relation, s.certificate.x, r.v, p.options.range_coordinates);
  s.diagnostics["graph_residual"] = s.certificate.residual;
  s.diagnostics["adjoint_residual"] = (p.a.apply_adjoint(r.v) - p.f).norm();
  s.diagnostics["dr_iterations"] = static_cast<double>(r.iterations);
  add_norms(s, ctx, r.u, p.f);
  return s;
}

Solution solve_dirichlet(const Problem& p) {
  if (!p.c) throw InputError("Dirichlet problem needs the extension operator C");
  if (!p.inclusion) throw InputError("Dirichlet problem needs the inclusion subspace");
  if (!p.u0) throw InputError("Dirichlet problem needs boundary data u0");
  const LinearMap& c = *p.c;
  const Subspace& incl = *p.inclusion;
  if (incl.ambient_dim() != c.cols() || incl.dim() != p.a.cols())
    throw InputError("inclusion subspace does not match the domains of A and C");
  if (c.rows() != p.a.rows()) throw InputError("A and C must share a codomain");
  if (p.u0->size() != c.cols()) throw InputError("u0 length must equal cols(C)");
  const Matrix mismatch = c.dense() * incl.basis() - p.a.dense();
  if (mismatch.size() && mismatch.cwiseAbs().maxCoeff() >
                             p.options.tol * std::max(1.0, p.a.dense().cwiseAbs().maxCoeff())) {
    throw InputError("A is not C restricted to the inclusion subspace");
  }
  require_rhs_length(p.f, p.a.cols());

  const Vector cu0 = c.apply(*p.u0);
  const Relation shifted = p.relation.shifted(cu0, Vector::Zero(c.rows()));
  const RestrictedOperator ctx(p.a, kDefaultTol);
  const Reduced r = solve_reduced(ctx, shifted, p.f, p.options);

  Solution s;
  s.u = incl.lift(r.u) + *p.u0;
  s.w = r.w;
  s.iterations = r.iterations;
  s.certificate = {c.apply(s.u), r.v, 0.0};
  s.certificate.residual =
      certificate_residual(ctx, p.relation, s.certificate.x, r.v, p.options.range_coordinates);
  s.diagnostics["graph_residual"] = s.certificate.residual;
  s.diagnostics["shifted_graph_residual"] =
      certificate_residual(ctx, shifted, p.a.apply(r.u), r.v, p.options.range_coordinates);
  s.diagnostics["adjoint_residual"] = (p.a.apply_adjoint(r.v) - p.f).norm();
  s.diagnostics["inclusion_residual"] = incl.reject(s.u - *p.u0).norm();
  s.diagnostics["dr_iterations"] = static_cast<double>(r.iterations);
  add_norms(s, ctx, r.u, p.f);
  return s;
}

NeumannSpaces neumann_spaces(const RestrictedOperator& ctx, const Subspace& inclusion) {
  const LinearMap& a = ctx.full_map();
  Subspace w = ctx.ran_adj().intersect(inclusion);
  if (w.dim() == 0) return {std::move(w), ctx.ran_adj()};
  // x in N(A)^perp is <A.,A.>-orthogonal to W iff Ax is orthogonal to A W.
  const Subspace aw = Subspace::spanned_by(a.dense() * w.basis());
  const Subspace y = ctx.ran().intersect(aw.orthogonal_complement());
  if (y.dim() == 0) return {std::move(w), Subspace::trivial(a.cols())};
  Matrix x(a.cols(), y.dim());
  for (Index j = 0; j < y.dim(); ++j) x.col(j) = b_inverse(ctx, y.basis().col(j));
  return {std::move(w), Subspace::spanned_by(x)};
}

Solution solve_neumann(const Problem& p) {
  if (!p.inclusion) throw InputError("Neumann problem needs the subspace D(C)");
  const LinearMap& a = p.a;
  if (p.inclusion->ambient_dim() != a.cols())
    throw InputError("inclusion subspace does not live in the domain of A");
  require_rhs_length(p.f, a.cols());
  const Vector u0 = p.u0.value_or(Vector::Zero(a.rows()));
  if (u0.size() != a.rows()) throw InputError("u0 length must equal rows(A)");

  const RestrictedOperator ctx(a, kDefaultTol);
  // f - A^T u0 restricted to N(A); A^T u0 never has such a component.
  const double compatibility = ctx.ker().project(p.f).norm();
  if (compatibility > ctx.tol() * std::max(1.0, p.f.norm()) && !p.options.accept_kernel_rhs) {
    std::ostringstream msg;
    msg << "right-hand side has a N(A) component of size " << compatibility;
    throw DomainError(msg.str(), "rhs_not_in_H_minus_1");
  }

  const NeumannSpaces spaces = neumann_spaces(ctx, *p.inclusion);
  const Matrix& z = spaces.w.basis();
  const Vector functional = p.f - a.apply_adjoint(u0);
  Vector g = Vector::Zero(a.cols());
  if (spaces.w.dim() > 0) {
    // <g, x> = <f - A^T u0, Q x> with Q the <A.,A.>-projection onto W.
    const Matrix az = a.dense() * z;
    const Matrix gram = az.transpose() * az;
    const Vector coeff = gram.llt().solve(z.transpose() * functional);
    g = a.dense().transpose() * (az * coeff);
    g = ctx.ran_adj().project(g);
  }

  const Relation shifted = p.relation.shifted(Vector::Zero(a.rows()), u0);
  const Reduced r = solve_reduced(ctx, shifted, g, p.options);
  const Vector v = r.v + u0;

  Solution s;
  s.u = r.u;
  s.w = v;
  s.iterations = r.iterations;
  s.certificate = {a.apply(r.u), v, 0.0};
  s.certificate.residual =
      certificate_residual(ctx, p.relation, s.certificate.x, v, p.options.range_coordinates);
  s.diagnostics["graph_residual"] = s.certificate.residual;
  s.diagnostics["compatibility"] = compatibility;

  double weak = 0.0;
  for (Index i = 0; i < z.cols(); ++i) {
    const Vector zi = z.col(i);
    weak = std::max(weak, std::abs(p.f.dot(zi) - v.dot(a.apply(zi))));
  }
  s.diagnostics["weak_equation_residual"] = weak;

  double boundary = 0.0, rhs_on_perp = 0.0;
  const Matrix& xp = spaces.w_perp.basis();
  for (Index j = 0; j < xp.cols(); ++j) {
    const Vector xj = xp.col(j);
    boundary = std::max(boundary, std::abs((v - u0).dot(a.apply(xj))));
    rhs_on_perp = std::max(rhs_on_perp, std::abs(functional.dot(xj)));
  }
  s.diagnostics["boundary_condition_residual"] = boundary;
  s.diagnostics["rhs_on_w_perp"] = rhs_on_perp;
  s.diagnostics["dim_w"] = static_cast<double>(spaces.w.dim());
  s.diagnostics["dr_iterations"] = static_cast<double>(r.iterations);
  add_norms(s, ctx, r.u, ctx.ran_adj().project(p.f));
  s.diagnostics["norm_f_H0"] = p.f.norm();
  s.diagnostics["norm_xi_Hm1_B"] = ctx.solve_bt(ctx.ran_adj().coordinates(g)).norm();
  return s;
}

Solution solve(const Problem& p) {
  switch (p.kind) {
    case ProblemKind::Homogeneous: return solve_homogeneous(p);
    case ProblemKind::Dirichlet: return solve_dirichlet(p);
    case ProblemKind::Neumann: return solve_neumann(p);
  }
  throw InputError("unknown problem kind");
}

bool certificate_ok(const Problem& p, const Solution& s) {
  const double bound = 10.0 * p.options.tol;
  auto within = [&](const char* key) {
    const auto it = s.diagnostics.find(key);
    return it == s.diagnostics.end() || it->second <= bound;
  };
  return within("graph_residual") && within("adjoint_residual") &&
         within("weak_equation_residual") && within("boundary_condition_residual") &&
         within("inclusion_residual");
}

EstimateReport verify_dirichlet_estimate(const Problem& p1, const Problem& p2, const Solution& s1,
                                         const Solution& s2) {
  require_same_setup(p1, p2, ProblemKind::Dirichlet);
  const LinearMap& c = *p1.c;
  const Vector du0 = *p1.u0 - *p2.u0;
  const Vector cdu0 = c.apply(du0);
  const double cst = p1.relation.c();

  double w0 = 0.0;
  const auto* linear = std::get_if<LinearPD>(&p1.relation.descriptor());
  if (linear && !p1.relation.is_shifted()) {
    w0 = (linear->matrix.transpose() * cdu0).norm();
  } else if (du0.norm() > 1e-14 * std::max(1.0, p1.u0->norm())) {
    throw CapabilityError(
        "Dirichlet estimate needs a linear relation or identical boundary data");
  }

  const RestrictedOperator ctx(p1.a, kDefaultTol);
  const LinearMap c_restricted(c.dense() * p1.inclusion->basis());
  const double l1 = embedding_constant(ctx, c_restricted);
  const double df = sobolev_norm(ctx, SobolevNormKind::Hm1_B, p1.f - p2.f);
  const double dc0 = cdu0.norm();
  const double k = (2.0 / cst) * df * dc0 + (df + w0) * (df + w0) / (cst * cst);

  EstimateReport rep;
  rep.lhs = sobolev_norm(ctx, SobolevNormKind::H1_C_plus_i, s1.u - s2.u, &c);
  rep.rhs = l1 * std::sqrt(k) + l1 * dc0 + sobolev_norm(ctx, SobolevNormKind::H1_C_plus_i, du0, &c);
  rep.constants = {{"L1", l1}, {"c", cst}, {"inv_c", 1.0 / cst}, {"w0", w0},
                   {"f_minus_g_Hm1_B", df}, {"C_du0", dc0}};
  rep.pass = rep.lhs <= rep.rhs + 1e-9;
  return rep;
}

EstimateReport verify_neumann_estimate(const Problem& p1, const Problem& p2, const Solution& s1,
                                       const Solution& s2) {
  require_same_setup(p1, p2, ProblemKind::Neumann);
  const LinearMap& a = p1.a;
  const Vector zero = Vector::Zero(a.rows());
  const Vector du0 = p1.u0.value_or(zero) - p2.u0.value_or(zero);
  const RestrictedOperator ctx(a, kDefaultTol);
  const NeumannSpaces spaces = neumann_spaces(ctx, *p1.inclusion);
  const double cst = p1.relation.c();

  double sup = 0.0;
  if (spaces.w.dim() > 0) {
    const Matrix& z = spaces.w.basis();
    const Matrix az = a.dense() * z;
    const Matrix gram = az.transpose() * az;
    const Vector d = z.transpose() * ((p1.f - p2.f) - a.apply_adjoint(du0));
    sup = std::sqrt(std::max(0.0, d.dot(gram.llt().solve(d))));
  }
  const double boundary = ctx.ran().project(du0).norm();

  EstimateReport rep;
  rep.lhs = a.apply(s1.u - s2.u).norm();
  rep.rhs = (sup + boundary) / cst;
  rep.constants = {{"c", cst}, {"inv_c", 1.0 / cst}, {"functional_sup", sup},
                   {"P_du0", boundary}};
  rep.pass = rep.lhs <= rep.rhs + 1e-9;
  return rep;
}

LipschitzReport lipschitz_probe(const Problem& tmpl, std::size_t pairs, std::uint64_t seed) {
  if (tmpl.kind != ProblemKind::Homogeneous)
    throw InputError("lipschitz_probe needs a homogeneous template");
  const RestrictedOperator ctx(tmpl.a, kDefaultTol);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto sample = [&] {
    Vector f(tmpl.a.cols());
    for (Index i = 0; i < f.size(); ++i) f(i) = normal(rng);
    return ctx.ran_adj().project(f);
  };
  LipschitzReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pairs; ++k) {
    Problem p1 = tmpl, p2 = tmpl;
    p1.f = sample();
    p2.f = sample();
    const double df = sobolev_norm(ctx, SobolevNormKind::Hm1_B, p1.f - p2.f);
    if (df == 0.0) continue;
    const Solution s1 = solve_homogeneous(p1), s2 = solve_homogeneous(p2);
    const double ratio = tmpl.a.apply(s1.u - s2.u).norm() / df;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    ++rep.pairs;
  }
  if (rep.pairs == 0) rep.min_ratio = 0.0;
  return rep;
}

}  // namespace ellinc
