#include "ellinc/hilbert.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ellinc/errors.hpp"

namespace ellinc {

namespace {

struct Decomposition {
  Matrix u, v;
  Vector sigma;
  Index rank = 0;
};

Decomposition decompose(const LinearMap& m, double tol) {
  if (tol < 0) throw InputError("rank tolerance must be nonnegative");
  Eigen::JacobiSVD<Matrix> svd(m.dense(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  Decomposition d{svd.matrixU(), svd.matrixV(), svd.singularValues(), 0};
  const double cutoff = d.sigma.size() ? tol * d.sigma(0) : 0.0;
  for (Index i = 0; i < d.sigma.size(); ++i)
    if (d.sigma(i) > cutoff && d.sigma(i) > 0.0) ++d.rank;
  return d;
}

void require_orthogonal_to(const Subspace& s, const Vector& x, double tol, const char* what,
                           const char* code = "domain_error") {
  if (s.dim() == 0) return;
  const double leak = s.project(x).norm();
  if (leak > tol * std::max(1.0, x.norm())) {
    throw DomainError(std::string(what) + " (component " + std::to_string(leak) + ")", code);
  }
}

}  // namespace

Subspace kernel_basis(const LinearMap& m, double tol) {
  const Decomposition d = decompose(m, tol);
  return Subspace(m.cols(), d.v.rightCols(m.cols() - d.rank), tol);
}

Subspace range_basis(const LinearMap& m, double tol) {
  const Decomposition d = decompose(m, tol);
  return Subspace(m.rows(), d.u.leftCols(d.rank), tol);
}

Vector project(const Subspace& s, const Vector& x) { return s.project(x); }

RestrictedOperator::RestrictedOperator(LinearMap full_map, double tol)
    : full_map_(std::move(full_map)),
      tol_(tol),
      ker_(Subspace::trivial(full_map_.cols())),
      coker_(Subspace::trivial(full_map_.rows())),
      ran_(Subspace::trivial(full_map_.rows())),
      ran_adj_(Subspace::trivial(full_map_.cols())) {
  const Decomposition d = decompose(full_map_, tol);
  const Index m = full_map_.rows(), n = full_map_.cols(), r = d.rank;
  ker_ = Subspace(n, d.v.rightCols(n - r), tol);
  ran_adj_ = Subspace(n, d.v.leftCols(r), tol);
  ran_ = Subspace(m, d.u.leftCols(r), tol);
  coker_ = Subspace(m, d.u.rightCols(m - r), tol);
  b_matrix_ = ran_.basis().transpose() * full_map_.dense() * ran_adj_.basis();
  if (r > 0) {
    b_lu_.compute(b_matrix_);
    sigma_max_ = d.sigma(0);
    sigma_min_ = d.sigma(r - 1);
  }
}

Vector RestrictedOperator::solve_b(const Vector& rhs) const {
  if (rank() == 0) return Vector(0);
  return b_lu_.solve(rhs);
}

Vector RestrictedOperator::solve_bt(const Vector& rhs) const {
  if (rank() == 0) return Vector(0);
  return b_lu_.transpose().solve(rhs);
}

const char* to_string(SobolevNormKind kind) noexcept {
  switch (kind) {
    case SobolevNormKind::H1_B: return "H1_B";
    case SobolevNormKind::H0: return "H0";
    case SobolevNormKind::Hm1_B: return "Hm1_B";
    case SobolevNormKind::H1_C_plus_i: return "H1_C_plus_i";
    case SobolevNormKind::Hm1_C_plus_i: return "Hm1_C_plus_i";
  }
  return "unknown";
}

double sobolev_norm(const RestrictedOperator& ctx, SobolevNormKind kind, const Vector& x,
                    const LinearMap* c) {
  const LinearMap& a = ctx.full_map();
  switch (kind) {
    case SobolevNormKind::H0:
      return x.norm();
    case SobolevNormKind::H1_B:
      if (x.size() != a.cols()) throw InputError("sobolev_norm: length mismatch");
      require_orthogonal_to(ctx.ker(), x, ctx.tol(), "H1_B norm needs x in N(A)^perp");
      return a.apply(x).norm();
    case SobolevNormKind::Hm1_B: {
      if (x.size() != a.cols()) throw InputError("sobolev_norm: length mismatch");
      require_orthogonal_to(ctx.ker(), x, ctx.tol(), "H-1_B norm needs x in N(A)^perp");
      // <x, (B*B)^{-1} x> = |B^{-T} xi|^2 with xi the ran_adj coordinates.
      return ctx.solve_bt(ctx.ran_adj().coordinates(x)).norm();
    }
    case SobolevNormKind::H1_C_plus_i:
    case SobolevNormKind::Hm1_C_plus_i: {
      if (c == nullptr) throw InputError(std::string(to_string(kind)) + " requires C");
      if (x.size() != c->cols()) throw InputError("sobolev_norm: length mismatch with C");
      if (kind == SobolevNormKind::H1_C_plus_i) {
        return std::sqrt(c->apply(x).squaredNorm() + x.squaredNorm());
      }
      const Matrix& cm = c->dense();
      Matrix gram = cm.transpose() * cm;
      gram.diagonal().array() += 1.0;
      const Vector y = gram.llt().solve(x);
      return std::sqrt(std::max(0.0, x.dot(y)));
    }
  }
  throw InputError("unknown norm kind");
}

Vector b_star_inverse(const RestrictedOperator& ctx, const Vector& f) {
  if (f.size() != ctx.full_map().cols()) throw InputError("b_star_inverse: length mismatch");
  require_orthogonal_to(ctx.ker(), f, ctx.tol(), "right-hand side not in N(A)^perp",
                        "rhs_not_in_H_minus_1");
  return ctx.ran().lift(ctx.solve_bt(ctx.ran_adj().coordinates(f)));
}

Vector b_inverse(const RestrictedOperator& ctx, const Vector& v) {
  if (v.size() != ctx.full_map().rows()) throw InputError("b_inverse: length mismatch");
  require_orthogonal_to(ctx.coker(), v, ctx.tol(), "argument not in R(A)");
  return ctx.ran_adj().lift(ctx.solve_b(ctx.ran().coordinates(v)));
}

double embedding_constant(const RestrictedOperator& ctx, const LinearMap& c) {
  if (c.cols() != ctx.full_map().cols()) throw InputError("embedding_constant: C domain mismatch");
  if (ctx.rank() == 0) return 0.0;
  const Matrix& q = ctx.ran_adj().basis();
  const Matrix cq = c.dense() * q;
  Matrix lhs = cq.transpose() * cq;
  lhs.diagonal().array() += 1.0;
  const Matrix aq = ctx.full_map().dense() * q;
  const Matrix rhs = aq.transpose() * aq;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(lhs, rhs, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConstructionError("embedding_constant: generalized eigenproblem failed");
  }
  return std::sqrt(solver.eigenvalues().maxCoeff());
}

}  // namespace ellinc
