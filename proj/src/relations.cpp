#include "ellinc/relations.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ellinc/errors.hpp"

namespace ellinc {

std::function<Vector(const Vector&)> BaseResolvent::bind(double mu) const {
  return [this, mu](const Vector& z) { return apply(mu, z); };
}

namespace {

// J_mu(M - c) via (1 + mu (M - c)) x = z.
class LinearResolvent final : public BaseResolvent {
 public:
  LinearResolvent(Matrix base) : base_(std::move(base)) {}

  Vector apply(double mu, const Vector& z) const override { return bind(mu)(z); }

  std::function<Vector(const Vector&)> bind(double mu) const override {
    Matrix system = mu * base_;
    system.diagonal().array() += 1.0;
    auto lu = std::make_shared<const Eigen::PartialPivLU<Matrix>>(system);
    return [lu](const Vector& z) -> Vector { return lu->solve(z); };
  }

 private:
  Matrix base_;  // M - c I
};

class DiagonalResolvent final : public BaseResolvent {
 public:
  explicit DiagonalResolvent(std::vector<ScalarGraph> graphs) : graphs_(std::move(graphs)) {}

  Vector apply(double mu, const Vector& z) const override {
    Vector s(z.size());
    for (Index i = 0; i < z.size(); ++i)
      s(i) = scalar_resolvent(graphs_[static_cast<std::size_t>(i)], mu, z(i));
    return s;
  }

 private:
  std::vector<ScalarGraph> graphs_;
};

class FunctionResolvent final : public BaseResolvent {
 public:
  explicit FunctionResolvent(Relation::ResolventFn fn) : fn_(std::move(fn)) {}
  Vector apply(double mu, const Vector& z) const override { return fn_(mu, z); }

 private:
  Relation::ResolventFn fn_;
};

// J_mu(b')(z) = J_mu(b)(z + p + mu (q - c p)) - p for b' = (a - (p, q)) - c.
class ShiftedResolvent final : public BaseResolvent {
 public:
  ShiftedResolvent(std::shared_ptr<const BaseResolvent> parent, double c, Vector p, Vector q)
      : parent_(std::move(parent)), c_(c), p_(std::move(p)), q_(std::move(q)) {}

  Vector apply(double mu, const Vector& z) const override {
    return parent_->apply(mu, z + p_ + mu * (q_ - c_ * p_)) - p_;
  }

  std::function<Vector(const Vector&)> bind(double mu) const override {
    auto inner = parent_->bind(mu);
    Vector offset = p_ + mu * (q_ - c_ * p_);
    Vector p = p_;
    return [inner = std::move(inner), offset = std::move(offset), p = std::move(p)](
               const Vector& z) -> Vector { return inner(z + offset) - p; };
  }

 private:
  std::shared_ptr<const BaseResolvent> parent_;
  double c_;
  Vector p_, q_;
};

void require_length(const Vector& v, Index n, const char* what) {
  if (v.size() != n) {
    throw InputError(std::string(what) + ": length " + std::to_string(v.size()) +
                     " != relation dimension " + std::to_string(n));
  }
}

}  // namespace

Relation::Relation(Index dim, double c, std::shared_ptr<const BaseResolvent> base,
                   RelationDescriptor descriptor)
    : dim_(dim),
      c_(c),
      base_(std::move(base)),
      descriptor_(std::move(descriptor)),
      p_(Vector::Zero(dim)),
      q_(Vector::Zero(dim)) {
  if (dim_ <= 0) throw ConstructionError("relation dimension must be positive");
  if (!(c_ > 0.0) || !std::isfinite(c_))
    throw ConstructionError("monotonicity constant c must be positive and finite");
  if (!base_) throw ConstructionError("relation needs a base resolvent");
}

Relation Relation::custom(Index dim, double c, ResolventFn base, std::string name) {
  if (!base) throw ConstructionError("custom relation needs a resolvent function");
  return Relation(dim, c, std::make_shared<FunctionResolvent>(std::move(base)),
                  CustomRelation{std::move(name)});
}

Vector Relation::base_resolvent(double mu, const Vector& z) const {
  require_length(z, dim_, "base_resolvent");
  if (!(mu > 0.0)) throw InputError("resolvent parameter must be positive");
  return base_->apply(mu, z);
}

Vector Relation::resolvent(double lambda, const Vector& z) const {
  require_length(z, dim_, "resolvent");
  if (!(lambda > 0.0)) throw InputError("resolvent parameter must be positive");
  const double scale = 1.0 + lambda * c_;
  return base_->apply(lambda / scale, z / scale);
}

std::function<Vector(const Vector&)> Relation::resolvent_map(double lambda) const {
  if (!(lambda > 0.0)) throw InputError("resolvent parameter must be positive");
  const double scale = 1.0 + lambda * c_;
  auto inner = base_->bind(lambda / scale);
  const Index n = dim_;
  return [inner = std::move(inner), scale, n](const Vector& z) -> Vector {
    require_length(z, n, "resolvent");
    return inner(z / scale);
  };
}

Vector Relation::inverse(const Vector& y) const {
  require_length(y, dim_, "inverse");
  return base_->apply(1.0 / c_, y / c_);
}

Relation Relation::shifted(const Vector& p, const Vector& q) const {
  require_length(p, dim_, "shift input");
  require_length(q, dim_, "shift output");
  Relation out(dim_, c_, std::make_shared<ShiftedResolvent>(base_, c_, p, q), descriptor_);
  out.p_ = p_ + p;
  out.q_ = q_ + q;
  return out;
}

std::string Relation::describe() const {
  std::ostringstream out;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, LinearPD>) {
          out << "linear(" << d.matrix.rows() << "x" << d.matrix.cols() << ")";
        } else if constexpr (std::is_same_v<T, DiagonalGraph>) {
          out << "diagonal[";
          for (std::size_t i = 0; i < d.graphs.size(); ++i)
            out << (i ? ", " : "") << ellinc::describe(d.graphs[i]);
          out << "]";
        } else {
          out << "custom(" << d.name << ")";
        }
      },
      descriptor_);
  out << " c=" << c_;
  if (is_shifted()) out << " shifted";
  return out.str();
}

Relation make_linear(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ConstructionError("linear relation needs a nonempty square matrix");
  if (!m.allFinite()) throw ConstructionError("linear relation has non-finite entries");
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const double c = eig.eigenvalues().minCoeff();
  if (!(c > tol)) {
    std::ostringstream msg;
    msg << "symmetric part not positive definite (lambda_min = " << c << ")";
    throw ConstructionError(msg.str());
  }
  Matrix base = m;
  base.diagonal().array() -= c;
  return Relation(m.rows(), c, std::make_shared<LinearResolvent>(std::move(base)), LinearPD{m});
}

Relation make_linear(const LinearMap& m, double tol) { return make_linear(m.dense(), tol); }

Relation make_diagonal(double c, std::vector<ScalarGraph> graphs) {
  if (graphs.empty()) throw ConstructionError("diagonal relation needs at least one graph");
  for (const auto& g : graphs) validate(g);
  const auto n = static_cast<Index>(graphs.size());
  auto base = std::make_shared<DiagonalResolvent>(graphs);
  return Relation(n, c, std::move(base), DiagonalGraph{std::move(graphs)});
}

Relation make_scaled_identity(Index dim, double c) {
  return make_diagonal(c, std::vector<ScalarGraph>(static_cast<std::size_t>(dim), LinearGraph{0.0}));
}

Vector resolvent(const Relation& a, double lambda, const Vector& z) { return a.resolvent(lambda, z); }

Vector inverse(const Relation& a, const Vector& y) { return a.inverse(y); }

Relation shift(const Relation& a, const Vector& p, const Vector& q) { return a.shifted(p, q); }

double graph_residual(const Relation& a, const Vector& x, const Vector& y) {
  require_length(x, a.dim(), "graph_residual x");
  require_length(y, a.dim(), "graph_residual y");
  const double lambda = 1.0 / a.c();
  return (x - a.resolvent(lambda, x + lambda * y)).norm();
}

ProjectedSolution projected_inverse(const Relation& a, const Subspace& u, const Vector& w,
                                    const DouglasRachfordOptions& options) {
  if (u.ambient_dim() != a.dim()) throw InputError("projected_inverse: subspace/relation mismatch");
  require_length(w, a.dim(), "projected_inverse w");
  if (!(options.tol > 0.0)) throw InputError("projected_inverse: tol must be positive");
  if (!u.contains(w, std::max(options.tol, 1e-12))) {
    throw DomainError("projected_inverse: w is not in the subspace");
  }
  const double lambda = options.lambda.value_or(1.0 / a.c());
  if (!(lambda > 0.0)) throw InputError("projected_inverse: lambda must be positive");

  ProjectedSolution out;
  if (u.is_whole()) {
    out.point.x = a.inverse(w);
    out.point.y = w;
    out.point.residual = graph_residual(a, out.point.x, out.point.y);
    return out;
  }

  // 0 in (a - (0, w))(x) + N_U(x); the resolvent of N_U is the projection.
  const Vector zero = Vector::Zero(a.dim());
  const auto j = a.shifted(zero, w).resolvent_map(lambda);
  Vector s = options.start.value_or(zero);
  require_length(s, a.dim(), "projected_inverse start");

  double step = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  for (; k < options.max_iter; ++k) {
    const Vector x = u.project(s);
    const Vector z = j(2.0 * x - s);
    step = (z - x).norm();
    s += z - x;
    if (step <= options.tol) break;
  }
  if (!(step <= options.tol)) {
    std::ostringstream msg;
    msg << "Douglas-Rachford did not converge in " << options.max_iter
        << " iterations (last step " << step << ")";
    throw ConvergenceError(msg.str(), step, options.max_iter);
  }
  out.iterations = k + 1;
  out.last_step = step;
  out.point.x = u.project(s);
  // s - x lies in U^perp, so P_U v = w holds up to rounding.
  out.point.y = w + (out.point.x - s) / lambda;
  out.point.residual = graph_residual(a, out.point.x, out.point.y);
  return out;
}

MonotonicityReport monotonicity_probe(const Relation& a, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InputError("monotonicity_probe: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 2.0);
  auto sample = [&] {
    Vector y(a.dim());
    for (Index i = 0; i < y.size(); ++i) y(i) = normal(rng);
    return y;
  };
  MonotonicityReport report;
  report.min_quotient = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const Vector y1 = sample(), y2 = sample();
    const Vector dx = a.inverse(y1) - a.inverse(y2);
    const Vector dy = y1 - y2;
    const double inner = dx.dot(dy);
    const double sq = dx.squaredNorm();
    ++report.trials;
    if (inner < a.c() * sq - 1e-9) ++report.violations;
    if (sq > 1e-24) report.min_quotient = std::min(report.min_quotient, inner / sq);
  }
  report.pass = report.violations == 0;
  return report;
}

}  // namespace ellinc
