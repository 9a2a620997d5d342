#include "ellinc/oracle.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/QR>

#include "ellinc/errors.hpp"

namespace ellinc::oracle {

namespace {

constexpr double kBranchTol = 1e-9;
constexpr std::size_t kMaxRows = 12;

// Columns spanning N(M), possibly zero columns.
Matrix null_space(const Matrix& m) {
  if (m.cols() == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  Eigen::FullPivLU<Matrix> lu(m);
  if (lu.rank() == m.cols()) return Matrix(m.cols(), 0);
  return lu.kernel();
}

Matrix orthonormal_columns(const Matrix& m) {
  if (m.cols() == 0) return m;
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

struct Piece {
  bool fixed_zero = false;  // s = 0 with v in [lo, hi]
  double slope = 0.0;       // beta(s) = slope s + intercept otherwise
  double intercept = 0.0;
  double lo = 0.0, hi = 0.0;
  double s_min = -std::numeric_limits<double>::infinity();
  double s_max = std::numeric_limits<double>::infinity();
};

std::vector<Branch> branches_of(const ScalarGraph& g) {
  if (std::holds_alternative<LinearGraph>(g)) return {Branch::Single};
  if (std::holds_alternative<SignGraph>(g) || std::holds_alternative<RelayGraph>(g))
    return {Branch::Negative, Branch::Zero, Branch::Positive};
  if (std::holds_alternative<ClampGraph>(g)) return {Branch::Below, Branch::Middle, Branch::Above};
  throw CapabilityError("active_set_solve: graph '" + describe(g) + "' is not piecewise linear");
}

Piece piece_of(const ScalarGraph& g, Branch b) {
  Piece p;
  if (const auto* l = std::get_if<LinearGraph>(&g)) {
    p.slope = l->slope;
    return p;
  }
  const bool sign = std::holds_alternative<SignGraph>(g);
  if (sign || std::holds_alternative<RelayGraph>(g)) {
    const double neg = sign ? -1.0 : 0.0;
    const double pos = sign ? 1.0 : std::get<RelayGraph>(g).height;
    switch (b) {
      case Branch::Negative: p.intercept = neg; p.s_max = 0.0; break;
      case Branch::Positive: p.intercept = pos; p.s_min = 0.0; break;
      default: p.fixed_zero = true; p.lo = neg; p.hi = pos; break;
    }
    return p;
  }
  const auto& cl = std::get<ClampGraph>(g);
  switch (b) {
    case Branch::Below: p.intercept = cl.lo; p.s_max = cl.lo; break;
    case Branch::Above: p.intercept = cl.hi; p.s_min = cl.hi; break;
    default: p.slope = 1.0; p.s_min = cl.lo; p.s_max = cl.hi; break;
  }
  return p;
}

// Finds x with g x = r and lo <= x <= hi, or nothing. Exhausts the vertices
// of the polytope {t : lo <= xp + N t <= hi}.
std::optional<Vector> box_feasible(const Matrix& g, const Vector& r, const Vector& lo,
                                   const Vector& hi) {
  const Index q = lo.size();
  if (q == 0) return Vector(0);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(g);
  const Vector xp = cod.solve(r);
  if ((g * xp - r).norm() > kBranchTol * (1.0 + r.norm())) return std::nullopt;
  const Matrix n = null_space(g);
  auto inside = [&](const Vector& x) {
    return ((x - lo).array() >= -kBranchTol).all() && ((hi - x).array() >= -kBranchTol).all();
  };
  const Index k = n.cols();
  if (k == 0) return inside(xp) ? std::optional<Vector>(xp) : std::nullopt;

  // Rows 0..q-1 are lower bounds, q..2q-1 upper bounds.
  std::vector<Index> pick(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
  for (;;) {
    Matrix sys(k, k);
    Vector rhs(k);
    for (Index i = 0; i < k; ++i) {
      const Index c = pick[static_cast<std::size_t>(i)];
      const Index row = c % q;
      sys.row(i) = n.row(row);
      rhs(i) = (c < q ? lo(row) : hi(row)) - xp(row);
    }
    Eigen::FullPivLU<Matrix> lu(sys);
    if (lu.isInvertible()) {
      const Vector x = xp + n * lu.solve(rhs);
      if (inside(x)) return x;
    }
    // next k-combination of {0, ..., 2q-1}
    Index i = k - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == 2 * q - k + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j)
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return std::nullopt;
}

double potential(const ScalarGraph& g, double s) {
  if (const auto* l = std::get_if<LinearGraph>(&g)) return 0.5 * l->slope * s * s;
  if (std::holds_alternative<SignGraph>(g)) return std::abs(s);
  if (const auto* p = std::get_if<PowerGraph>(&g)) return std::pow(std::abs(s), p->p) / p->p;
  throw CapabilityError("convex oracle: graph '" + describe(g) + "' has no listed potential");
}

// argmin_y (c/2) y^2 + phi(y) - t y, by closed form or bisection.
double scalar_prox(const ScalarGraph& g, double c, double t) {
  if (const auto* l = std::get_if<LinearGraph>(&g)) return t / (c + l->slope);
  if (std::holds_alternative<SignGraph>(g)) {
    if (t > 1.0) return (t - 1.0) / c;
    if (t < -1.0) return (t + 1.0) / c;
    return 0.0;
  }
  if (const auto* p = std::get_if<PowerGraph>(&g)) {
    const double target = std::abs(t);
    double lo = 0.0, hi = target / c;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (c * mid + std::pow(mid, p->p - 1.0) > target) hi = mid; else lo = mid;
    }
    return std::copysign(0.5 * (lo + hi), t);
  }
  throw CapabilityError("convex oracle: graph '" + describe(g) + "' has no listed potential");
}

void require_graph_count(const LinearMap& a, const std::vector<ScalarGraph>& graphs) {
  if (static_cast<Index>(graphs.size()) != a.rows())
    throw InputError("oracle: one graph per row of A is required");
}

}  // namespace

ActiveSetResult active_set_solve(const LinearMap& a_map, double c,
                                 const std::vector<ScalarGraph>& graphs, const Vector& f,
                                 const std::optional<Vector>& offset) {
  const Matrix& a = a_map.dense();
  const Index m = a.rows(), n = a.cols();
  require_graph_count(a_map, graphs);
  if (static_cast<std::size_t>(m) > kMaxRows)
    throw InputError("active_set_solve: at most 12 rows are enumerated");
  if (!(c > 0.0)) throw InputError("active_set_solve: c must be positive");
  if (f.size() != n) throw InputError("active_set_solve: f has wrong length");
  const Vector d = offset.value_or(Vector::Zero(m));
  if (d.size() != m) throw InputError("active_set_solve: offset has wrong length");

  std::vector<std::vector<Branch>> choices;
  for (const auto& g : graphs) {
    validate(g);
    choices.push_back(branches_of(g));
  }
  const Matrix kernel = null_space(a);

  ActiveSetResult best;
  std::vector<std::size_t> digit(static_cast<std::size_t>(m), 0);
  for (;;) {
    BranchAssignment assign(static_cast<std::size_t>(m));
    std::vector<Piece> pieces;
    std::vector<Index> zero_rows;
    for (Index i = 0; i < m; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      assign[ui] = choices[ui][digit[ui]];
      pieces.push_back(piece_of(graphs[ui], assign[ui]));
      if (pieces.back().fixed_zero) zero_rows.push_back(i);
    }
    const Index q = static_cast<Index>(zero_rows.size());
    const Index k = kernel.cols();

    // Unknowns (u, v_Z): stationarity, s_Z = 0, u orthogonal to N(A).
    Matrix sys = Matrix::Zero(n + q + k, n + q);
    Vector rhs = Vector::Zero(n + q + k);
    rhs.head(n) = f;
    Index zi = 0;
    for (Index i = 0; i < m; ++i) {
      const Piece& p = pieces[static_cast<std::size_t>(i)];
      const Vector ai = a.row(i).transpose();
      if (p.fixed_zero) {
        sys.block(0, n + zi, n, 1) = ai;
        sys.block(n + zi, 0, 1, n) = ai.transpose();
        rhs(n + zi) = -d(i);
        ++zi;
      } else {
        const double gain = c + p.slope;
        sys.topLeftCorner(n, n) += gain * ai * ai.transpose();
        rhs.head(n) -= ai * (gain * d(i) + p.intercept);
      }
    }
    if (k > 0) sys.block(n + q, 0, k, n) = kernel.transpose();

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sys);
    const Vector sol = cod.solve(rhs);
    bool ok = (sys * sol - rhs).norm() <= kBranchTol * (1.0 + rhs.norm());
    const Vector u = sol.head(n);
    const Vector s = a * u + d;
    Vector v = Vector::Zero(m);
    for (Index i = 0; ok && i < m; ++i) {
      const Piece& p = pieces[static_cast<std::size_t>(i)];
      if (p.fixed_zero) continue;
      if (s(i) < p.s_min - kBranchTol || s(i) > p.s_max + kBranchTol) ok = false;
      v(i) = (c + p.slope) * s(i) + p.intercept;
    }
    if (ok && q > 0) {
      // Free multipliers on zero branches: A_Z^T v_Z = f - A_{Z^c}^T v_{Z^c}, boxed.
      Matrix az(n, q);
      Vector lo(q), hi(q);
      for (Index j = 0; j < q; ++j) {
        const Index i = zero_rows[static_cast<std::size_t>(j)];
        az.col(j) = a.row(i).transpose();
        lo(j) = pieces[static_cast<std::size_t>(i)].lo;
        hi(j) = pieces[static_cast<std::size_t>(i)].hi;
      }
      const auto vz = box_feasible(az, f - a.transpose() * v, lo, hi);
      if (!vz) {
        ok = false;
      } else {
        for (Index j = 0; j < q; ++j) v(zero_rows[static_cast<std::size_t>(j)]) = (*vz)(j);
      }
    }
    if (ok) {
      if (best.consistent_assignments == 0) {
        best.u = u;
        best.v = v;
        best.branches = assign;
      } else if ((best.u - u).norm() > 1e-7 * (1.0 + u.norm())) {
        throw OracleFailure("active_set_solve: two consistent assignments disagree");
      }
      ++best.consistent_assignments;
    }

    std::size_t pos = 0;
    while (pos < digit.size() && ++digit[pos] == choices[pos].size()) digit[pos++] = 0;
    if (pos == digit.size()) break;
  }
  if (best.consistent_assignments == 0)
    throw OracleFailure("active_set_solve: no consistent branch assignment");
  return best;
}

double convex_objective(const LinearMap& a, double c, const std::vector<ScalarGraph>& graphs,
                        const Vector& f, const Vector& u) {
  require_graph_count(a, graphs);
  const Vector s = a.apply(u);
  double value = 0.5 * c * s.squaredNorm() - f.dot(u);
  for (Index i = 0; i < s.size(); ++i) value += potential(graphs[static_cast<std::size_t>(i)], s(i));
  return value;
}

Vector convex_min_solve(const LinearMap& a_map, double c, const std::vector<ScalarGraph>& graphs,
                        const Vector& f, std::size_t max_iter) {
  require_graph_count(a_map, graphs);
  for (const auto& g : graphs) (void)potential(g, 0.0);
  if (!(c > 0.0)) throw InputError("convex_min_solve: c must be positive");
  const Matrix& a = a_map.dense();
  if (f.size() != a.cols()) throw InputError("convex_min_solve: f has wrong length");

  // w = (A^T)^+ f, coker = orthonormal basis of N(A^T).
  const Vector w = Eigen::CompleteOrthogonalDecomposition<Matrix>(a.transpose()).solve(f);
  const Matrix coker = orthonormal_columns(null_space(a.transpose()));

  auto primal = [&](const Vector& shift) {
    Vector y(w.size());
    for (Index i = 0; i < y.size(); ++i)
      y(i) = scalar_prox(graphs[static_cast<std::size_t>(i)], c, w(i) + shift(i));
    return y;
  };

  Vector y = primal(Vector::Zero(w.size()));
  if (coker.cols() > 0) {
    // Minimize G*(N mu); its gradient N^T y(mu) is 1/c-Lipschitz.
    Vector mu = Vector::Zero(coker.cols());
    Vector mu_prev = mu, probe = mu;
    double t = 1.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
      const Vector yp = primal(coker * probe);
      const Vector grad = coker.transpose() * yp;
      mu_prev = mu;
      mu = probe - c * grad;
      if (grad.norm() <= 1e-15 * (1.0 + w.norm())) break;
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      // gradient-based restart
      if (grad.dot(mu - mu_prev) > 0.0) {
        probe = mu;
        t = 1.0;
      } else {
        probe = mu + ((t - 1.0) / t_next) * (mu - mu_prev);
        t = t_next;
      }
    }
    y = primal(coker * mu);
  }
  return Eigen::CompleteOrthogonalDecomposition<Matrix>(a).solve(y);
}

Vector linear_direct_solve(const LinearMap& a_map, const Matrix& m, const Vector& f) {
  const Matrix& a = a_map.dense();
  if (m.rows() != a.rows() || m.cols() != a.rows())
    throw InputError("linear_direct_solve: M must be rows(A) x rows(A)");
  if (f.size() != a.cols()) throw InputError("linear_direct_solve: f has wrong length");
  const Index n = a.cols();
  const Matrix kernel = null_space(a);
  Matrix sys(n + kernel.cols(), n);
  sys.topRows(n) = a.transpose() * m * a;
  if (kernel.cols() > 0) sys.bottomRows(kernel.cols()) = kernel.transpose();
  Vector rhs = Vector::Zero(sys.rows());
  rhs.head(n) = f;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sys);
  if (cod.rank() < n) throw OracleFailure("linear_direct_solve: reduced matrix is singular");
  const Vector u = cod.solve(rhs);
  if ((sys * u - rhs).norm() > 1e-8 * (1.0 + rhs.norm()))
    throw OracleFailure("linear_direct_solve: right-hand side not in N(A)^perp");
  return u;
}

}  // namespace ellinc::oracle
