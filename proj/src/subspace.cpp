#include "ellinc/subspace.hpp"

#include <fstream>
#include <iomanip>
#include <limits>

#include <Eigen/SVD>

#include "ellinc/errors.hpp"

namespace ellinc {

namespace {

constexpr double kOrthonormalityTol = 1e-12;

// Null space of `m` with an absolute singular-value cutoff.
Matrix absolute_null_space(const Matrix& m, double cutoff) {
  if (m.cols() == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

}  // namespace

Subspace::Subspace(Index ambient_dim, Matrix basis, double tol)
    : ambient_dim_(ambient_dim), basis_(std::move(basis)), tol_(tol) {
  if (ambient_dim_ <= 0) throw InputError("subspace ambient dimension must be positive");
  if (basis_.cols() == 0) basis_.resize(ambient_dim_, 0);
  if (basis_.rows() != ambient_dim_) {
    throw InputError("subspace basis has " + std::to_string(basis_.rows()) +
                     " rows, ambient dimension is " + std::to_string(ambient_dim_));
  }
  if (basis_.cols() > ambient_dim_) throw InputError("subspace dimension exceeds ambient");
  if (!basis_.allFinite()) throw InputError("subspace basis has non-finite entries");
  if (tol_ < 0) throw InputError("subspace tolerance must be nonnegative");
  if (basis_.cols() > 0) {
    const Matrix gram = basis_.transpose() * basis_;
    const double err =
        (gram - Matrix::Identity(basis_.cols(), basis_.cols())).cwiseAbs().maxCoeff();
    if (err > kOrthonormalityTol) {
      throw InputError("subspace basis not orthonormal (Gram error " + std::to_string(err) + ")");
    }
  }
}

Subspace Subspace::whole(Index n) { return Subspace(n, Matrix::Identity(n, n)); }

Subspace Subspace::trivial(Index n) { return Subspace(n, Matrix(n, 0)); }

Subspace Subspace::coordinate_span(Index n, std::span<const Index> indices) {
  Matrix basis = Matrix::Zero(n, static_cast<Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index i = indices[k];
    if (i < 0 || i >= n) throw InputError("coordinate index " + std::to_string(i) + " out of range");
    if (basis.row(i).any()) throw InputError("duplicate coordinate index " + std::to_string(i));
    basis(i, static_cast<Index>(k)) = 1.0;
  }
  return Subspace(n, std::move(basis));
}

Subspace Subspace::spanned_by(const Matrix& vectors, double tol) {
  if (vectors.rows() <= 0) throw InputError("spanning set has no rows");
  if (vectors.cols() == 0) return trivial(vectors.rows());
  if (!vectors.allFinite()) throw InputError("spanning set has non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(vectors, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0) && s(i) > 0.0) ++rank;
  return Subspace(vectors.rows(), svd.matrixU().leftCols(rank), tol);
}

Vector Subspace::project(const Vector& x) const {
  if (x.size() != ambient_dim_) {
    throw InputError("project: vector length " + std::to_string(x.size()) +
                     " != ambient dimension " + std::to_string(ambient_dim_));
  }
  if (dim() == 0) return Vector::Zero(ambient_dim_);
  return basis_ * (basis_.transpose() * x);
}

Vector Subspace::reject(const Vector& x) const { return x - project(x); }

Vector Subspace::coordinates(const Vector& x) const {
  if (x.size() != ambient_dim_) throw InputError("coordinates: length mismatch");
  return basis_.transpose() * x;
}

Vector Subspace::lift(const Vector& coords) const {
  if (coords.size() != dim()) throw InputError("lift: coordinate length mismatch");
  if (dim() == 0) return Vector::Zero(ambient_dim_);
  return basis_ * coords;
}

bool Subspace::contains(const Vector& x, double tol) const {
  return reject(x).norm() <= tol * std::max(1.0, x.norm());
}

Subspace Subspace::orthogonal_complement() const {
  if (dim() == 0) return whole(ambient_dim_);
  if (is_whole()) return trivial(ambient_dim_);
  Eigen::JacobiSVD<Matrix> svd(basis_, Eigen::ComputeFullU);
  return Subspace(ambient_dim_, svd.matrixU().rightCols(ambient_dim_ - dim()), tol_);
}

Subspace Subspace::intersect(const Subspace& other) const {
  if (other.ambient_dim_ != ambient_dim_) throw InputError("intersect: ambient dimensions differ");
  if (dim() == 0 || other.dim() == 0) return trivial(ambient_dim_);
  // x = Q t lies in `other` iff its rejection from `other` vanishes.
  Matrix rejected = basis_ - other.basis_ * (other.basis_.transpose() * basis_);
  const double cutoff = std::max(tol_, other.tol_) * 100.0;
  Matrix t = absolute_null_space(rejected, cutoff);
  if (t.cols() == 0) return trivial(ambient_dim_);
  return spanned_by(basis_ * t, tol_);
}

void write_dense_columns(std::ostream& out, const Subspace& s) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index i = 0; i < s.ambient_dim(); ++i) {
    for (Index j = 0; j < s.dim(); ++j) {
      if (j) out << ' ';
      out << s.basis()(i, j);
    }
    out << '\n';
  }
}

void write_dense_columns(const std::filesystem::path& path, const Subspace& s) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'", "io_error");
  write_dense_columns(out, s);
}

}  // namespace ellinc
