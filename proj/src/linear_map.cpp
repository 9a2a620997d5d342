#include "ellinc/linear_map.hpp"

#include <sstream>

#include "ellinc/errors.hpp"

namespace ellinc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Input: return "input";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Capability: return "capability";
    case ErrorKind::Construction: return "construction";
    case ErrorKind::Oracle: return "oracle";
  }
  return "unknown";
}

LinearMap::LinearMap(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() <= 0 || entries_.cols() <= 0) {
    throw InputError("linear map must have positive dimensions");
  }
  if (!entries_.allFinite()) {
    throw InputError("linear map has non-finite entries");
  }
}

LinearMap LinearMap::identity(Index n) { return LinearMap(Matrix::Identity(n, n)); }

LinearMap LinearMap::zero(Index rows, Index cols) { return LinearMap(Matrix::Zero(rows, cols)); }

LinearMap LinearMap::from_triplets(Index rows, Index cols,
                                   const std::vector<Eigen::Triplet<double>>& triplets) {
  Matrix m = Matrix::Zero(rows, cols);
  for (const auto& t : triplets) {
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols) {
      std::ostringstream msg;
      msg << "entry (" << t.row() << ", " << t.col() << ") outside " << rows << "x" << cols;
      throw InputError(msg.str());
    }
    m(t.row(), t.col()) += t.value();
  }
  return LinearMap(std::move(m));
}

Vector LinearMap::apply(const Vector& x) const {
  if (x.size() != cols()) {
    throw InputError("apply: vector length " + std::to_string(x.size()) + " != cols " +
                     std::to_string(cols()));
  }
  return entries_ * x;
}

Vector LinearMap::apply_adjoint(const Vector& y) const {
  if (y.size() != rows()) {
    throw InputError("apply_adjoint: vector length " + std::to_string(y.size()) +
                     " != rows " + std::to_string(rows()));
  }
  return entries_.transpose() * y;
}

LinearMap LinearMap::adjoint() const { return LinearMap(entries_.transpose()); }

LinearMap LinearMap::compose(const LinearMap& right) const {
  if (cols() != right.rows()) {
    throw InputError("compose: inner dimensions differ");
  }
  return LinearMap(entries_ * right.entries_);
}

}  // namespace ellinc
