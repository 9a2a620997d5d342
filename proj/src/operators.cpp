#include "ellinc/operators.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "ellinc/errors.hpp"
#include "ellinc/matrix_market.hpp"

namespace ellinc {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Index node_count(const std::vector<Index>& shape) {
  return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
}

Index node_index(const std::vector<Index>& shape, const std::vector<Index>& at) {
  Index idx = 0;
  for (std::size_t a = shape.size(); a-- > 0;) idx = idx * shape[a] + at[a];
  return idx;
}

// Visits every multi-index with at[a] < limit[a], first axis fastest.
template <class F>
void for_each_index(const std::vector<Index>& limit, F&& f) {
  for (Index e : limit)
    if (e <= 0) return;
  std::vector<Index> at(limit.size(), 0);
  for (;;) {
    f(at);
    std::size_t a = 0;
    while (a < at.size() && ++at[a] == limit[a]) at[a++] = 0;
    if (a == at.size()) return;
  }
}

void require_shape(const OperatorSpec& spec, std::size_t dims, Index min_extent) {
  if (spec.shape.size() != dims) {
    throw InputError(std::string(to_string(spec.family)) + " needs " + std::to_string(dims) +
                     " grid extents, got " + std::to_string(spec.shape.size()));
  }
  for (Index e : spec.shape)
    if (e < min_extent)
      throw InputError("grid extents must be >= " + std::to_string(min_extent));
  if (!(spec.spacing > 0.0) || !std::isfinite(spec.spacing))
    throw InputError("grid spacing must be positive");
}

// Forward-difference gradient on all nodes of `shape`.
LinearMap free_gradient(const std::vector<Index>& shape, double h) {
  Triplets t;
  Index row = 0;
  for (std::size_t axis = 0; axis < shape.size(); ++axis) {
    std::vector<Index> limit = shape;
    limit[axis] -= 1;
    for_each_index(limit, [&](const std::vector<Index>& at) {
      std::vector<Index> next = at;
      ++next[axis];
      t.emplace_back(static_cast<int>(row), static_cast<int>(node_index(shape, at)), -1.0 / h);
      t.emplace_back(static_cast<int>(row), static_cast<int>(node_index(shape, next)), 1.0 / h);
      ++row;
    });
  }
  return LinearMap::from_triplets(row, node_count(shape), t);
}

LinearMap free_symmetric_gradient(const std::vector<Index>& shape, double h) {
  const Index n = node_count(shape);
  const double r2 = std::sqrt(2.0);
  Triplets t;
  Index row = 0;
  // Each entry carries weight h (grid-point measure h^2) times 1/h.
  for_each_index({shape[0] - 1, shape[1] - 1}, [&](const std::vector<Index>& at) {
    const Index p = node_index(shape, at);
    const Index px = node_index(shape, {at[0] + 1, at[1]});
    const Index py = node_index(shape, {at[0], at[1] + 1});
    auto add = [&](Index r, Index col, double v) {
      t.emplace_back(static_cast<int>(r), static_cast<int>(col), v);
    };
    add(row, px, 1.0);  // e11 = d1 u1
    add(row, p, -1.0);
    add(row + 1, n + py, 1.0);  // e22 = d2 u2
    add(row + 1, n + p, -1.0);
    add(row + 2, py, r2 / 2);  // sqrt(2) e12 = (d2 u1 + d1 u2) / sqrt(2)
    add(row + 2, p, -r2 / 2);
    add(row + 2, n + px, r2 / 2);
    add(row + 2, n + p, -r2 / 2);
    row += 3;
  });
  (void)h;
  return LinearMap::from_triplets(row, 2 * n, t);
}

LinearMap free_curl(const std::vector<Index>& shape, double h) {
  const Index nx = shape[0], ny = shape[1], nz = shape[2];
  const Index ex = (nx - 1) * ny * nz, ey = nx * (ny - 1) * nz, ez = nx * ny * (nz - 1);
  auto xe = [&](Index i, Index j, Index k) { return i + (nx - 1) * (j + ny * k); };
  auto ye = [&](Index i, Index j, Index k) { return ex + i + nx * (j + (ny - 1) * k); };
  auto ze = [&](Index i, Index j, Index k) { return ex + ey + i + nx * (j + ny * k); };
  Triplets t;
  Index row = 0;
  auto add = [&](Index col, double v) {
    t.emplace_back(static_cast<int>(row), static_cast<int>(col), v / h);
  };
  // x-faces: d2 E3 - d3 E2
  for_each_index({nx, ny - 1, nz - 1}, [&](const std::vector<Index>& a) {
    const Index i = a[0], j = a[1], k = a[2];
    add(ze(i, j + 1, k), 1.0);
    add(ze(i, j, k), -1.0);
    add(ye(i, j, k + 1), -1.0);
    add(ye(i, j, k), 1.0);
    ++row;
  });
  // y-faces: d3 E1 - d1 E3
  for_each_index({nx - 1, ny, nz - 1}, [&](const std::vector<Index>& a) {
    const Index i = a[0], j = a[1], k = a[2];
    add(xe(i, j, k + 1), 1.0);
    add(xe(i, j, k), -1.0);
    add(ze(i + 1, j, k), -1.0);
    add(ze(i, j, k), 1.0);
    ++row;
  });
  // z-faces: d1 E2 - d2 E1
  for_each_index({nx - 1, ny - 1, nz}, [&](const std::vector<Index>& a) {
    const Index i = a[0], j = a[1], k = a[2];
    add(ye(i + 1, j, k), 1.0);
    add(ye(i, j, k), -1.0);
    add(xe(i, j + 1, k), -1.0);
    add(xe(i, j, k), 1.0);
    ++row;
  });
  return LinearMap::from_triplets(row, ex + ey + ez, t);
}

BuiltOperator build_free(const OperatorSpec& spec) {
  switch (spec.family) {
    case OperatorFamily::Grad1D:
    case OperatorFamily::Grad2D:
    case OperatorFamily::Grad3D:
      return {free_gradient(spec.shape, spec.spacing), "constants on connected grid", std::nullopt};
    case OperatorFamily::SymGrad2D: {
      LinearMap m = free_symmetric_gradient(spec.shape, spec.spacing);
      Vector weights(m.rows());
      for (Index r = 0; r < m.rows(); ++r) weights(r) = (r % 3 == 2) ? std::sqrt(2.0) : 1.0;
      return {std::move(m), "discrete rigid displacements", std::move(weights)};
    }
    case OperatorFamily::Curl3D:
      return {free_curl(spec.shape, spec.spacing), "discrete gradients", std::nullopt};
    case OperatorFamily::Custom:
      break;
  }
  throw CapabilityError("no free builder for this family");
}

std::size_t dimensions_of(OperatorFamily family) {
  switch (family) {
    case OperatorFamily::Grad1D: return 1;
    case OperatorFamily::Grad2D:
    case OperatorFamily::SymGrad2D: return 2;
    case OperatorFamily::Grad3D:
    case OperatorFamily::Curl3D: return 3;
    case OperatorFamily::Custom: return 0;
  }
  return 0;
}

Matrix extension_matrix(Index total, const std::vector<Index>& indices) {
  Matrix e = Matrix::Zero(total, static_cast<Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) e(indices[k], static_cast<Index>(k)) = 1.0;
  return e;
}

}  // namespace

const char* to_string(OperatorFamily family) noexcept {
  switch (family) {
    case OperatorFamily::Grad1D: return "grad1d";
    case OperatorFamily::Grad2D: return "grad2d";
    case OperatorFamily::Grad3D: return "grad3d";
    case OperatorFamily::SymGrad2D: return "symgrad2d";
    case OperatorFamily::Curl3D: return "curl3d";
    case OperatorFamily::Custom: return "custom";
  }
  return "unknown";
}

const char* to_string(Boundary boundary) noexcept {
  return boundary == Boundary::Free ? "free" : "zero";
}

std::vector<Index> interior_indices(OperatorFamily family, const std::vector<Index>& shape) {
  std::vector<Index> limit;
  for (Index e : shape) limit.push_back(e - 2);
  std::vector<Index> nodes;
  for_each_index(limit, [&](const std::vector<Index>& at) {
    std::vector<Index> shifted = at;
    for (auto& v : shifted) ++v;
    nodes.push_back(node_index(shape, shifted));
  });
  if (family == OperatorFamily::SymGrad2D) {
    const Index n = node_count(shape);
    const std::size_t k = nodes.size();
    for (std::size_t i = 0; i < k; ++i) nodes.push_back(nodes[i] + n);
  }
  return nodes;
}

BuiltOperator build_operator(const OperatorSpec& spec) {
  if (spec.family == OperatorFamily::Custom) {
    if (spec.path.empty()) throw InputError("custom operator needs a Matrix Market path");
    return {read_matrix_market(spec.path), "custom", std::nullopt};
  }
  const std::size_t dims = dimensions_of(spec.family);
  if (spec.boundary == Boundary::Free) {
    require_shape(spec, dims, 2);
    return build_free(spec);
  }

  if (spec.family == OperatorFamily::Curl3D)
    throw CapabilityError("curl3d is only built with free boundary");
  require_shape(spec, dims, 1);
  OperatorSpec extended = spec;
  extended.boundary = Boundary::Free;
  for (auto& e : extended.shape) e += 2;
  BuiltOperator full = build_free(extended);
  const Matrix lifted =
      full.matrix.dense() *
      extension_matrix(full.matrix.cols(), interior_indices(spec.family, extended.shape));

  std::vector<Index> keep;
  for (Index r = 0; r < lifted.rows(); ++r)
    if (lifted.row(r).any()) keep.push_back(r);
  Matrix compact(static_cast<Index>(keep.size()), lifted.cols());
  std::optional<Vector> weights;
  if (full.voigt_weights) weights = Vector(static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    compact.row(static_cast<Index>(k)) = lifted.row(keep[k]);
    if (weights) (*weights)(static_cast<Index>(k)) = (*full.voigt_weights)(keep[k]);
  }
  return {LinearMap(std::move(compact)), "trivial (zero boundary)", std::move(weights)};
}

OperatorPair operator_pair(const OperatorSpec& spec) {
  if (spec.family == OperatorFamily::Custom || spec.family == OperatorFamily::Curl3D) {
    throw CapabilityError(std::string("operator_pair does not support ") + to_string(spec.family));
  }
  require_shape(spec, dimensions_of(spec.family), 3);
  OperatorSpec free_spec = spec;
  free_spec.boundary = Boundary::Free;
  BuiltOperator big = build_free(free_spec);
  const std::vector<Index> interior = interior_indices(spec.family, spec.shape);
  const Matrix e = extension_matrix(big.matrix.cols(), interior);
  BuiltOperator small{LinearMap(big.matrix.dense() * e), "trivial (zero boundary)",
                      big.voigt_weights};
  Subspace inclusion(big.matrix.cols(), e);
  return {std::move(small), std::move(big), std::move(inclusion)};
}

LinearMap divergence(const BuiltOperator& grad) { return LinearMap(-grad.matrix.dense().transpose()); }

double poincare_constant(const BuiltOperator& op) {
  const Matrix& m = op.matrix.dense();
  if (m.rows() < m.cols()) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace ellinc
