#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ellinc/linear_map.hpp"
#include "ellinc/subspace.hpp"

namespace ellinc {

enum class OperatorFamily { Grad1D, Grad2D, Grad3D, SymGrad2D, Curl3D, Custom };
enum class Boundary { ZeroBoundary, Free };

const char* to_string(OperatorFamily family) noexcept;
const char* to_string(Boundary boundary) noexcept;

/// Grid-based discrete differential operator description.
///
/// `shape` lists the extents of the unknown grid: interior nodes for
/// ZeroBoundary, all nodes for Free. Nodes are numbered lexicographically
/// with the first axis fastest.
struct OperatorSpec {
  OperatorFamily family = OperatorFamily::Grad1D;
  std::vector<Index> shape;
  double spacing = 1.0;
  Boundary boundary = Boundary::Free;
  std::filesystem::path path;  // Matrix Market file for Custom
};

struct BuiltOperator {
  LinearMap matrix;
  std::string kernel_hint;
  /// Per-row weight folded into the rows (1, 1, sqrt(2) per point for the
  /// symmetric gradient).
  std::optional<Vector> voigt_weights;
};

/// Forward differences scaled by 1/h.
///
/// Free: every grid node is an unknown and each row differences two
/// adjacent nodes. ZeroBoundary: the unknowns are the interior nodes and
/// values outside the index set are zero; rows that vanish identically are
/// dropped. Grad rows are ordered axis by axis. SymGrad2D unknowns are
/// (u1 block, u2 block); each point contributes h*(e11, e22, sqrt(2) e12)
/// so the Euclidean norm is the h^2-weighted trace norm. Curl3D (Free
/// only) maps edge unknowns, ordered like Grad3D rows, to face values.
BuiltOperator build_operator(const OperatorSpec& spec);

/// The zero-boundary and free operators on one grid, sharing a codomain.
struct OperatorPair {
  /// Free operator composed with zero extension: columns are interior
  /// unknowns, rows are all free-operator rows (some identically zero).
  BuiltOperator zero_boundary;
  BuiltOperator free;
  /// Interior coordinate directions inside the free unknown space; with
  /// E its basis, free * E == zero_boundary exactly.
  Subspace inclusion;
};

/// `spec.shape` gives the total node extents (each >= 3); the boundary
/// field is ignored. Dirichlet problems use (A, C) = (zero_boundary, free),
/// Neumann problems use (A, C) = (free, zero_boundary via inclusion).
/// Throws CapabilityError for Curl3D and Custom.
OperatorPair operator_pair(const OperatorSpec& spec);

/// Interior node indices of the grid of total extents `shape`, ordered
/// lexicographically; for SymGrad2D both displacement blocks are listed.
std::vector<Index> interior_indices(OperatorFamily family, const std::vector<Index>& shape);

/// div = -grad^T.
LinearMap divergence(const BuiltOperator& grad);

/// Smallest singular value of the matrix (0 if rank deficient).
double poincare_constant(const BuiltOperator& op);

}  // namespace ellinc
