#pragma once

#include <random>

#include "ellinc/types.hpp"

namespace ellinc::testing {

inline Vector gaussian(std::mt19937_64& rng, Index n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

inline Matrix gaussian_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> d(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = d(rng);
  return m;
}

/// rows x cols with rank exactly `rank` (almost surely).
inline Matrix random_rank(std::mt19937_64& rng, Index rows, Index cols, Index rank) {
  if (rank == 0) return Matrix::Zero(rows, cols);
  return gaussian_matrix(rng, rows, rank) * gaussian_matrix(rng, rank, cols);
}

inline Index uniform(std::mt19937_64& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random matrix whose symmetric part has smallest eigenvalue `c`.
inline Matrix random_pd(std::mt19937_64& rng, Index n, double c, double skew = 1.0) {
  const Matrix g = gaussian_matrix(rng, n, n);
  const Matrix k = gaussian_matrix(rng, n, n);
  Matrix s = g * g.transpose();
  s += (c - Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues()(0)) * Matrix::Identity(n, n);
  return s + skew * (k - k.transpose()) / 2.0;
}

}  // namespace ellinc::testing
