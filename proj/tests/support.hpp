#pragma once

// Shared fixtures and independent reference computations for the tests.
// Nothing here calls the library's factorizations; oracles are written
// from scratch (plain loops) or use Eigen's own decompositions.

#include "hikersolve/direct_solver.hpp"
#include "hikersolve/points.hpp"
#include "hikersolve/random.hpp"
#include "hikersolve/treecode.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

namespace testing_support {

using hikersolve::Index;
using hikersolve::Matrix;
using hikersolve::Vector;

inline Matrix gaussian_matrix(Index m, Index n, std::uint64_t seed) {
  hikersolve::Rng rng(seed);
  Matrix a(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) a(i, j) = rng.normal();
  return a;
}

inline Vector gaussian_vector(Index n, std::uint64_t seed) { return gaussian_matrix(n, 1, seed).col(0); }

inline Matrix orthonormal_columns(Index m, Index k, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(m, k, seed));
  return qr.householderQ() * Matrix::Identity(m, k);
}

/// U diag(s) V^T with random orthonormal U, V.
inline Matrix with_singular_values(Index m, Index n, const Vector& s, std::uint64_t seed) {
  const Index k = s.size();
  return orthonormal_columns(m, k, seed) * s.asDiagonal() *
         orthonormal_columns(n, k, hikersolve::derive_seed(seed, 1)).transpose();
}

/// Textbook Gaussian elimination with partial pivoting on a copy, then
/// back substitution. Deliberately unblocked and independent.
inline Matrix elimination_solve(const Matrix& a_in, const Matrix& b_in) {
  const std::size_t n = static_cast<std::size_t>(a_in.rows());
  const std::size_t k = static_cast<std::size_t>(b_in.cols());
  std::vector<std::vector<double>> a(n, std::vector<double>(n)), b(n, std::vector<double>(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = a_in(static_cast<Index>(i), static_cast<Index>(j));
    for (std::size_t j = 0; j < k; ++j) b[i][j] = b_in(static_cast<Index>(i), static_cast<Index>(j));
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(a[i][c]) > std::abs(a[p][c])) p = i;
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t i = c + 1; i < n; ++i) {
      const double f = a[i][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
      for (std::size_t j = 0; j < k; ++j) b[i][j] -= f * b[c][j];
    }
  }
  Matrix x(static_cast<Index>(n), static_cast<Index>(k));
  for (std::size_t jj = 0; jj < k; ++jj) {
    for (std::size_t ii = n; ii-- > 0;) {
      double s = b[ii][jj];
      for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii][j] * x(static_cast<Index>(j), static_cast<Index>(jj));
      x(static_cast<Index>(ii), static_cast<Index>(jj)) = s / a[ii][ii];
    }
  }
  return x;
}

/// Direct kernel evaluation from the closed forms, entry by entry.
inline double kernel_entry(const hikersolve::KernelSpec& k, std::span<const double> x,
                           std::span<const double> y) {
  double d2 = 0.0, dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d2 += (x[i] - y[i]) * (x[i] - y[i]);
    dot += x[i] * y[i];
  }
  switch (k.family) {
    case hikersolve::KernelFamily::gaussian:
      return std::exp(-d2 / (2.0 * k.bandwidth * k.bandwidth));
    case hikersolve::KernelFamily::laplace3d:
      return d2 == 0.0 ? 0.0 : 1.0 / (4.0 * std::numbers::pi * std::sqrt(d2));
    case hikersolve::KernelFamily::polynomial:
      return std::pow(dot + k.shift, k.degree);
  }
  return 0.0;
}

inline Matrix reference_kernel_matrix(const hikersolve::KernelSpec& k, const hikersolve::PointSet& ps,
                                      double lambda) {
  const Index n = static_cast<Index>(ps.size());
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      a(i, j) = kernel_entry(k, ps.point(static_cast<std::size_t>(i)), ps.point(static_cast<std::size_t>(j)));
  a.diagonal().array() += lambda;
  return a;
}

inline hikersolve::PointSet cube(std::size_t n, std::size_t d, std::uint64_t seed) {
  return hikersolve::generate({hikersolve::Shape::uniform_cube, d, 4}, n, seed);
}

inline hikersolve::KernelSpec gaussian(double h, double lambda) {
  hikersolve::KernelSpec k;
  k.family = hikersolve::KernelFamily::gaussian;
  k.bandwidth = h;
  k.lambda = lambda;
  return k;
}

inline std::unique_ptr<hikersolve::HierarchicalOperator> make_operator(
    const hikersolve::PointSet& ps, const hikersolve::KernelSpec& kernel, Index leaf,
    const hikersolve::SkeletonConfig& cfg, std::uint64_t tree_seed = 1) {
  auto tree = hikersolve::build_tree(ps, leaf, tree_seed);
  auto skel = hikersolve::build_skeletons(tree, kernel, cfg);
  return std::make_unique<hikersolve::HierarchicalOperator>(std::move(tree), std::move(skel), kernel);
}

inline double relerr(const Vector& a, const Vector& b) { return (a - b).norm() / b.norm(); }

}  // namespace testing_support
