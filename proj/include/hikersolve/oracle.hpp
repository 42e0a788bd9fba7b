#pragma once

// Brute-force references. Depends only on linalg, kernels and points so
// that nothing here shares traversal code with the hierarchical paths.

#include "hikersolve/kernels.hpp"
#include "hikersolve/linalg.hpp"
#include "hikersolve/points.hpp"

namespace hikersolve {

inline constexpr std::size_t kDenseOracleMaxPoints = 8192;

/// K(ps, ps) + lambda I.
Matrix dense_kernel_matrix(const KernelSpec& kernel, const PointSet& ps, double lambda);

/// Solves A x = b by LU; optionally reports |A x - b| / |b|.
Vector dense_solve(const Matrix& a, const Vector& b, double* relative_residual = nullptr);
Matrix dense_inverse(const Matrix& a);

}  // namespace hikersolve
