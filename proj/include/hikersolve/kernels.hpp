#pragma once

#include "hikersolve/linalg.hpp"
#include "hikersolve/points.hpp"

#include <span>
#include <string>

namespace hikersolve {

enum class KernelFamily { gaussian, laplace3d, polynomial };

KernelFamily parse_kernel_family(const std::string& name);
std::string to_string(KernelFamily family);

struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  /// Gaussian bandwidth h: k(x,y) = exp(-|x-y|^2 / (2 h^2)).
  double bandwidth = 0.5;
  /// Polynomial kernel (x.y + shift)^degree.
  int degree = 2;
  double shift = 1.0;
  /// Diagonal shift of the system K + lambda I. Never enters eval_block.
  double lambda = 1e-3;

  /// Checks parameter ranges and, when dim > 0, dimensional compatibility.
  void validate(std::size_t dim = 0) const;

  /// All supported families are symmetric; kept as a query so the solver
  /// can refuse anything else.
  bool symmetric() const noexcept { return true; }

  double entry(std::span<const double> x, std::span<const double> y) const noexcept;
};

inline double eval_system_diag_shift(const KernelSpec& k) noexcept { return k.lambda; }

/// K(targets[ti], sources[si]) as a |ti| x |si| matrix.
Matrix eval_block(const KernelSpec& k, const PointSet& targets, std::span<const Index> ti,
                  const PointSet& sources, std::span<const Index> si);

/// Same point set on both sides.
Matrix eval_block(const KernelSpec& k, const PointSet& ps, std::span<const Index> rows,
                  std::span<const Index> cols);

/// Contiguous ranges [row_begin, row_end) x [col_begin, col_end).
Matrix eval_block(const KernelSpec& k, const PointSet& ps, Index row_begin, Index row_end,
                  Index col_begin, Index col_end);

/// Full cross block between two point sets.
Matrix eval_block(const KernelSpec& k, const PointSet& targets, const PointSet& sources);

}  // namespace hikersolve
