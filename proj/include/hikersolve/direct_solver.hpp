#pragma once

// Exact factorization of K~ + lambda I by recursive Sherman-Morrison-Woodbury.
//
// For an internal node a with children b, g write
//   A_a = D + U B U^T,  D = blkdiag(A_b, A_g),  U = blkdiag(Ph_b^T, Ph_g^T),
//   B   = [[0, K(q_b,q_g)], [K(q_g,q_b), 0]].
// With Th_a = blkdiag(Theta_b, Theta_g), Theta_nu = Ph_nu A_nu^{-1} Ph_nu^T,
//   A_a^{-1} = D^{-1} - D^{-1} U B Z^{-1} U^T D^{-1},   Z = I + Th_a B.
// Only Z must be invertible; B (zero diagonal blocks) may be singular.
// Since Ph_a = P_a U^T the skeleton-space quantities telescope:
//   Theta_a = P_a (Th - Th B Z^{-1} Th) P_a^T
//   A_a^{-1} Ph_a^T h = D^{-1} U C_a h,  C_a = (I - B Z^{-1} Th) P_a^T,
// so neither factorization nor solve ever re-descends a subtree.

#include "hikersolve/linalg.hpp"
#include "hikersolve/treecode.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace hikersolve {

class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(Index node, int level, double smallest_pivot, const std::string& detail);
  Index node() const noexcept { return node_; }
  int level() const noexcept { return level_; }
  double smallest_pivot() const noexcept { return smallest_pivot_; }

 private:
  Index node_;
  int level_;
  double smallest_pivot_;
};

struct NodeFactor {
  /// Leaf only: LU of K_leaf + lambda I.
  DenseFactor lu;
  /// Internal only: LU of Z = I + Th B. The reduced-system updates
  /// Th - Th B Z^{-1} Th and psi - Th g cancel heavily, so Z and everything
  /// computed from it at a node is carried in long double; the stored Theta
  /// and C are rounded back to double.
  ExtendedFactor z;
  /// Ph A^{-1} Ph^T (r x r); empty at the root.
  Matrix theta;
  /// Leaf only: A_leaf^{-1} P^T (m x r).
  Matrix phi;
  /// Internal non-root only: (I - B Z^{-1} Th) P^T, (r_b + r_g) x r.
  Matrix coeff;
};

struct FactorStats {
  /// Seconds spent per tree level (index = level).
  std::vector<double> level_seconds;
  std::vector<Index> level_max_rank;
  Index max_rank = 0;
  /// Largest pivot ratio over all Z factors (cheap conditioning proxy).
  double max_z_pivot_ratio = 0.0;
  double total_seconds = 0.0;
};

class Factorization {
 public:
  /// `op` must outlive the factorization.
  Factorization(const HierarchicalOperator& op, double lambda);

  const HierarchicalOperator& op() const noexcept { return *op_; }
  double lambda() const noexcept { return lambda_; }
  const NodeFactor& node(Index id) const { return factors_.at(static_cast<std::size_t>(id)); }
  const FactorStats& stats() const noexcept { return stats_; }

  /// x with (K~ + lambda I) x = b.
  Vector solve(const Vector& b, bool in_tree_order = true) const;
  /// Column-by-column solve; column j equals solve(b.col(j)) exactly.
  Matrix solve_multi(const Matrix& b, bool in_tree_order = true) const;

 private:
  Vector solve_tree_order(const Vector& b) const;

  const HierarchicalOperator* op_;
  double lambda_;
  std::vector<NodeFactor> factors_;
  FactorStats stats_;
};

inline Factorization factorize(const HierarchicalOperator& op, double lambda) {
  return Factorization(op, lambda);
}

/// Z pivots at or below this multiple of max|Z| abort the factorization.
inline constexpr double kZPivotTolerance = 1e-14;

}  // namespace hikersolve
