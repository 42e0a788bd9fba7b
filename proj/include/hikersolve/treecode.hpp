#pragma once

#include "hikersolve/kernels.hpp"
#include "hikersolve/linalg.hpp"
#include "hikersolve/skeleton.hpp"
#include "hikersolve/tree.hpp"

#include <vector>

namespace hikersolve {

/// Skeleton-space weights, indexed by node id (root slot unused).
using SkeletonWeights = std::vector<Vector>;

/// The compressed kernel matrix K~ defined by a tree and nested skeletons:
///   K~_leaf  = K(leaf, leaf)
///   K~_alpha = blkdiag(K~_beta, K~_gamma)
///              + [[0, Ph_b^T K(q_b,q_g) Ph_g], [Ph_g^T K(q_g,q_b) Ph_b, 0]]
/// where Ph_nu is the telescoped interpolation basis of node nu. All vectors
/// handled here are in tree order unless a method says otherwise.
class HierarchicalOperator {
 public:
  HierarchicalOperator(PartitionTree tree, SkeletonSet skeletons, KernelSpec kernel);

  const PartitionTree& tree() const noexcept { return tree_; }
  const SkeletonSet& skeletons() const noexcept { return skeletons_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  Index size() const noexcept { return tree_.size(); }

  /// K(q_left, q_right) for internal node `node`; the lower coupling block is
  /// its transpose (symmetric kernels only).
  const Matrix& coupling(Index node) const { return coupling_[static_cast<std::size_t>(node)]; }
  /// Dense K(leaf, leaf) without the diagonal shift.
  const Matrix& leaf_block(Index node) const { return leaf_blocks_[static_cast<std::size_t>(node)]; }

  SkeletonWeights upward_pass(const Vector& w) const;

  /// (K~ + lambda I) w.
  Vector hmatvec(const Vector& w, double lambda) const;
  Vector hmatvec(const Vector& w) const { return hmatvec(w, kernel_.lambda); }
  Vector apply(const Vector& w, double lambda, bool in_tree_order) const;

  /// Explicit K~ + lambda I (tree order), one hmatvec per column. n <= 4096.
  Matrix materialize(double lambda) const;

 private:
  PartitionTree tree_;
  SkeletonSet skeletons_;
  KernelSpec kernel_;
  std::vector<Matrix> coupling_;
  std::vector<Matrix> leaf_blocks_;
};

inline constexpr Index kMaterializeMaxPoints = 4096;

inline SkeletonWeights upward_pass(const HierarchicalOperator& op, const Vector& w) {
  return op.upward_pass(w);
}
inline Vector hmatvec(const HierarchicalOperator& op, const Vector& w, double lambda) {
  return op.hmatvec(w, lambda);
}
inline Matrix materialize_ktilde(const HierarchicalOperator& op, double lambda) {
  return op.materialize(lambda);
}

}  // namespace hikersolve
