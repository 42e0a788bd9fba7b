#pragma once

#include "hikersolve/linalg.hpp"
#include "hikersolve/points.hpp"

#include <cstdint>
#include <vector>

namespace hikersolve {

struct TreeNode {
  int level = 0;
  /// Range [begin, end) into tree order.
  Index begin = 0;
  Index end = 0;
  Index parent = -1;
  Index left = -1;
  Index right = -1;
  /// Unit split direction and the projection value separating the children
  /// (empty / 0 for leaves); diagnostics only.
  std::vector<double> split_direction;
  double split_value = 0.0;

  Index size() const noexcept { return end - begin; }
  bool is_leaf() const noexcept { return left < 0; }
};

/// Balanced binary partition. All leaves sit on the same level; node ids are
/// heap ordered (children of i are 2i+1, 2i+2), so each level is a
/// contiguous id range ordered by range begin.
class PartitionTree {
 public:
  /// perm[t] is the input index of the point stored at tree position t.
  const std::vector<std::size_t>& perm() const noexcept { return perm_; }
  /// inverse()[i] is the tree position of input point i.
  const std::vector<std::size_t>& inverse() const noexcept { return inverse_; }
  /// Points physically reordered into tree order.
  const PointSet& points() const noexcept { return points_; }

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& node(Index id) const { return nodes_[static_cast<std::size_t>(id)]; }
  Index node_count() const noexcept { return static_cast<Index>(nodes_.size()); }
  Index root() const noexcept { return 0; }
  Index sibling(Index id) const noexcept { return id % 2 == 1 ? id + 1 : id - 1; }

  /// Number of edges from root to the leaves.
  int depth() const noexcept { return depth_; }
  Index leaf_size() const noexcept { return leaf_size_; }
  Index size() const noexcept { return static_cast<Index>(perm_.size()); }

  /// Node ids at one level, ordered by range begin.
  std::vector<Index> level_nodes(int level) const;
  /// All levels, deepest first when bottom_up is set.
  std::vector<std::vector<Index>> levels(bool bottom_up) const;
  std::vector<Index> leaves() const { return level_nodes(depth_); }

  Vector to_tree_order(const Vector& input_order) const;
  Vector to_input_order(const Vector& tree_order) const;
  Matrix to_tree_order(const Matrix& input_order) const;
  Matrix to_input_order(const Matrix& tree_order) const;

 private:
  friend PartitionTree build_tree(const PointSet& ps, Index leaf_size, std::uint64_t seed);

  std::vector<std::size_t> perm_;
  std::vector<std::size_t> inverse_;
  PointSet points_;
  std::vector<TreeNode> nodes_;
  int depth_ = 0;
  Index leaf_size_ = 0;
};

/// Recursive median split along the direction of maximal spread (dominant
/// eigenvector of the node's centered second moment, 10 power steps from a
/// seeded start). Left children take ceil(size/2) points.
PartitionTree build_tree(const PointSet& ps, Index leaf_size, std::uint64_t seed);

/// Depth required so that every leaf holds at most leaf_size points.
int tree_depth_for(Index n, Index leaf_size);

/// Exact k nearest neighbors (self excluded), ties by lower index.
/// Row i of the result lists the neighbors of point i. Guarded to n <= 65536.
std::vector<std::vector<Index>> knn_bruteforce(const PointSet& ps, Index k);

inline constexpr std::size_t kKnnMaxPoints = 65536;

}  // namespace hikersolve
