#pragma once

#include "hikersolve/kernels.hpp"
#include "hikersolve/linalg.hpp"
#include "hikersolve/tree.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hikersolve {

enum class SampleMode { uniform, knn_augmented, exact };

SampleMode parse_sample_mode(const std::string& name);
std::string to_string(SampleMode mode);

/// Neighbor lists indexed by tree position, entries are tree positions.
using NeighborLists = std::vector<std::vector<Index>>;

/// Rows sampled from the complement of `node` (tree positions, sorted,
/// distinct). `anchors` are the points whose neighbors seed knn_augmented
/// sampling; `neighbors` must be supplied in that mode.
std::vector<Index> sample_rows(const PartitionTree& tree, Index node, Index samples,
                               SampleMode mode, std::uint64_t seed,
                               const NeighborLists* neighbors = nullptr,
                               std::span<const Index> anchors = {});

/// Nested skeleton of one node: K(x, node) ~= K(x, skeleton) * P-hat for far x.
struct Skeleton {
  Index node = -1;
  /// Skeleton points q (tree positions).
  std::vector<Index> points;
  /// r x c interpolation matrix over the candidate columns (the node's points
  /// for a leaf, the children's skeleton points for an internal node).
  Matrix interp;
  /// Positions within the candidate list that were selected.
  std::vector<Index> selected;

  Index rank() const noexcept { return static_cast<Index>(points.size()); }
};

/// Skeletonizes one node from explicit sampled rows and candidate columns.
Skeleton skeletonize_node(Index node, const KernelSpec& kernel, const PointSet& points,
                          std::span<const Index> rows, std::span<const Index> candidates,
                          double tau, Index max_rank);

struct SkeletonConfig {
  double tau = 1e-5;
  Index max_rank = 64;
  /// Sampled rows per node; 0 selects max(4 * max_rank, 128).
  Index samples = 0;
  SampleMode mode = SampleMode::uniform;
  std::uint64_t seed = 0;
  /// Neighbors per point for knn_augmented sampling.
  Index knn_k = 8;

  Index effective_samples() const noexcept {
    return samples > 0 ? samples : std::max<Index>(4 * max_rank, 128);
  }
};

class SkeletonSet {
 public:
  SkeletonSet() = default;
  SkeletonSet(std::vector<Skeleton> skeletons, SkeletonConfig config)
      : skeletons_(std::move(skeletons)), config_(config) {}

  /// Undefined for the root.
  const Skeleton& at(Index node) const { return skeletons_.at(static_cast<std::size_t>(node)); }
  Index rank(Index node) const { return node == 0 ? 0 : at(node).rank(); }
  /// Number of stored (non-root) skeletons.
  std::size_t size() const noexcept { return skeletons_.empty() ? 0 : skeletons_.size() - 1; }
  const SkeletonConfig& config() const noexcept { return config_; }

  /// Largest rank on a level of the tree.
  Index max_rank_on_level(const PartitionTree& tree, int level) const;

 private:
  // Indexed by node id; slot 0 (root) is an empty placeholder.
  std::vector<Skeleton> skeletons_;
  SkeletonConfig config_;
};

/// Bottom-up nested skeletonization of every non-root node.
SkeletonSet build_skeletons(const PartitionTree& tree, const KernelSpec& kernel,
                            const SkeletonConfig& config,
                            const NeighborLists* neighbors = nullptr);

/// Candidate columns for a node: its points for a leaf, else the
/// concatenation of its children's skeletons.
std::vector<Index> skeleton_candidates(const PartitionTree& tree, const SkeletonSet& partial,
                                       Index node);

}  // namespace hikersolve
