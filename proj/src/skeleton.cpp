#include "hikersolve/skeleton.hpp"

#include "hikersolve/parallel.hpp"
#include "hikersolve/random.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace hikersolve {

SampleMode parse_sample_mode(const std::string& name) {
  if (name == "uniform") return SampleMode::uniform;
  if (name == "knn_augmented" || name == "knn-augmented" || name == "knn") return SampleMode::knn_augmented;
  if (name == "exact") return SampleMode::exact;
  throw std::invalid_argument("unknown sample mode '" + name + "'");
}

std::string to_string(SampleMode mode) {
  switch (mode) {
    case SampleMode::uniform: return "uniform";
    case SampleMode::knn_augmented: return "knn_augmented";
    case SampleMode::exact: return "exact";
  }
  return "unknown";
}

namespace {

// Maps an index in [0, n - size) of the complement back to a tree position.
inline Index complement_position(Index j, Index begin, Index size) {
  return j < begin ? j : j + size;
}

void top_up_uniform(std::vector<Index>& chosen, Index target, Index n, Index begin, Index size,
                    Rng& rng) {
  const Index complement = n - size;
  target = std::min(target, complement);
  if (static_cast<Index>(chosen.size()) >= target) return;
  std::unordered_set<Index> taken(chosen.begin(), chosen.end());
  // Sparse draw; the complement is usually far larger than the target.
  if (2 * target < complement) {
    while (static_cast<Index>(chosen.size()) < target) {
      const Index pos = complement_position(static_cast<Index>(rng.below(static_cast<std::uint64_t>(complement))), begin, size);
      if (taken.insert(pos).second) chosen.push_back(pos);
    }
    return;
  }
  // Dense case: shuffle the remaining complement and take a prefix.
  std::vector<Index> rest;
  rest.reserve(static_cast<std::size_t>(complement));
  for (Index j = 0; j < complement; ++j) {
    const Index pos = complement_position(j, begin, size);
    if (!taken.count(pos)) rest.push_back(pos);
  }
  for (std::size_t i = 0; i + 1 < rest.size(); ++i) {
    const std::size_t k = i + static_cast<std::size_t>(rng.below(rest.size() - i));
    std::swap(rest[i], rest[k]);
  }
  const std::size_t need = static_cast<std::size_t>(target) - chosen.size();
  chosen.insert(chosen.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(need));
}

}  // namespace

std::vector<Index> sample_rows(const PartitionTree& tree, Index node, Index samples,
                               SampleMode mode, std::uint64_t seed,
                               const NeighborLists* neighbors, std::span<const Index> anchors) {
  if (samples < 1) throw std::invalid_argument("sample_rows: sample count must be >= 1");
  const TreeNode& nd = tree.node(node);
  const Index n = tree.size();
  const Index complement = n - nd.size();
  if (complement <= 0) throw std::invalid_argument("sample_rows: node has an empty complement");

  std::vector<Index> rows;
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(node)));
  switch (mode) {
    case SampleMode::exact:
      rows.reserve(static_cast<std::size_t>(complement));
      for (Index j = 0; j < complement; ++j) rows.push_back(complement_position(j, nd.begin, nd.size()));
      return rows;
    case SampleMode::uniform:
      top_up_uniform(rows, samples, n, nd.begin, nd.size(), rng);
      break;
    case SampleMode::knn_augmented: {
      if (neighbors == nullptr) throw std::invalid_argument("sample_rows: knn_augmented needs neighbor lists");
      std::vector<Index> own;
      if (anchors.empty()) {
        own.resize(static_cast<std::size_t>(nd.size()));
        std::iota(own.begin(), own.end(), nd.begin);
        anchors = own;
      }
      std::unordered_set<Index> seen;
      for (Index a : anchors) {
        for (Index nb : (*neighbors)[static_cast<std::size_t>(a)]) {
          if (nb >= nd.begin && nb < nd.end) continue;
          if (seen.insert(nb).second) rows.push_back(nb);
        }
      }
      std::sort(rows.begin(), rows.end());
      top_up_uniform(rows, samples, n, nd.begin, nd.size(), rng);
      break;
    }
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

Skeleton skeletonize_node(Index node, const KernelSpec& kernel, const PointSet& points,
                          std::span<const Index> rows, std::span<const Index> candidates,
                          double tau, Index max_rank) {
  Skeleton sk;
  sk.node = node;
  const Matrix a = eval_block(kernel, points, rows, candidates);
  InterpolativeDecomposition id = interpolative_decomposition(a, tau, max_rank);
  sk.selected = std::move(id.columns);
  sk.interp = std::move(id.interp);
  sk.points.reserve(sk.selected.size());
  for (Index j : sk.selected) sk.points.push_back(candidates[static_cast<std::size_t>(j)]);
  return sk;
}

namespace {

std::vector<Index> candidates_from(const PartitionTree& tree, const std::vector<Skeleton>& skeletons,
                                   Index node) {
  const TreeNode& nd = tree.node(node);
  std::vector<Index> out;
  if (nd.is_leaf()) {
    out.resize(static_cast<std::size_t>(nd.size()));
    std::iota(out.begin(), out.end(), nd.begin);
    return out;
  }
  const auto& left = skeletons[static_cast<std::size_t>(nd.left)].points;
  const auto& right = skeletons[static_cast<std::size_t>(nd.right)].points;
  out.reserve(left.size() + right.size());
  out.insert(out.end(), left.begin(), left.end());
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

}  // namespace

std::vector<Index> skeleton_candidates(const PartitionTree& tree, const SkeletonSet& set, Index node) {
  const TreeNode& nd = tree.node(node);
  std::vector<Index> out;
  if (nd.is_leaf()) {
    out.resize(static_cast<std::size_t>(nd.size()));
    std::iota(out.begin(), out.end(), nd.begin);
    return out;
  }
  const auto& left = set.at(nd.left).points;
  const auto& right = set.at(nd.right).points;
  out.insert(out.end(), left.begin(), left.end());
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

Index SkeletonSet::max_rank_on_level(const PartitionTree& tree, int level) const {
  Index best = 0;
  if (level == 0) return 0;
  for (Index id : tree.level_nodes(level)) best = std::max(best, rank(id));
  return best;
}

SkeletonSet build_skeletons(const PartitionTree& tree, const KernelSpec& kernel,
                            const SkeletonConfig& config, const NeighborLists* neighbors) {
  kernel.validate(tree.points().dim());
  if (!(config.tau > 0.0)) throw std::invalid_argument("build_skeletons: tau must be > 0");
  if (config.max_rank < 1) throw std::invalid_argument("build_skeletons: max_rank must be >= 1");

  NeighborLists computed;
  if (config.mode == SampleMode::knn_augmented && neighbors == nullptr && tree.size() > 1) {
    const Index k = std::min<Index>(config.knn_k, tree.size() - 1);
    computed = knn_bruteforce(tree.points(), k);
    neighbors = &computed;
  }

  std::vector<Skeleton> skeletons(static_cast<std::size_t>(tree.node_count()));
  const Index samples = config.effective_samples();
  for (int level = tree.depth(); level >= 1; --level) {
    const auto ids = tree.level_nodes(level);
    parallel_for(ids.size(), [&](std::size_t i) {
      const Index id = ids[i];
      try {
        const auto cand = candidates_from(tree, skeletons, id);
        const auto rows = sample_rows(tree, id, samples, config.mode, config.seed, neighbors, cand);
        skeletons[static_cast<std::size_t>(id)] =
            skeletonize_node(id, kernel, tree.points(), rows, cand, config.tau, config.max_rank);
      } catch (const std::exception& e) {
        throw std::runtime_error("skeletonization failed at node " + std::to_string(id) + ": " + e.what());
      }
    });
  }
  return SkeletonSet(std::move(skeletons), config);
}

}  // namespace hikersolve
