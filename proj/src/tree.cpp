#include "hikersolve/tree.hpp"

#include "hikersolve/parallel.hpp"
#include "hikersolve/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hikersolve {

int tree_depth_for(Index n, Index leaf_size) {
  int depth = 0;
  Index largest = n;
  while (largest > leaf_size) {
    largest = (largest + 1) / 2;
    ++depth;
  }
  return depth;
}

namespace {

constexpr int kPowerSteps = 10;

std::vector<double> dominant_direction(const PointSet& ps, std::span<const std::size_t> members,
                                       std::uint64_t seed) {
  const std::size_t d = ps.dim();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i : members)
    for (std::size_t k = 0; k < d; ++k) mean[k] += ps(i, k);
  for (double& v : mean) v /= static_cast<double>(members.size());

  Matrix moment = Matrix::Zero(static_cast<Index>(d), static_cast<Index>(d));
  Vector centered(static_cast<Index>(d));
  for (std::size_t i : members) {
    for (std::size_t k = 0; k < d; ++k) centered(static_cast<Index>(k)) = ps(i, k) - mean[k];
    moment.selfadjointView<Eigen::Lower>().rankUpdate(centered);
  }
  moment = moment.selfadjointView<Eigen::Lower>();

  Rng rng(seed);
  Vector dir(static_cast<Index>(d));
  for (Index k = 0; k < dir.size(); ++k) dir(k) = rng.normal();
  dir.normalize();
  for (int step = 0; step < kPowerSteps; ++step) {
    Vector next = moment * dir;
    const double nrm = next.norm();
    if (!(nrm > 0.0)) break;
    dir = next / nrm;
  }
  return {dir.data(), dir.data() + dir.size()};
}

}  // namespace

PartitionTree build_tree(const PointSet& ps, Index leaf_size, std::uint64_t seed) {
  if (leaf_size < 2) throw std::invalid_argument("build_tree: leaf size must be >= 2");
  ps.validate();

  PartitionTree tree;
  const Index n = static_cast<Index>(ps.size());
  tree.leaf_size_ = leaf_size;
  tree.depth_ = tree_depth_for(n, leaf_size);
  tree.perm_.resize(ps.size());
  std::iota(tree.perm_.begin(), tree.perm_.end(), std::size_t{0});

  const Index node_count = (Index{2} << tree.depth_) - 1;
  tree.nodes_.resize(static_cast<std::size_t>(node_count));
  tree.nodes_[0].begin = 0;
  tree.nodes_[0].end = n;

  for (int level = 0; level < tree.depth_; ++level) {
    const Index first = (Index{1} << level) - 1;
    const Index count = Index{1} << level;
    parallel_for(static_cast<std::size_t>(count), [&](std::size_t offset) {
      const Index id = first + static_cast<Index>(offset);
      TreeNode& node = tree.nodes_[static_cast<std::size_t>(id)];
      std::span<std::size_t> members(tree.perm_.data() + node.begin,
                                     static_cast<std::size_t>(node.size()));
      node.split_direction = dominant_direction(ps, members, derive_seed(seed, static_cast<std::uint64_t>(id)));

      std::vector<std::pair<double, std::size_t>> keyed;
      keyed.reserve(members.size());
      for (std::size_t i : members) {
        double proj = 0.0;
        for (std::size_t k = 0; k < ps.dim(); ++k) proj += node.split_direction[k] * ps(i, k);
        keyed.emplace_back(proj, i);
      }
      std::sort(keyed.begin(), keyed.end());
      for (std::size_t j = 0; j < keyed.size(); ++j) members[j] = keyed[j].second;

      const Index left_size = (node.size() + 1) / 2;
      node.split_value = 0.5 * (keyed[static_cast<std::size_t>(left_size - 1)].first +
                                keyed[static_cast<std::size_t>(left_size)].first);
      node.left = 2 * id + 1;
      node.right = 2 * id + 2;
      TreeNode& l = tree.nodes_[static_cast<std::size_t>(node.left)];
      TreeNode& r = tree.nodes_[static_cast<std::size_t>(node.right)];
      l.level = r.level = level + 1;
      l.parent = r.parent = id;
      l.begin = node.begin;
      l.end = node.begin + left_size;
      r.begin = l.end;
      r.end = node.end;
    });
  }

  tree.inverse_.resize(tree.perm_.size());
  for (std::size_t t = 0; t < tree.perm_.size(); ++t) tree.inverse_[tree.perm_[t]] = t;
  tree.points_ = ps.permuted(tree.perm_);
  return tree;
}

std::vector<Index> PartitionTree::level_nodes(int level) const {
  if (level < 0 || level > depth_) throw std::out_of_range("level out of range");
  std::vector<Index> ids(std::size_t{1} << level);
  std::iota(ids.begin(), ids.end(), (Index{1} << level) - 1);
  return ids;
}

std::vector<std::vector<Index>> PartitionTree::levels(bool bottom_up) const {
  std::vector<std::vector<Index>> out;
  for (int l = 0; l <= depth_; ++l) out.push_back(level_nodes(l));
  if (bottom_up) std::reverse(out.begin(), out.end());
  return out;
}

Vector PartitionTree::to_tree_order(const Vector& input_order) const {
  if (input_order.size() != size()) throw std::invalid_argument("to_tree_order: length mismatch");
  Vector out(input_order.size());
  for (std::size_t t = 0; t < perm_.size(); ++t)
    out(static_cast<Index>(t)) = input_order(static_cast<Index>(perm_[t]));
  return out;
}

Vector PartitionTree::to_input_order(const Vector& tree_order) const {
  if (tree_order.size() != size()) throw std::invalid_argument("to_input_order: length mismatch");
  Vector out(tree_order.size());
  for (std::size_t t = 0; t < perm_.size(); ++t)
    out(static_cast<Index>(perm_[t])) = tree_order(static_cast<Index>(t));
  return out;
}

Matrix PartitionTree::to_tree_order(const Matrix& input_order) const {
  if (input_order.rows() != size()) throw std::invalid_argument("to_tree_order: row mismatch");
  Matrix out(input_order.rows(), input_order.cols());
  for (std::size_t t = 0; t < perm_.size(); ++t)
    out.row(static_cast<Index>(t)) = input_order.row(static_cast<Index>(perm_[t]));
  return out;
}

Matrix PartitionTree::to_input_order(const Matrix& tree_order) const {
  if (tree_order.rows() != size()) throw std::invalid_argument("to_input_order: row mismatch");
  Matrix out(tree_order.rows(), tree_order.cols());
  for (std::size_t t = 0; t < perm_.size(); ++t)
    out.row(static_cast<Index>(perm_[t])) = tree_order.row(static_cast<Index>(t));
  return out;
}

std::vector<std::vector<Index>> knn_bruteforce(const PointSet& ps, Index k) {
  const std::size_t n = ps.size();
  if (n > kKnnMaxPoints)
    throw std::invalid_argument("knn_bruteforce: n exceeds " + std::to_string(kKnnMaxPoints));
  if (n == 0 || k < 0 || static_cast<std::size_t>(k) >= n)
    throw std::invalid_argument("knn_bruteforce: k must be in [0, n-1]");

  std::vector<std::vector<Index>> out(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::pair<double, Index>> cand;
    cand.reserve(n - 1);
    const auto x = ps.point(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto y = ps.point(j);
      double d2 = 0.0;
      for (std::size_t c = 0; c < ps.dim(); ++c) {
        const double diff = x[c] - y[c];
        d2 += diff * diff;
      }
      cand.emplace_back(d2, static_cast<Index>(j));
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    out[i].reserve(static_cast<std::size_t>(k));
    for (Index j = 0; j < k; ++j) out[i].push_back(cand[static_cast<std::size_t>(j)].second);
  });
  return out;
}

}  // namespace hikersolve
