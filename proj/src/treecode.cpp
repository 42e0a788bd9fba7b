#include "hikersolve/treecode.hpp"

#include "hikersolve/parallel.hpp"

#include <stdexcept>

namespace hikersolve {

HierarchicalOperator::HierarchicalOperator(PartitionTree tree, SkeletonSet skeletons, KernelSpec kernel)
    : tree_(std::move(tree)), skeletons_(std::move(skeletons)), kernel_(kernel) {
  kernel_.validate(tree_.points().dim());
  if (!kernel_.symmetric())
    throw std::invalid_argument("HierarchicalOperator: only symmetric kernels are supported");
  if (skeletons_.size() + 1 != static_cast<std::size_t>(tree_.node_count()))
    throw std::invalid_argument("HierarchicalOperator: skeleton set does not match tree");

  const std::size_t count = static_cast<std::size_t>(tree_.node_count());
  coupling_.resize(count);
  leaf_blocks_.resize(count);
  const auto& pts = tree_.points();
  parallel_for(count, [&](std::size_t i) {
    const TreeNode& nd = tree_.node(static_cast<Index>(i));
    if (nd.is_leaf()) {
      leaf_blocks_[i] = eval_block(kernel_, pts, nd.begin, nd.end, nd.begin, nd.end);
    } else {
      coupling_[i] = eval_block(kernel_, pts, skeletons_.at(nd.left).points, skeletons_.at(nd.right).points);
    }
  });
}

SkeletonWeights HierarchicalOperator::upward_pass(const Vector& w) const {
  if (w.size() != size()) throw std::invalid_argument("upward_pass: vector length mismatch");
  SkeletonWeights wt(static_cast<std::size_t>(tree_.node_count()));
  for (int level = tree_.depth(); level >= 1; --level) {
    const auto ids = tree_.level_nodes(level);
    parallel_for(ids.size(), [&](std::size_t i) {
      const Index id = ids[i];
      const TreeNode& nd = tree_.node(id);
      const Matrix& p = skeletons_.at(id).interp;
      if (nd.is_leaf()) {
        wt[static_cast<std::size_t>(id)] = p * w.segment(nd.begin, nd.size());
      } else {
        const Vector& a = wt[static_cast<std::size_t>(nd.left)];
        const Vector& b = wt[static_cast<std::size_t>(nd.right)];
        Vector stacked(a.size() + b.size());
        stacked << a, b;
        wt[static_cast<std::size_t>(id)] = p * stacked;
      }
    });
  }
  return wt;
}

Vector HierarchicalOperator::hmatvec(const Vector& w, double lambda) const {
  if (w.size() != size()) throw std::invalid_argument("hmatvec: vector length mismatch");
  const SkeletonWeights wt = upward_pass(w);

  // Skeleton-space far-field accumulators, pushed downward through P^T.
  std::vector<Vector> far(static_cast<std::size_t>(tree_.node_count()));
  for (Index id = 1; id < tree_.node_count(); ++id)
    far[static_cast<std::size_t>(id)] = Vector::Zero(skeletons_.rank(id));

  for (int level = 0; level < tree_.depth(); ++level) {
    const auto ids = tree_.level_nodes(level);
    parallel_for(ids.size(), [&](std::size_t i) {
      const Index id = ids[i];
      const TreeNode& nd = tree_.node(id);
      Vector& zl = far[static_cast<std::size_t>(nd.left)];
      Vector& zr = far[static_cast<std::size_t>(nd.right)];
      const Matrix& k = coupling_[static_cast<std::size_t>(id)];
      zl.noalias() += k * wt[static_cast<std::size_t>(nd.right)];
      zr.noalias() += k.transpose() * wt[static_cast<std::size_t>(nd.left)];
      if (id != tree_.root()) {
        const Vector t = skeletons_.at(id).interp.transpose() * far[static_cast<std::size_t>(id)];
        zl += t.head(zl.size());
        zr += t.tail(zr.size());
      }
    });
  }

  Vector u(size());
  const auto leaves = tree_.leaves();
  parallel_for(leaves.size(), [&](std::size_t i) {
    const Index id = leaves[i];
    const TreeNode& nd = tree_.node(id);
    auto ws = w.segment(nd.begin, nd.size());
    Vector out = leaf_blocks_[static_cast<std::size_t>(id)] * ws;
    out += lambda * ws;
    if (id != tree_.root()) out.noalias() += skeletons_.at(id).interp.transpose() * far[static_cast<std::size_t>(id)];
    u.segment(nd.begin, nd.size()) = out;
  });
  return u;
}

Vector HierarchicalOperator::apply(const Vector& w, double lambda, bool in_tree_order) const {
  if (in_tree_order) return hmatvec(w, lambda);
  return tree_.to_input_order(hmatvec(tree_.to_tree_order(w), lambda));
}

Matrix HierarchicalOperator::materialize(double lambda) const {
  if (size() > kMaterializeMaxPoints)
    throw std::invalid_argument("materialize: n exceeds " + std::to_string(kMaterializeMaxPoints));
  Matrix out(size(), size());
  for (Index j = 0; j < size(); ++j) {
    Vector e = Vector::Zero(size());
    e(j) = 1.0;
    out.col(j) = hmatvec(e, lambda);
  }
  return out;
}

}  // namespace hikersolve
