#include "hikersolve/direct_solver.hpp"

#include "hikersolve/parallel.hpp"

#include <chrono>
#include <sstream>

namespace hikersolve {

namespace {

std::string factorization_message(Index node, int level, double pivot, const std::string& detail) {
  std::ostringstream os;
  os << "factorization failed at node " << node << " (level " << level << "), smallest pivot "
     << pivot << ": " << detail << "; try a larger lambda or a tighter tau";
  return os.str();
}

// B * y for B = [[0, K], [K^T, 0]], y split as (rows(K), cols(K)).
template <class M, class Y>
Y apply_coupling(const M& k, const Y& y) {
  Y out(y.rows(), y.cols());
  out.topRows(k.rows()).noalias() = k * y.bottomRows(k.cols());
  out.bottomRows(k.cols()).noalias() = k.transpose() * y.topRows(k.rows());
  return out;
}

ExtendedMatrix extend(const Matrix& m) { return m.cast<long double>(); }

// Theta is symmetric in exact arithmetic; projecting onto the symmetric
// matrices can only move it closer to the exact value.
void symmetrize(Matrix& m) {
  const Matrix t = m.transpose();
  m = 0.5 * (m + t);
}

}  // namespace

FactorizationError::FactorizationError(Index node, int level, double smallest_pivot,
                                       const std::string& detail)
    : std::runtime_error(factorization_message(node, level, smallest_pivot, detail)),
      node_(node),
      level_(level),
      smallest_pivot_(smallest_pivot) {}

Factorization::Factorization(const HierarchicalOperator& op, double lambda)
    : op_(&op), lambda_(lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("factorize: lambda must be >= 0");
  if (!op.kernel().symmetric()) throw std::invalid_argument("factorize: kernel must be symmetric");

  using clock = std::chrono::steady_clock;
  const auto& tree = op.tree();
  const auto& skel = op.skeletons();
  factors_.resize(static_cast<std::size_t>(tree.node_count()));
  stats_.level_seconds.assign(static_cast<std::size_t>(tree.depth() + 1), 0.0);
  stats_.level_max_rank.assign(static_cast<std::size_t>(tree.depth() + 1), 0);
  std::vector<double> z_ratio(factors_.size(), 0.0);
  const auto start = clock::now();

  for (int level = tree.depth(); level >= 0; --level) {
    const auto level_start = clock::now();
    const auto ids = tree.level_nodes(level);
    parallel_for(ids.size(), [&](std::size_t i) {
      const Index id = ids[i];
      const TreeNode& nd = tree.node(id);
      NodeFactor& f = factors_[static_cast<std::size_t>(id)];
      const bool root = id == tree.root();

      if (nd.is_leaf()) {
        Matrix a = op.leaf_block(id);
        a.diagonal().array() += lambda;
        try {
          f.lu = DenseFactor(std::move(a));
        } catch (const SingularMatrixError& e) {
          throw FactorizationError(id, level, e.pivot(), "singular leaf block");
        }
        if (!root) {
          const Matrix& p = skel.at(id).interp;
          f.phi = f.lu.solve(Matrix(p.transpose()));
          f.theta.noalias() = p * f.phi;
          symmetrize(f.theta);
        }
        return;
      }

      const NodeFactor& fl = factors_[static_cast<std::size_t>(nd.left)];
      const NodeFactor& fr = factors_[static_cast<std::size_t>(nd.right)];
      const ExtendedMatrix k = extend(op.coupling(id));
      const ExtendedMatrix tl = extend(fl.theta), tr = extend(fr.theta);
      const Index rs = tl.rows() + tr.rows();
      ExtendedMatrix th = ExtendedMatrix::Zero(rs, rs);
      th.topLeftCorner(tl.rows(), tl.rows()) = tl;
      th.bottomRightCorner(tr.rows(), tr.rows()) = tr;

      // Th * B = [[0, Theta_b K], [Theta_g K^T, 0]]
      ExtendedMatrix th_b = ExtendedMatrix::Zero(rs, rs);
      th_b.topRightCorner(k.rows(), k.cols()).noalias() = tl * k;
      th_b.bottomLeftCorner(k.cols(), k.rows()).noalias() = tr * k.transpose();
      ExtendedMatrix z = th_b;
      z.diagonal().array() += 1.0L;
      try {
        f.z = ExtendedFactor(std::move(z), kZPivotTolerance);
      } catch (const SingularMatrixError& e) {
        throw FactorizationError(id, level, e.pivot(), "reduced system Z = I + Theta*B is singular");
      }
      z_ratio[static_cast<std::size_t>(id)] = f.z.pivot_ratio();

      if (!root) {
        const ExtendedMatrix p = extend(skel.at(id).interp);
        const ExtendedMatrix x = f.z.solve(th);  // Z^{-1} Th
        ExtendedMatrix inner = th;
        inner.noalias() -= th_b * x;
        f.theta = (p * inner * p.transpose()).cast<double>();
        symmetrize(f.theta);
        const ExtendedMatrix pt = p.transpose();
        f.coeff = (pt - apply_coupling(k, ExtendedMatrix(x * pt))).cast<double>();
      }
    });
    stats_.level_seconds[static_cast<std::size_t>(level)] =
        std::chrono::duration<double>(clock::now() - level_start).count();
    stats_.level_max_rank[static_cast<std::size_t>(level)] = skel.max_rank_on_level(tree, level);
    stats_.max_rank = std::max(stats_.max_rank, stats_.level_max_rank[static_cast<std::size_t>(level)]);
  }
  for (double r : z_ratio) stats_.max_z_pivot_ratio = std::max(stats_.max_z_pivot_ratio, r);
  stats_.total_seconds = std::chrono::duration<double>(clock::now() - start).count();
}

Vector Factorization::solve_tree_order(const Vector& b) const {
  const auto& op = *op_;
  const auto& tree = op.tree();
  const auto& skel = op.skeletons();
  if (b.size() != tree.size()) throw std::invalid_argument("solve: right-hand side length mismatch");

  Vector x(b.size());
  const std::size_t count = static_cast<std::size_t>(tree.node_count());
  std::vector<ExtendedVector> psi(count);
  std::vector<ExtendedVector> g(count);

  // Upward: local solves and skeleton projections psi = Ph A^{-1} b.
  for (int level = tree.depth(); level >= 0; --level) {
    const auto ids = tree.level_nodes(level);
    parallel_for(ids.size(), [&](std::size_t i) {
      const Index id = ids[i];
      const TreeNode& nd = tree.node(id);
      const NodeFactor& f = factors_[static_cast<std::size_t>(id)];
      if (nd.is_leaf()) {
        const Vector y = f.lu.solve(Vector(b.segment(nd.begin, nd.size())));
        x.segment(nd.begin, nd.size()) = y;
        if (id != tree.root()) psi[static_cast<std::size_t>(id)] = (skel.at(id).interp * y).cast<long double>();
        return;
      }
      const ExtendedVector& pl = psi[static_cast<std::size_t>(nd.left)];
      const ExtendedVector& pr = psi[static_cast<std::size_t>(nd.right)];
      ExtendedVector stacked(pl.size() + pr.size());
      stacked << pl, pr;
      const ExtendedVector s = f.z.solve(stacked);
      ExtendedVector gi = apply_coupling(extend(op.coupling(id)), s);
      if (id != tree.root()) {
        const Index rl = pl.size(), rr = pr.size();
        stacked.head(rl).noalias() -= extend(factors_[static_cast<std::size_t>(nd.left)].theta) * gi.head(rl);
        stacked.tail(rr).noalias() -= extend(factors_[static_cast<std::size_t>(nd.right)].theta) * gi.tail(rr);
        psi[static_cast<std::size_t>(id)] = extend(skel.at(id).interp) * stacked;
      }
      g[static_cast<std::size_t>(id)] = std::move(gi);
    });
  }

  if (tree.depth() == 0) return x;

  // Downward: accumulate corrections g' = g + C h and apply at the leaves.
  std::vector<ExtendedVector> gp(count);
  gp[0] = std::move(g[0]);
  auto incoming = [&](Index id) {
    const TreeNode& nd = tree.node(id);
    const ExtendedVector& parent = gp[static_cast<std::size_t>(nd.parent)];
    const Index r = skel.rank(id);
    return id == tree.node(nd.parent).left ? ExtendedVector(parent.head(r)) : ExtendedVector(parent.tail(r));
  };
  for (int level = 1; level < tree.depth(); ++level) {
    const auto ids = tree.level_nodes(level);
    parallel_for(ids.size(), [&](std::size_t i) {
      const Index id = ids[i];
      const ExtendedVector h = incoming(id);
      ExtendedVector out = std::move(g[static_cast<std::size_t>(id)]);
      out.noalias() += extend(factors_[static_cast<std::size_t>(id)].coeff) * h;
      gp[static_cast<std::size_t>(id)] = std::move(out);
    });
  }
  const auto leaves = tree.leaves();
  parallel_for(leaves.size(), [&](std::size_t i) {
    const Index id = leaves[i];
    const TreeNode& nd = tree.node(id);
    const ExtendedVector h = incoming(id);
    x.segment(nd.begin, nd.size()) -=
        (extend(factors_[static_cast<std::size_t>(id)].phi) * h).cast<double>();
  });
  return x;
}

Vector Factorization::solve(const Vector& b, bool in_tree_order) const {
  if (in_tree_order) return solve_tree_order(b);
  const auto& tree = op_->tree();
  return tree.to_input_order(solve_tree_order(tree.to_tree_order(b)));
}

Matrix Factorization::solve_multi(const Matrix& b, bool in_tree_order) const {
  Matrix x(b.rows(), b.cols());
  for (Index j = 0; j < b.cols(); ++j) x.col(j) = solve(Vector(b.col(j)), in_tree_order);
  return x;
}

}  // namespace hikersolve
