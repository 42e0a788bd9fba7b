#pragma once

// Randomized invariant checks shared by the property tests and the
// acceptance binary. Each check returns an empty string on success or a
// description of the first violation.

#include "hikersolve/config.hpp"
#include "hikersolve/points.hpp"
#include "hikersolve/random.hpp"
#include "hikersolve/report.hpp"
#include "hikersolve/skeleton.hpp"
#include "hikersolve/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace properties {

using namespace hikersolve;

inline constexpr int kCases = 200;

inline std::string describe(int seed, const std::string& what) {
  std::ostringstream os;
  os << "case " << seed << ": " << what;
  return os.str();
}

inline PointSet random_points(Rng& rng, std::size_t n, std::size_t d) {
  static const Shape shapes[] = {Shape::uniform_cube, Shape::sphere_surface, Shape::gaussian_mixture};
  const Shape shape = shapes[rng.below(3)];
  return generate({shape, d, 1 + static_cast<std::size_t>(rng.below(5))}, n, rng.next_u64());
}

/// Permutation is a bijection, children partition their parent, siblings
/// differ by at most one point, every leaf sits on the last level and holds
/// between the balance floor and m points, and the level concatenation
/// covers [0, n) in order.
inline std::string check_tree(int c) {
  Rng rng(hikersolve::derive_seed(0x7ee, static_cast<std::uint64_t>(c)));
  const std::size_t n = 1 + rng.below(3000);
  const std::size_t d = 1 + rng.below(4);
  const Index m = 2 + static_cast<Index>(rng.below(200));
  const PointSet ps = random_points(rng, n, d);
  const PartitionTree t = build_tree(ps, m, rng.next_u64());

  std::vector<char> seen(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t i = t.perm()[pos];
    if (i >= n || seen[i]) return describe(c, "perm is not a bijection");
    seen[i] = 1;
    if (t.inverse()[i] != pos) return describe(c, "inverse does not invert perm");
    for (std::size_t k = 0; k < d; ++k)
      if (t.points()(pos, k) != ps(i, k)) return describe(c, "points are not stored in tree order");
  }
  if (t.depth() != tree_depth_for(static_cast<Index>(n), m)) return describe(c, "unexpected depth");

  const Index floor_size = m % 2 == 0 ? m / 2 : (m - 1) / 2;
  for (int level = 0; level <= t.depth(); ++level) {
    Index cursor = 0;
    for (Index id : t.level_nodes(level)) {
      const TreeNode& nd = t.node(id);
      if (nd.level != level || nd.begin != cursor) return describe(c, "level ranges do not tile [0, n)");
      cursor = nd.end;
      if (level == t.depth()) {
        if (!nd.is_leaf()) return describe(c, "node below last level");
        if (nd.size() > m) return describe(c, "leaf larger than m");
        if (static_cast<Index>(n) >= m && nd.size() < floor_size) return describe(c, "leaf below balance floor");
      } else {
        if (nd.is_leaf()) return describe(c, "leaf above last level");
        const TreeNode& l = t.node(nd.left);
        const TreeNode& r = t.node(nd.right);
        if (l.begin != nd.begin || l.end != r.begin || r.end != nd.end)
          return describe(c, "children do not partition parent");
        if (l.size() - r.size() < 0 || l.size() - r.size() > 1) return describe(c, "siblings unbalanced");
        if (l.parent != id || r.parent != id || t.sibling(nd.left) != nd.right)
          return describe(c, "parent/sibling links broken");
      }
    }
    if (cursor != static_cast<Index>(n)) return describe(c, "level does not cover all points");
  }
  return {};
}

/// Skeletons are nested (drawn from the candidate set), distinct, within the
/// rank cap, and the interpolation matrix holds an identity block at the
/// selected candidate positions.
inline std::string check_skeletons(int c) {
  Rng rng(hikersolve::derive_seed(0x5e1, static_cast<std::uint64_t>(c)));
  const std::size_t n = 64 + rng.below(600);
  const std::size_t d = 1 + rng.below(3);
  const PointSet ps = random_points(rng, n, d);
  const PartitionTree t = build_tree(ps, 16 + static_cast<Index>(rng.below(48)), rng.next_u64());

  KernelSpec kern;
  kern.family = d == 3 && rng.below(2) ? KernelFamily::laplace3d : KernelFamily::gaussian;
  kern.bandwidth = 0.1 + rng.uniform();
  SkeletonConfig cfg;
  cfg.tau = std::pow(10.0, -1.0 - 7.0 * rng.uniform());
  cfg.max_rank = 2 + static_cast<Index>(rng.below(24));
  cfg.samples = 16 + static_cast<Index>(rng.below(100));
  cfg.mode = rng.below(2) ? SampleMode::knn_augmented : SampleMode::uniform;
  cfg.seed = rng.next_u64();
  cfg.knn_k = 1 + static_cast<Index>(rng.below(10));
  NeighborLists nbrs;
  if (cfg.mode == SampleMode::knn_augmented) nbrs = knn_bruteforce(t.points(), cfg.knn_k);
  const SkeletonSet s = build_skeletons(t, kern, cfg, cfg.mode == SampleMode::knn_augmented ? &nbrs : nullptr);

  for (Index id = 1; id < t.node_count(); ++id) {
    const Skeleton& sk = s.at(id);
    const std::vector<Index> cand = skeleton_candidates(t, s, id);
    if (sk.rank() > cfg.max_rank) return describe(c, "rank above cap");
    if (sk.interp.rows() != sk.rank() || sk.interp.cols() != static_cast<Index>(cand.size()))
      return describe(c, "interp has wrong shape");
    if (sk.selected.size() != sk.points.size()) return describe(c, "selected/points length mismatch");
    std::vector<Index> sorted = sk.points;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return describe(c, "duplicate skeleton point");
    for (std::size_t j = 0; j < sk.points.size(); ++j) {
      const Index pos = sk.selected[j];
      if (pos < 0 || pos >= static_cast<Index>(cand.size()) || cand[static_cast<std::size_t>(pos)] != sk.points[j])
        return describe(c, "skeleton point not among candidates");
      for (Index i = 0; i < sk.rank(); ++i) {
        const double want = i == static_cast<Index>(j) ? 1.0 : 0.0;
        if (std::abs(sk.interp(i, pos) - want) > 1e-12) return describe(c, "interp lacks identity block");
      }
    }
    if (!sk.interp.allFinite()) return describe(c, "interp not finite");
  }
  return {};
}

/// Randomly assembled reports always validate; a random corruption of a
/// valid report never does.
inline std::string check_report_schema(int c) {
  Rng rng(hikersolve::derive_seed(0x7e9, static_cast<std::uint64_t>(c)));
  const double specials[] = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(),
                             -std::numeric_limits<double>::infinity(), 0.0, 1e308, 5e-324};
  auto value = [&] { return rng.below(4) == 0 ? specials[rng.below(6)] : std::exp(20.0 * rng.normal()); };

  Config cfg;
  cfg.kernel.lambda = value();
  if (!std::isfinite(cfg.kernel.lambda)) cfg.kernel.lambda = 1e-3;
  cfg.seed = rng.next_u64() >> 1;
  Report r(cfg);
  const auto items = rng.below(6);
  for (std::uint64_t i = 0; i < items; ++i) {
    r.set_timing("phase" + std::to_string(rng.below(4)), std::abs(value()));
    r.set_rank(static_cast<int>(rng.below(12)), static_cast<Index>(rng.below(300)));
    r.set_metric("metric" + std::to_string(rng.below(4)), value());
  }
  if (rng.below(2)) {
    KrylovReport k;
    k.iterations = static_cast<Index>(rng.below(50));
    for (Index i = 0; i < k.iterations; ++i) k.residuals.push_back(value());
    k.final_residual = std::abs(value());
    r.set_krylov(k);
  }
  nlohmann::json j = r.to_json();
  std::string why;
  if (!validate_report(j, &why)) return describe(c, "generated report rejected: " + why);
  if (!validate_report(nlohmann::json::parse(j.dump()), &why)) return describe(c, "reparsed report rejected: " + why);

  switch (rng.below(5)) {
    case 0: j["surprise"] = 1; break;
    case 1: j["version"] = "other"; break;
    case 2: j["errors"]["bad"] = "text"; break;
    case 3: j["ranks"]["-1"] = 3; break;
    default: j["config_echo"] = nullptr; break;
  }
  if (validate_report(j)) return describe(c, "corrupted report accepted");
  return {};
}

}  // namespace properties
