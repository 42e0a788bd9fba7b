#include "hikersolve/tree.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace hikersolve;
using namespace testing_support;

TEST(BuildTree, CollinearPointsSplitAlongTheLine) {
  std::vector<double> c;
  for (int i = 0; i < 8; ++i) {
    c.push_back(0.1 * i);
    c.push_back(0.2 * i);
    c.push_back(-0.05 * i);
  }
  const PartitionTree t = build_tree(PointSet(8, 3, c), 2, 3);
  ASSERT_EQ(t.leaves().size(), 4u);
  for (Index id : t.leaves()) EXPECT_EQ(t.node(id).size(), 2);
  const double norm = std::sqrt(0.01 + 0.04 + 0.0025);
  const auto& dir = t.node(0).split_direction;
  ASSERT_EQ(dir.size(), 3u);
  const double cosine = (dir[0] * 0.1 + dir[1] * 0.2 - dir[2] * 0.05) / norm;
  EXPECT_GE(std::abs(cosine), 0.999);
}

TEST(BuildTree, SmallInputIsASingleLeaf) {
  const PartitionTree t = build_tree(cube(5, 2, 1), 8, 1);
  EXPECT_EQ(t.node_count(), 1);
  EXPECT_EQ(t.depth(), 0);
  EXPECT_TRUE(t.node(0).is_leaf());
  std::vector<std::size_t> p = t.perm();
  std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(p[i], i);
  EXPECT_THROW(build_tree(cube(5, 2, 1), 1, 1), std::invalid_argument);
}

TEST(BuildTree, RootChildrenSeparateTwoClusters) {
  Rng rng(4);
  std::vector<double> c;
  for (int i = 0; i < 64; ++i) {
    const double off = i < 32 ? 0.0 : 5.0;
    c.push_back(off + 0.3 * rng.uniform());
    c.push_back(off + 0.3 * rng.uniform());
  }
  const PartitionTree t = build_tree(PointSet(64, 2, c), 8, 1);
  const TreeNode& l = t.node(t.node(0).left);
  std::size_t first = 0;
  for (Index i = l.begin; i < l.end; ++i) first += t.perm()[static_cast<std::size_t>(i)] < 32;
  EXPECT_TRUE(first == 0 || first == 32) << first;
}

TEST(BuildTree, LevelsAndLayout) {
  const PartitionTree t = build_tree(cube(40, 3, 2), 10, 1);
  ASSERT_EQ(t.depth(), 2);
  const auto lv = t.levels(true);
  ASSERT_EQ(lv.size(), 3u);
  EXPECT_EQ(lv[0].size(), 4u);
  EXPECT_EQ(lv[1].size(), 2u);
  EXPECT_EQ(lv[2].size(), 1u);
  EXPECT_EQ(t.levels(false).front().size(), 1u);
  EXPECT_EQ(build_tree(cube(3, 3, 2), 10, 1).levels(true).size(), 1u);
  EXPECT_EQ(t.sibling(1), 2);
  EXPECT_EQ(t.sibling(2), 1);
  EXPECT_EQ(tree_depth_for(40, 10), 2);
  EXPECT_EQ(tree_depth_for(41, 10), 3);
  EXPECT_EQ(tree_depth_for(10, 10), 0);
}

TEST(BuildTree, PhysicalPermutationAndOrderConversions) {
  const PointSet ps = cube(300, 3, 8);
  const PartitionTree t = build_tree(ps, 32, 2);
  for (std::size_t i = 0; i < 300; ++i)
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(t.points()(i, k), ps(t.perm()[i], k));
  for (std::size_t i = 0; i < 300; ++i) EXPECT_EQ(t.perm()[t.inverse()[i]], i);
  const Vector v = gaussian_vector(300, 1);
  EXPECT_EQ(t.to_input_order(t.to_tree_order(v)), v);
  const Matrix m = gaussian_matrix(300, 3, 2);
  EXPECT_EQ(t.to_input_order(t.to_tree_order(m)), m);
  EXPECT_EQ(t.to_tree_order(v)(5), v(static_cast<Index>(t.perm()[5])));
}

TEST(BuildTree, DeterministicUnderSeed) {
  const PointSet ps = generate({Shape::gaussian_mixture, 3, 5}, 777, 3);
  const PartitionTree a = build_tree(ps, 16, 9), b = build_tree(ps, 16, 9);
  EXPECT_EQ(a.perm(), b.perm());
  for (Index id = 0; id < a.node_count(); ++id) {
    EXPECT_EQ(a.node(id).split_direction, b.node(id).split_direction);
    EXPECT_EQ(a.node(id).split_value, b.node(id).split_value);
  }
}

namespace {

// Second kNN implementation: full distance row, then stable sort by
// (distance, index). Different loop order from the library's selection.
std::vector<std::vector<Index>> knn_oracle(const PointSet& ps, Index k) {
  const std::size_t n = ps.size();
  std::vector<std::vector<Index>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, Index>> row;
    for (std::size_t j = n; j-- > 0;) {
      if (j == i) continue;
      double d = 0.0;
      for (std::size_t c = 0; c < ps.dim(); ++c) d += (ps(i, c) - ps(j, c)) * (ps(i, c) - ps(j, c));
      row.emplace_back(d, static_cast<Index>(j));
    }
    std::sort(row.begin(), row.end());
    for (Index r = 0; r < k; ++r) out[i].push_back(row[static_cast<std::size_t>(r)].second);
  }
  return out;
}

}  // namespace

TEST(Knn, CollinearMiddleNeighbor) {
  const auto nn = knn_bruteforce(PointSet(3, 1, {0.0, 1.0, 2.5}), 1);
  EXPECT_EQ(nn[0][0], 1);
  EXPECT_EQ(nn[2][0], 1);
}

TEST(Knn, AllOthersIsAPermutation) {
  const auto nn = knn_bruteforce(cube(12, 2, 5), 11);
  for (std::size_t i = 0; i < 12; ++i) {
    auto row = nn[i];
    row.push_back(static_cast<Index>(i));
    std::sort(row.begin(), row.end());
    for (Index j = 0; j < 12; ++j) EXPECT_EQ(row[static_cast<std::size_t>(j)], j);
  }
}

TEST(Knn, MatchesIndependentScan) {
  const PointSet ps = cube(200, 3, 6);
  EXPECT_EQ(knn_bruteforce(ps, 7), knn_oracle(ps, 7));
  // Exact ties: a lattice has many equal distances.
  std::vector<double> grid;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) grid.insert(grid.end(), {double(i), double(j)});
  const PointSet lattice(36, 2, grid);
  EXPECT_EQ(knn_bruteforce(lattice, 6), knn_oracle(lattice, 6));
}

TEST(Knn, Guards) {
  EXPECT_THROW(knn_bruteforce(cube(5, 2, 1), 5), std::invalid_argument);
  EXPECT_THROW(knn_bruteforce(cube(5, 2, 1), -1), std::invalid_argument);
  EXPECT_TRUE(knn_bruteforce(cube(5, 2, 1), 0)[0].empty());
}
