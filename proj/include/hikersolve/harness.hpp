#pragma once

// Accuracy and scaling measurements that compare the hierarchical paths
// against the dense references.

#include "hikersolve/direct_solver.hpp"
#include "hikersolve/kernels.hpp"
#include "hikersolve/skeleton.hpp"
#include "hikersolve/treecode.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hikersolve {

/// Explicit telescoped basis Ph (r x |node|) of one non-root node.
Matrix assemble_basis(const HierarchicalOperator& op, Index node);

struct ErrorMetrics {
  double matvec_relerr = 0.0;
  /// Against a dense solve with the materialized K~ + lambda I (n <= 4096).
  double solve_relerr_vs_ktilde = 0.0;
  /// Against a dense solve with the true K + lambda I.
  double solve_relerr_vs_k = 0.0;
  /// Worst sibling-block relative error per child level.
  std::map<int, double> offdiag_block_relerr;
};

/// Medians over `trials` random unit vectors.
ErrorMetrics error_report(const HierarchicalOperator& op, const Factorization& f, int trials,
                          std::uint64_t seed);

struct BenchConfig {
  Index leaf_size = 256;
  SkeletonConfig skeleton{1e-5, 64, 256, SampleMode::uniform, 0, 8};
  KernelSpec kernel{};
  std::size_t dim = 3;
  int repetitions = 5;
  /// Sizes for the dense-oracle contrast; empty skips it.
  std::vector<Index> dense_sizes;
};

struct PhaseTiming {
  std::vector<double> seconds;  // median per size
  double exponent = 0.0;
};

struct BenchResult {
  std::vector<Index> sizes;
  std::map<std::string, PhaseTiming> phases;
  std::vector<Index> dense_sizes;
  PhaseTiming dense;
  std::vector<Index> max_ranks;
};

/// Least-squares slope of log(t) against log(n).
double fit_exponent(const std::vector<Index>& sizes, const std::vector<double>& seconds);

BenchResult scaling_benchmark(const std::vector<Index>& sizes, const BenchConfig& config,
                              std::uint64_t seed);

}  // namespace hikersolve
