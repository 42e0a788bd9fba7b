#include "hikersolve/harness.hpp"

#include "hikersolve/oracle.hpp"
#include "hikersolve/points.hpp"
#include "hikersolve/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace hikersolve {

Matrix assemble_basis(const HierarchicalOperator& op, Index node) {
  if (node == op.tree().root()) throw std::invalid_argument("assemble_basis: root has no basis");
  const TreeNode& nd = op.tree().node(node);
  const Matrix& p = op.skeletons().at(node).interp;
  if (nd.is_leaf()) return p;
  return p * block_diagonal(assemble_basis(op, nd.left), assemble_basis(op, nd.right));
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

Vector random_unit(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v / v.norm();
}

}  // namespace

ErrorMetrics error_report(const HierarchicalOperator& op, const Factorization& f, int trials,
                          std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("error_report: trials must be >= 1");
  const auto& tree = op.tree();
  const double lambda = f.lambda();
  const Index n = op.size();

  const Matrix k = dense_kernel_matrix(op.kernel(), tree.points(), lambda);
  const DenseFactor k_lu = factor_dense(k);
  const bool have_ktilde = n <= kMaterializeMaxPoints;
  DenseFactor kt_lu;
  if (have_ktilde) kt_lu = factor_dense(op.materialize(lambda));

  std::vector<double> mv, sk, skt;
  for (int t = 0; t < trials; ++t) {
    const Vector w = random_unit(n, derive_seed(seed, 2 * static_cast<std::uint64_t>(t)));
    const Vector exact = k * w;
    mv.push_back((op.hmatvec(w, lambda) - exact).norm() / exact.norm());

    const Vector b = random_unit(n, derive_seed(seed, 2 * static_cast<std::uint64_t>(t) + 1));
    const Vector x = f.solve(b);
    const Vector xk = k_lu.solve(b);
    sk.push_back((x - xk).norm() / xk.norm());
    if (have_ktilde) {
      const Vector xkt = kt_lu.solve(b);
      skt.push_back((x - xkt).norm() / xkt.norm());
    }
  }

  ErrorMetrics out;
  out.matvec_relerr = median(mv);
  out.solve_relerr_vs_k = median(sk);
  out.solve_relerr_vs_ktilde = have_ktilde ? median(skt) : std::nan("");

  for (Index id = 0; id < tree.node_count(); ++id) {
    const TreeNode& nd = tree.node(id);
    if (nd.is_leaf()) continue;
    const TreeNode& l = tree.node(nd.left);
    const TreeNode& r = tree.node(nd.right);
    const Matrix exact = eval_block(op.kernel(), tree.points(), l.begin, l.end, r.begin, r.end);
    const Matrix approx = assemble_basis(op, nd.left).transpose() * op.coupling(id) * assemble_basis(op, nd.right);
    double& slot = out.offdiag_block_relerr[nd.level + 1];
    slot = std::max(slot, relative_frobenius_error(approx, exact));
  }
  return out;
}

double fit_exponent(const std::vector<Index>& sizes, const std::vector<double>& seconds) {
  if (sizes.size() != seconds.size() || sizes.size() < 2)
    throw std::invalid_argument("fit_exponent: need at least two (size, time) pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double x = std::log(static_cast<double>(sizes[i]));
    const double y = std::log(std::max(seconds[i], 1e-12));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace {

using clock = std::chrono::steady_clock;

double seconds_since(clock::time_point t0) {
  return std::chrono::duration<double>(clock::now() - t0).count();
}

// Runs `body` repeatedly until at least `min_seconds` elapse; returns the
// mean time per call.
double time_per_call(const std::function<void()>& body, double min_seconds) {
  const auto t0 = clock::now();
  int calls = 0;
  do {
    body();
    ++calls;
  } while (seconds_since(t0) < min_seconds);
  return seconds_since(t0) / calls;
}

constexpr double kMinSolveWindow = 0.05;

}  // namespace

BenchResult scaling_benchmark(const std::vector<Index>& sizes, const BenchConfig& config,
                              std::uint64_t seed) {
  if (config.repetitions < 1) throw std::invalid_argument("scaling_benchmark: repetitions must be >= 1");
  BenchResult out;
  out.sizes = sizes;
  const char* names[] = {"tree", "skeletonize", "factorize", "solve"};
  std::map<std::string, std::vector<double>> medians;

  for (Index n : sizes) {
    const PointSet ps = generate({Shape::uniform_cube, config.dim, 4}, static_cast<std::size_t>(n), seed);
    std::map<std::string, std::vector<double>> samples;
    Index max_rank = 0;
    for (int rep = 0; rep < config.repetitions; ++rep) {
      auto t0 = clock::now();
      PartitionTree tree = build_tree(ps, config.leaf_size, seed);
      samples["tree"].push_back(seconds_since(t0));

      t0 = clock::now();
      SkeletonSet skel = build_skeletons(tree, config.kernel, config.skeleton);
      samples["skeletonize"].push_back(seconds_since(t0));

      const HierarchicalOperator op(std::move(tree), std::move(skel), config.kernel);
      t0 = clock::now();
      const Factorization f(op, config.kernel.lambda);
      samples["factorize"].push_back(seconds_since(t0));
      max_rank = f.stats().max_rank;

      const Vector b = random_unit(n, derive_seed(seed, static_cast<std::uint64_t>(rep)));
      Vector x;
      samples["solve"].push_back(time_per_call([&] { x = f.solve(b); }, kMinSolveWindow));
    }
    for (const char* name : names) medians[name].push_back(median(samples[name]));
    out.max_ranks.push_back(max_rank);
  }

  for (const char* name : names) {
    PhaseTiming& p = out.phases[name];
    p.seconds = medians[name];
    p.exponent = sizes.size() >= 2 ? fit_exponent(sizes, p.seconds) : 0.0;
  }

  out.dense_sizes = config.dense_sizes;
  for (Index n : config.dense_sizes) {
    const PointSet ps = generate({Shape::uniform_cube, config.dim, 4}, static_cast<std::size_t>(n), seed);
    std::vector<double> reps;
    for (int rep = 0; rep < config.repetitions; ++rep) {
      const Vector b = random_unit(n, derive_seed(seed, static_cast<std::uint64_t>(rep)));
      const auto t0 = clock::now();
      const Vector x = dense_solve(dense_kernel_matrix(config.kernel, ps, config.kernel.lambda), b);
      reps.push_back(seconds_since(t0));
    }
    out.dense.seconds.push_back(median(reps));
  }
  if (out.dense_sizes.size() >= 2) out.dense.exponent = fit_exponent(out.dense_sizes, out.dense.seconds);
  return out;
}

}  // namespace hikersolve
