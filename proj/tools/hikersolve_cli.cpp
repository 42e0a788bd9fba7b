// hikersolve: command-line driver for the hierarchical kernel solver.
//
// Every subcommand resolves its settings as flags > --config file > defaults
// and writes a JSON report (stdout unless --report/--out-stats is given).
// Failures print a single "ERROR: ..." line to stderr and exit nonzero.

#include "hikersolve/config.hpp"
#include "hikersolve/direct_solver.hpp"
#include "hikersolve/gmres.hpp"
#include "hikersolve/harness.hpp"
#include "hikersolve/oracle.hpp"
#include "hikersolve/parallel.hpp"
#include "hikersolve/points.hpp"
#include "hikersolve/random.hpp"
#include "hikersolve/report.hpp"
#include "hikersolve/treecode.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

using namespace hikersolve;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Flag values are kept as text and applied through the same code path as
// config-file values, so both spellings validate identically.
struct Overrides {
  std::map<std::string, std::string> values;
  std::string config_path;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }

  Config resolve() const {
    Config cfg;
    if (!config_path.empty()) apply_config(cfg, read_config_file(config_path));
    apply_config(cfg, values);
    return cfg;
  }
};

void add_kernel_flags(CLI::App* app, Overrides& o) {
  o.add(app, "--kernel", "kernel", "gaussian | laplace3d | polynomial");
  o.add(app, "--bandwidth", "h", "gaussian bandwidth h");
  o.add(app, "--degree", "degree", "polynomial degree");
  o.add(app, "--shift", "shift", "polynomial shift c");
  o.add(app, "--lambda", "lambda", "diagonal regularization");
}

void add_tree_flags(CLI::App* app, Overrides& o) {
  o.add(app, "--leaf", "leaf", "leaf size m");
  o.add(app, "--tau", "tau", "skeleton tolerance");
  o.add(app, "--max-rank", "max_rank", "skeleton rank cap s_max");
  o.add(app, "--samples", "samples", "sampled rows per node");
  o.add(app, "--sample-mode", "sample_mode", "uniform | knn_augmented | exact");
  o.add(app, "--knn-k", "knn_k", "neighbors per point for knn_augmented");
  o.add(app, "--seed", "seed", "seed for tree, sampling and generators");
}

void add_krylov_flags(CLI::App* app, Overrides& o) {
  o.add(app, "--method", "method", "direct | hybrid");
  o.add(app, "--tol", "tol", "GMRES relative residual target");
  o.add(app, "--maxiter", "maxiter", "GMRES iteration cap");
  o.add(app, "--restart", "restart", "GMRES restart length");
  o.add(app, "--operator", "operator", "compressed | dense (hybrid only)");
}

PointSet read_points(const std::string& path, bool normalize) {
  PointSet ps = load_points(path, format_for_path(path));
  ps.validate();
  return normalize ? normalize_unit_box(ps) : ps;
}

// Vector files are point files; each "point" is one row, d columns = d vectors.
Matrix read_vectors(const std::string& path, std::size_t n) {
  const PointSet ps = load_points(path, format_for_path(path));
  if (ps.size() != n)
    throw std::runtime_error(path + ": expected " + std::to_string(n) + " rows, found " +
                             std::to_string(ps.size()));
  Matrix out(static_cast<Index>(ps.size()), static_cast<Index>(ps.dim()));
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t k = 0; k < ps.dim(); ++k) out(static_cast<Index>(i), static_cast<Index>(k)) = ps(i, k);
  return out;
}

void write_vectors(const std::string& path, const Matrix& m) {
  PointSet ps(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index k = 0; k < m.cols(); ++k) ps(static_cast<std::size_t>(i), static_cast<std::size_t>(k)) = m(i, k);
  save_points(ps, path, format_for_path(path));
}

void emit(const Report& report, const std::string& path) {
  if (path.empty()) {
    std::cout << report.dump() << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report '" + path + "'");
  out << report.dump() << '\n';
  if (!out) throw std::runtime_error("failed writing report '" + path + "'");
}

struct Pipeline {
  std::optional<HierarchicalOperator> op;
  double tree_seconds = 0.0;
  double skeleton_seconds = 0.0;
};

Pipeline build_operator(const PointSet& ps, const Config& cfg) {
  cfg.kernel.validate(ps.dim());
  Pipeline p;
  auto t0 = Clock::now();
  PartitionTree tree = build_tree(ps, cfg.leaf_size, cfg.seed);
  p.tree_seconds = since(t0);
  SkeletonConfig sc = cfg.skeleton;
  sc.seed = derive_seed(cfg.seed, 1);
  t0 = Clock::now();
  SkeletonSet skel = build_skeletons(tree, cfg.kernel, sc);
  p.skeleton_seconds = since(t0);
  p.op.emplace(std::move(tree), std::move(skel), cfg.kernel);
  return p;
}

void record_build(Report& r, const Pipeline& p) {
  r.set_timing("tree", p.tree_seconds);
  r.set_timing("skeletonize", p.skeleton_seconds);
  const auto& tree = p.op->tree();
  for (int l = 1; l <= tree.depth(); ++l) r.set_rank(l, p.op->skeletons().max_rank_on_level(tree, l));
}

void record_factor(Report& r, const Factorization& f) {
  r.set_timing("factorize", f.stats().total_seconds);
  r.set_metric("z_pivot_ratio_max", f.stats().max_z_pivot_ratio);
}

Matrix solve_system(const HierarchicalOperator& op, const Factorization& f, const Config& cfg,
                    const Matrix& rhs, Report& report) {
  if (cfg.method == SolveMethod::direct) return f.solve_multi(rhs, false);
  if (rhs.cols() != 1) throw std::runtime_error("--method hybrid takes a single right-hand side (d = 1)");
  const auto& tree = op.tree();
  const Vector b = tree.to_tree_order(Vector(rhs.col(0)));
  KrylovResult kr = hybrid_solve(op, f, b, cfg.gmres, cfg.operator_mode);
  report.set_krylov(kr.report);
  Matrix x(rhs.rows(), 1);
  x.col(0) = tree.to_input_order(kr.x);
  return x;
}

double rmse(const Vector& a, const Vector& b) {
  return a.size() == 0 ? 0.0 : std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

std::vector<Index> parse_sizes(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const double v = parse_double(item, "size");
    if (v < 1 || v != std::floor(v)) throw std::runtime_error("bad size '" + item + "'");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical kernel matrix solver"};
  app.require_subcommand(1);
  Overrides o;
  std::string report_path;
  bool normalize_flag = false;
  std::string normalize;
  app.add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
  o.add(&app, "--threads", "threads", "worker thread cap (0 = all cores)");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
    o.add(sub, "--threads", "threads", "worker thread cap (0 = all cores)");
    sub->add_option("--report,--out-stats", report_path, "JSON report path (default stdout)");
  };
  auto with_normalize = [&](CLI::App* sub) {
    sub->add_option("--normalize", normalize, "unit-box: rescale coordinates onto [0,1]^d")
        ->check(CLI::IsMember({"unit-box", "none"}));
  };

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic point set");
  std::string shape = "cube", gen_out;
  std::size_t gen_n = 0, gen_d = 3, clusters = 4;
  std::uint64_t gen_seed = 0;
  gen->add_option("--shape", shape, "cube | sphere | mixture");
  gen->add_option("--n", gen_n, "number of points")->required();
  gen->add_option("--d", gen_d, "dimension");
  gen->add_option("--clusters", clusters, "mixture components");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output file (.pts binary, .csv text)")->required();
  std::string gen_labels;
  gen->add_option("--labels-out", gen_labels, "mixture only: write component labels as a vector file");

  // build / matvec / factor / solve share the points + operator flags.
  std::string points_path, weights_path, rhs_path, out_path;
  bool verify_flag = false;
  auto* build = app.add_subcommand("build", "partition tree and skeletons");
  auto* matvec = app.add_subcommand("matvec", "compressed kernel summation");
  auto* factor = app.add_subcommand("factor", "hierarchical factorization");
  auto* solve = app.add_subcommand("solve", "solve (K~ + lambda I) x = b");
  for (auto* sub : {build, matvec, factor, solve}) {
    common(sub);
    with_normalize(sub);
    sub->add_option("--points", points_path, "point file")->required();
    add_tree_flags(sub, o);
    add_kernel_flags(sub, o);
  }
  matvec->add_option("--weights", weights_path, "weight vector file")->required();
  matvec->add_option("--out", out_path, "output vector file");
  matvec->add_flag("--verify", verify_flag, "compare with the dense kernel matrix (n <= 4096)");
  solve->add_option("--rhs", rhs_path, "right-hand side vector file")->required();
  solve->add_option("--out", out_path, "solution vector file");
  add_krylov_flags(solve, o);

  // krr
  auto* krr = app.add_subcommand("krr", "kernel ridge regression");
  common(krr);
  with_normalize(krr);
  std::string train_path, labels_path, test_path, test_labels_path;
  krr->add_option("--train", train_path, "training points")->required();
  krr->add_option("--labels", labels_path, "training labels (vector file)")->required();
  krr->add_option("--test", test_path, "test points");
  krr->add_option("--test-labels", test_labels_path, "test labels (vector file)");
  krr->add_option("--out", out_path, "test predictions vector file");
  add_tree_flags(krr, o);
  add_kernel_flags(krr, o);
  add_krylov_flags(krr, o);

  // bench
  auto* bench = app.add_subcommand("bench", "scaling benchmark");
  common(bench);
  std::string sizes_text = "4096,8192,16384,32768,65536", dense_text;
  int repetitions = 5;
  std::size_t bench_d = 3;
  bench->add_option("--sizes", sizes_text, "comma-separated problem sizes");
  bench->add_option("--dense-sizes", dense_text, "sizes for the dense contrast (empty = skip)");
  bench->add_option("--repetitions", repetitions, "median over this many runs")->check(CLI::PositiveNumber);
  bench->add_option("--d", bench_d, "dimension of the uniform cube");
  add_tree_flags(bench, o);
  add_kernel_flags(bench, o);

  // verify
  auto* verify = app.add_subcommand("verify", "accuracy against the dense oracle");
  common(verify);
  std::size_t verify_n = 1024, verify_d = 3;
  int trials = 3;
  verify->add_option("--n", verify_n, "problem size")->check(CLI::PositiveNumber);
  verify->add_option("--d", verify_d, "dimension of the uniform cube");
  verify->add_option("--trials", trials, "random vectors per metric")->check(CLI::PositiveNumber);
  add_tree_flags(verify, o);
  add_kernel_flags(verify, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "ERROR: " << msg << '\n';
    return 2;
  }

  try {
    const Config cfg = o.resolve();
    set_max_threads(cfg.threads);
    normalize_flag = normalize == "unit-box";
    Report report(cfg);

    if (gen->parsed()) {
      if (gen_n == 0) throw std::runtime_error("--n must be positive");
      const Shape s = parse_shape(shape);
      if (s == Shape::gaussian_mixture) {
        MixtureSample m = generate_mixture(gen_d, clusters, gen_n, gen_seed);
        save_points(m.points, gen_out, format_for_path(gen_out));
        if (!gen_labels.empty()) {
          Matrix lab(static_cast<Index>(gen_n), 1);
          for (std::size_t i = 0; i < gen_n; ++i) lab(static_cast<Index>(i), 0) = static_cast<double>(m.labels[i]);
          write_vectors(gen_labels, lab);
        }
      } else {
        if (!gen_labels.empty()) throw std::runtime_error("--labels-out needs --shape mixture");
        save_points(generate({s, gen_d, clusters}, gen_n, gen_seed), gen_out, format_for_path(gen_out));
      }
      return 0;
    }

    if (build->parsed() || matvec->parsed() || factor->parsed() || solve->parsed()) {
      const PointSet ps = read_points(points_path, normalize_flag);
      // Read inputs before the expensive phases so malformed files fail fast.
      Matrix vectors;
      if (matvec->parsed()) vectors = read_vectors(weights_path, ps.size());
      if (solve->parsed()) vectors = read_vectors(rhs_path, ps.size());
      Pipeline p = build_operator(ps, cfg);
      const HierarchicalOperator& op = *p.op;
      record_build(report, p);
      const double lambda = cfg.kernel.lambda;

      if (matvec->parsed()) {
        if (verify_flag && op.size() > kMaterializeMaxPoints)
          throw std::runtime_error("--verify is limited to n <= " + std::to_string(kMaterializeMaxPoints));
        auto t0 = Clock::now();
        Matrix u(vectors.rows(), vectors.cols());
        for (Index j = 0; j < vectors.cols(); ++j) u.col(j) = op.apply(Vector(vectors.col(j)), lambda, false);
        report.set_timing("matvec", since(t0));
        if (verify_flag) {
          const Matrix dense = dense_kernel_matrix(cfg.kernel, ps, lambda);
          const Matrix exact = dense * vectors;
          report.set_metric("matvec_relerr", (u - exact).norm() / exact.norm());
        }
        if (!out_path.empty()) write_vectors(out_path, u);
      } else if (factor->parsed() || solve->parsed()) {
        const Factorization f(op, lambda);
        record_factor(report, f);
        if (solve->parsed()) {
          auto t0 = Clock::now();
          const Matrix x = solve_system(op, f, cfg, vectors, report);
          report.set_timing("solve", since(t0));
          double res = 0.0;
          for (Index j = 0; j < x.cols(); ++j) {
            const Vector r = op.apply(Vector(x.col(j)), lambda, false) - vectors.col(j);
            const double bn = vectors.col(j).norm();
            res = std::max(res, bn > 0.0 ? r.norm() / bn : r.norm());
          }
          report.set_metric("residual_ktilde", res);
          if (!out_path.empty()) write_vectors(out_path, x);
        }
      }
      emit(report, report_path);
      return 0;
    }

    if (krr->parsed()) {
      const PointSet train = read_points(train_path, normalize_flag);
      const Matrix y = read_vectors(labels_path, train.size());
      if (y.cols() != 1) throw std::runtime_error(labels_path + ": labels must have d = 1");
      std::optional<PointSet> test;
      Matrix ytest;
      if (!test_path.empty()) {
        test = read_points(test_path, normalize_flag);
        if (test->dim() != train.dim()) throw std::runtime_error("test and training dimensions differ");
        if (!test_labels_path.empty()) ytest = read_vectors(test_labels_path, test->size());
      } else if (!test_labels_path.empty()) {
        throw std::runtime_error("--test-labels needs --test");
      }
      Pipeline p = build_operator(train, cfg);
      const HierarchicalOperator& op = *p.op;
      record_build(report, p);
      const Factorization f(op, cfg.kernel.lambda);
      record_factor(report, f);
      auto t0 = Clock::now();
      const Vector w = solve_system(op, f, cfg, y, report).col(0);
      report.set_timing("solve", since(t0));
      // Fitted values K~ w (no shift).
      report.set_metric("train_rmse", rmse(op.apply(w, 0.0, false), y.col(0)));
      if (test) {
        t0 = Clock::now();
        Vector pred = Vector::Zero(static_cast<Index>(test->size()));
        const std::size_t chunk = 512;
        const Index nt = static_cast<Index>(test->size());
        std::vector<Index> src(train.size());
        for (std::size_t i = 0; i < src.size(); ++i) src[i] = static_cast<Index>(i);
        const std::size_t blocks = (test->size() + chunk - 1) / chunk;
        parallel_for(blocks, [&](std::size_t b) {
          const Index lo = static_cast<Index>(b * chunk);
          const Index hi = std::min<Index>(nt, lo + static_cast<Index>(chunk));
          std::vector<Index> rows(static_cast<std::size_t>(hi - lo));
          for (Index i = lo; i < hi; ++i) rows[static_cast<std::size_t>(i - lo)] = i;
          pred.segment(lo, hi - lo) = eval_block(cfg.kernel, *test, rows, train, src) * w;
        });
        report.set_timing("predict", since(t0));
        if (ytest.size() > 0) report.set_metric("test_rmse", rmse(pred, ytest.col(0)));
        if (!out_path.empty()) write_vectors(out_path, Matrix(pred));
      }
      emit(report, report_path);
      return 0;
    }

    if (bench->parsed()) {
      BenchConfig bc;
      bc.leaf_size = cfg.leaf_size;
      bc.skeleton = cfg.skeleton;
      bc.kernel = cfg.kernel;
      bc.dim = bench_d;
      bc.repetitions = repetitions;
      bc.dense_sizes = parse_sizes(dense_text);
      const auto sizes = parse_sizes(sizes_text);
      if (sizes.empty()) throw std::runtime_error("--sizes is empty");
      const BenchResult br = scaling_benchmark(sizes, bc, cfg.seed);
      for (const auto& [phase, t] : br.phases) {
        for (std::size_t i = 0; i < br.sizes.size(); ++i)
          report.set_timing(phase + "@" + std::to_string(br.sizes[i]), t.seconds[i]);
        if (br.sizes.size() > 1) report.set_metric("exponent_" + phase, t.exponent);
      }
      for (std::size_t i = 0; i < br.dense_sizes.size(); ++i)
        report.set_timing("dense@" + std::to_string(br.dense_sizes[i]), br.dense.seconds[i]);
      if (br.dense_sizes.size() > 1) report.set_metric("exponent_dense", br.dense.exponent);
      emit(report, report_path);
      return 0;
    }

    if (verify->parsed()) {
      if (verify_n > kDenseOracleMaxPoints)
        throw std::runtime_error("verify is limited to n <= " + std::to_string(kDenseOracleMaxPoints));
      const PointSet ps = generate({Shape::uniform_cube, verify_d, 4}, verify_n, cfg.seed);
      Pipeline p = build_operator(ps, cfg);
      const HierarchicalOperator& op = *p.op;
      record_build(report, p);
      const Factorization f(op, cfg.kernel.lambda);
      record_factor(report, f);
      auto t0 = Clock::now();
      const ErrorMetrics m = error_report(op, f, trials, derive_seed(cfg.seed, 2));
      report.set_timing("verify", since(t0));
      report.set_metric("matvec_relerr", m.matvec_relerr);
      report.set_metric("solve_relerr_vs_Ktilde", m.solve_relerr_vs_ktilde);
      report.set_metric("solve_relerr_vs_K", m.solve_relerr_vs_k);
      for (const auto& [level, e] : m.offdiag_block_relerr)
        report.set_metric("offdiag_block_relerr_level_" + std::to_string(level), e);
      emit(report, report_path);
      return 0;
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "ERROR: " << msg << '\n';
    return 1;
  }
  return 0;
}
