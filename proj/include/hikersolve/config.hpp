#pragma once

#include "hikersolve/gmres.hpp"
#include "hikersolve/kernels.hpp"
#include "hikersolve/skeleton.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace hikersolve {

enum class SolveMethod { direct, hybrid };

SolveMethod parse_solve_method(const std::string& name);
std::string to_string(SolveMethod method);

/// Every tunable of the pipeline. Precedence when assembled by the CLI:
/// command-line flags > config file > these defaults.
struct Config {
  Index leaf_size = 256;
  SkeletonConfig skeleton{1e-5, 64, 256, SampleMode::uniform, 0, 8};
  KernelSpec kernel{KernelFamily::gaussian, 0.5, 2, 1.0, 1e-3};
  GmresOptions gmres{1e-8, 500, 50};
  SolveMethod method = SolveMethod::direct;
  OperatorMode operator_mode = OperatorMode::compressed;
  std::uint64_t seed = 0;
  /// 0 = hardware concurrency.
  std::size_t threads = 0;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses `key = value` lines; '#' starts a comment. Errors carry line numbers.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Sets one key (file spelling: leaf, tau, max_rank, samples, sample_mode,
/// knn_k, kernel, h, degree, shift, lambda, tol, maxiter, restart, method,
/// operator, seed, threads). Hyphens and underscores are interchangeable.
void apply_config_value(Config& cfg, const std::string& key, const std::string& value);
void apply_config(Config& cfg, const std::map<std::string, std::string>& values);

/// Serializes every key; numbers use the shortest round-trip form, so
/// parse(format(cfg)) reproduces cfg bit for bit.
std::string format_config(const Config& cfg);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& what);

}  // namespace hikersolve
