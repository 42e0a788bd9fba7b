#include "hikersolve/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace hikersolve {

SolveMethod parse_solve_method(const std::string& name) {
  if (name == "direct") return SolveMethod::direct;
  if (name == "hybrid") return SolveMethod::hybrid;
  throw ConfigError("unknown solve method '" + name + "'");
}

std::string to_string(SolveMethod method) {
  return method == SolveMethod::direct ? "direct" : "hybrid";
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = text.data() + text.size();
  if (b != e && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (b == e || res.ec != std::errc{} || res.ptr != e)
    throw ConfigError("invalid number for " + what + ": '" + text + "'");
  return v;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string canonical_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

long long parse_integer(const std::string& text, const std::string& what) {
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ConfigError("invalid integer for " + what + ": '" + text + "'");
  return v;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = canonical_key(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_config_value(Config& cfg, const std::string& raw_key, const std::string& value) {
  const std::string key = canonical_key(raw_key);
  auto positive_int = [&](const char* what) {
    const long long v = parse_integer(value, what);
    if (v < 1) throw ConfigError(std::string(what) + " must be >= 1");
    return static_cast<Index>(v);
  };
  try {
    if (key == "leaf" || key == "leaf_size") {
      cfg.leaf_size = positive_int("leaf");
    } else if (key == "tau") {
      cfg.skeleton.tau = parse_double(value, key);
    } else if (key == "max_rank") {
      cfg.skeleton.max_rank = positive_int("max_rank");
    } else if (key == "samples") {
      cfg.skeleton.samples = positive_int("samples");
    } else if (key == "sample_mode") {
      cfg.skeleton.mode = parse_sample_mode(value);
    } else if (key == "knn_k") {
      cfg.skeleton.knn_k = positive_int("knn_k");
    } else if (key == "kernel") {
      cfg.kernel.family = parse_kernel_family(value);
    } else if (key == "h" || key == "bandwidth") {
      cfg.kernel.bandwidth = parse_double(value, key);
    } else if (key == "degree") {
      cfg.kernel.degree = static_cast<int>(positive_int("degree"));
    } else if (key == "shift") {
      cfg.kernel.shift = parse_double(value, key);
    } else if (key == "lambda") {
      cfg.kernel.lambda = parse_double(value, key);
    } else if (key == "tol") {
      cfg.gmres.tol = parse_double(value, key);
    } else if (key == "maxiter" || key == "max_iter") {
      cfg.gmres.max_iter = positive_int("maxiter");
    } else if (key == "restart") {
      cfg.gmres.restart = positive_int("restart");
    } else if (key == "method") {
      cfg.method = parse_solve_method(value);
    } else if (key == "operator") {
      cfg.operator_mode = parse_operator_mode(value);
    } else if (key == "seed") {
      const long long v = parse_integer(value, key);
      if (v < 0) throw ConfigError("seed must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(v);
    } else if (key == "threads") {
      const long long v = parse_integer(value, key);
      if (v < 0) throw ConfigError("threads must be >= 0");
      cfg.threads = static_cast<std::size_t>(v);
    } else {
      throw ConfigError("unknown config key '" + raw_key + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config key '") + raw_key + "': " + e.what());
  }
}

void apply_config(Config& cfg, const std::map<std::string, std::string>& values) {
  for (const auto& [k, v] : values) apply_config_value(cfg, k, v);
}

std::string format_config(const Config& cfg) {
  std::ostringstream os;
  os << "leaf = " << cfg.leaf_size << '\n'
     << "tau = " << format_double(cfg.skeleton.tau) << '\n'
     << "max_rank = " << cfg.skeleton.max_rank << '\n'
     << "samples = " << cfg.skeleton.effective_samples() << '\n'
     << "sample_mode = " << to_string(cfg.skeleton.mode) << '\n'
     << "knn_k = " << cfg.skeleton.knn_k << '\n'
     << "kernel = " << to_string(cfg.kernel.family) << '\n'
     << "h = " << format_double(cfg.kernel.bandwidth) << '\n'
     << "degree = " << cfg.kernel.degree << '\n'
     << "shift = " << format_double(cfg.kernel.shift) << '\n'
     << "lambda = " << format_double(cfg.kernel.lambda) << '\n'
     << "tol = " << format_double(cfg.gmres.tol) << '\n'
     << "maxiter = " << cfg.gmres.max_iter << '\n'
     << "restart = " << cfg.gmres.restart << '\n'
     << "method = " << to_string(cfg.method) << '\n'
     << "operator = " << (cfg.operator_mode == OperatorMode::compressed ? "compressed" : "dense") << '\n'
     << "seed = " << cfg.seed << '\n'
     << "threads = " << cfg.threads << '\n';
  return os.str();
}

}  // namespace hikersolve
