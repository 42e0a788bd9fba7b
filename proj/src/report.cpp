#include "hikersolve/report.hpp"

#include <charconv>
#include <cmath>
#include <set>

namespace hikersolve {

using nlohmann::json;

json config_to_json(const Config& cfg) {
  json out = json::object();
  for (const auto& [key, value] : parse_config_text(format_config(cfg))) {
    long long iv = 0;
    const auto ires = std::from_chars(value.data(), value.data() + value.size(), iv);
    if (ires.ec == std::errc{} && ires.ptr == value.data() + value.size()) {
      out[key] = iv;
      continue;
    }
    double dv = 0.0;
    const auto dres = std::from_chars(value.data(), value.data() + value.size(), dv);
    if (dres.ec == std::errc{} && dres.ptr == value.data() + value.size()) {
      out[key] = dv;
      continue;
    }
    out[key] = value;
  }
  return out;
}

Report::Report(const Config& cfg) : config_echo_(config_to_json(cfg)) {}

void Report::set_timing(const std::string& phase, double seconds) {
  if (std::isfinite(seconds)) timings_[phase] = seconds;
}

void Report::set_rank(int level, Index max_rank) { ranks_[std::to_string(level)] = max_rank; }

void Report::set_metric(const std::string& metric, double value) {
  if (std::isfinite(value)) errors_[metric] = value;
}

void Report::set_krylov(const KrylovReport& report) {
  json residuals = json::array();
  for (double r : report.residuals)
    if (std::isfinite(r)) residuals.push_back(r);
  krylov_ = json{{"iterations", report.iterations},
                 {"restarts", report.restarts},
                 {"converged", report.converged},
                 {"residuals", residuals}};
  if (std::isfinite(report.final_residual)) krylov_["final_residual"] = report.final_residual;
}

json Report::to_json() const {
  json out{{"version", kReportVersion}, {"config_echo", config_echo_}};
  if (!timings_.empty()) out["timings"] = timings_;
  if (!ranks_.empty()) out["ranks"] = ranks_;
  if (!errors_.empty()) out["errors"] = errors_;
  if (!krylov_.is_null()) out["krylov"] = krylov_;
  return out;
}

namespace {

bool fail(std::string* why, const std::string& msg) {
  if (why) *why = msg;
  return false;
}

// Non-finite numbers serialize as null, so they count as null here.
bool contains_null(const json& j) {
  if (j.is_null()) return true;
  if (j.is_number_float() && !std::isfinite(j.get<double>())) return true;
  if (j.is_object() || j.is_array())
    for (const auto& v : j)
      if (contains_null(v)) return true;
  return false;
}

bool numeric_map(const json& section, const std::string& name, std::string* why) {
  if (!section.is_object()) return fail(why, name + " must be an object");
  for (const auto& [k, v] : section.items()) {
    if (!v.is_number()) return fail(why, name + "." + k + " must be a number");
    if (!std::isfinite(v.get<double>())) return fail(why, name + "." + k + " must be finite");
  }
  return true;
}

}  // namespace

bool validate_report(const json& report, std::string* why) {
  if (!report.is_object()) return fail(why, "report must be a JSON object");
  if (contains_null(report)) return fail(why, "report contains null");
  static const std::set<std::string> allowed{"version", "config_echo", "timings", "ranks", "errors", "krylov"};
  for (const auto& [k, v] : report.items())
    if (!allowed.count(k)) return fail(why, "unexpected top-level key '" + k + "'");
  if (!report.contains("version") || report["version"] != kReportVersion)
    return fail(why, std::string("version must be \"") + kReportVersion + "\"");
  if (!report.contains("config_echo") || !report["config_echo"].is_object())
    return fail(why, "config_echo must be an object");

  if (report.contains("timings")) {
    if (!numeric_map(report["timings"], "timings", why)) return false;
    for (const auto& [k, v] : report["timings"].items())
      if (v.get<double>() < 0.0) return fail(why, "timings." + k + " must be >= 0");
  }
  if (report.contains("ranks")) {
    const json& ranks = report["ranks"];
    if (!ranks.is_object()) return fail(why, "ranks must be an object");
    for (const auto& [k, v] : ranks.items()) {
      int level = 0;
      const auto res = std::from_chars(k.data(), k.data() + k.size(), level);
      if (k.empty() || res.ec != std::errc{} || res.ptr != k.data() + k.size() || level < 0)
        return fail(why, "ranks key '" + k + "' is not a level number");
      if (!v.is_number_integer() || v.get<long long>() < 0)
        return fail(why, "ranks." + k + " must be a non-negative integer");
    }
  }
  if (report.contains("errors") && !numeric_map(report["errors"], "errors", why)) return false;
  if (report.contains("krylov")) {
    const json& k = report["krylov"];
    if (!k.is_object()) return fail(why, "krylov must be an object");
    if (!k.contains("iterations") || !k["iterations"].is_number_integer() || k["iterations"].get<long long>() < 0)
      return fail(why, "krylov.iterations must be a non-negative integer");
    if (!k.contains("residuals") || !k["residuals"].is_array())
      return fail(why, "krylov.residuals must be an array");
    for (const auto& r : k["residuals"])
      if (!r.is_number()) return fail(why, "krylov.residuals must hold numbers");
  }
  return true;
}

}  // namespace hikersolve
