#pragma once

#include "hikersolve/config.hpp"
#include "hikersolve/gmres.hpp"

#include <json.hpp>

#include <string>

namespace hikersolve {

inline constexpr const char* kReportVersion = "hikersolve-report-1";

/// JSON report with the fixed layout
///   {version, config_echo, timings{phase: s}, ranks{level: max},
///    errors{metric: value}, krylov{iterations, residuals[]}}
/// Sections that were never touched are left out; values are never null.
class Report {
 public:
  explicit Report(const Config& cfg);

  void set_timing(const std::string& phase, double seconds);
  void set_rank(int level, Index max_rank);
  /// Non-finite values are dropped rather than written as null.
  void set_metric(const std::string& metric, double value);
  void set_krylov(const KrylovReport& report);

  nlohmann::json to_json() const;
  std::string dump() const { return to_json().dump(2); }

 private:
  nlohmann::json config_echo_;
  nlohmann::json timings_ = nlohmann::json::object();
  nlohmann::json ranks_ = nlohmann::json::object();
  nlohmann::json errors_ = nlohmann::json::object();
  nlohmann::json krylov_;
};

nlohmann::json config_to_json(const Config& cfg);

/// Schema check; on failure returns false and describes the first problem.
bool validate_report(const nlohmann::json& report, std::string* why = nullptr);

}  // namespace hikersolve
