#include "hikersolve/config.hpp"
#include "hikersolve/report.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <limits>

using namespace hikersolve;

namespace {

Config parse_back(const Config& cfg) {
  Config out;
  apply_config(out, parse_config_text(format_config(cfg)));
  return out;
}

}  // namespace

TEST(Config, FormatParseRoundTripIsBitExact) {
  Config cfg;
  cfg.leaf_size = 77;
  cfg.skeleton = {1.0 / 3.0, 40, 300, SampleMode::knn_augmented, 0, 5};
  cfg.kernel = {KernelFamily::polynomial, 0.1 + 0.2, 3, std::nextafter(1.0, 2.0), 1e-3 / 7.0};
  cfg.gmres = {2.5e-11, 321, 17};
  cfg.method = SolveMethod::hybrid;
  cfg.operator_mode = OperatorMode::dense_oracle;
  cfg.seed = 123456789012345ULL;
  cfg.threads = 3;

  const Config back = parse_back(cfg);
  EXPECT_EQ(std::bit_cast<std::uint64_t>(back.kernel.lambda), std::bit_cast<std::uint64_t>(cfg.kernel.lambda));
  EXPECT_EQ(std::bit_cast<std::uint64_t>(back.kernel.shift), std::bit_cast<std::uint64_t>(cfg.kernel.shift));
  EXPECT_EQ(back.kernel.bandwidth, cfg.kernel.bandwidth);
  EXPECT_EQ(back.skeleton.tau, cfg.skeleton.tau);
  EXPECT_EQ(back.gmres.tol, cfg.gmres.tol);
  EXPECT_EQ(back.leaf_size, 77);
  EXPECT_EQ(back.skeleton.samples, 300);
  EXPECT_EQ(back.skeleton.mode, SampleMode::knn_augmented);
  EXPECT_EQ(back.skeleton.knn_k, 5);
  EXPECT_EQ(back.kernel.family, KernelFamily::polynomial);
  EXPECT_EQ(back.kernel.degree, 3);
  EXPECT_EQ(back.gmres.max_iter, 321);
  EXPECT_EQ(back.gmres.restart, 17);
  EXPECT_EQ(back.method, SolveMethod::hybrid);
  EXPECT_EQ(back.operator_mode, OperatorMode::dense_oracle);
  EXPECT_EQ(back.seed, cfg.seed);
  EXPECT_EQ(back.threads, 3u);
  EXPECT_EQ(format_config(back), format_config(cfg));
}

TEST(Config, FormatDoubleIsShortestRoundTrip) {
  for (double v : {0.1, 1e-3, 1.0 / 3.0, 5e-324, 1.7976931348623157e308, -2.5, 0.0}) {
    EXPECT_EQ(parse_double(format_double(v), "v"), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e-3), "0.001");
  EXPECT_THROW(parse_double("1e-3x", "lambda"), ConfigError);
  EXPECT_THROW(parse_double("", "lambda"), ConfigError);
}

TEST(Config, CommentsWhitespaceAndHyphens) {
  const auto kv = parse_config_text("# header\n  max-rank = 12  # trailing\n\nlambda=0.5\n");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("max_rank"), "12");
  Config cfg;
  apply_config(cfg, kv);
  EXPECT_EQ(cfg.skeleton.max_rank, 12);
  EXPECT_EQ(cfg.kernel.lambda, 0.5);
}

TEST(Config, ErrorsNameTheProblem) {
  try {
    parse_config_text("tau = 1\nnonsense\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  Config cfg;
  try {
    apply_config_value(cfg, "colour", "blue");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
  EXPECT_THROW(apply_config_value(cfg, "leaf", "0"), ConfigError);
  EXPECT_THROW(apply_config_value(cfg, "leaf", "12.5"), ConfigError);
  EXPECT_THROW(apply_config_value(cfg, "kernel", "matern"), ConfigError);
  EXPECT_THROW(apply_config_value(cfg, "sample_mode", "random"), ConfigError);
  EXPECT_THROW(apply_config_value(cfg, "method", "cg"), ConfigError);
  EXPECT_THROW(apply_config_value(cfg, "seed", "-1"), ConfigError);
  EXPECT_THROW(read_config_file("/nonexistent/file.cfg"), ConfigError);
}

TEST(Config, LaterValuesOverrideEarlier) {
  // The CLI layers defaults, then the file, then flags, via repeated apply.
  Config cfg;
  apply_config(cfg, parse_config_text("tau = 1e-3\nleaf = 100\n"));
  apply_config_value(cfg, "tau", "1e-6");
  EXPECT_EQ(cfg.skeleton.tau, 1e-6);
  EXPECT_EQ(cfg.leaf_size, 100);
  EXPECT_EQ(cfg.skeleton.max_rank, Config{}.skeleton.max_rank);
}

TEST(Report, SchemaOfAFullReport) {
  Config cfg;
  Report r(cfg);
  r.set_timing("factorize", 0.25);
  r.set_timing("bogus", std::numeric_limits<double>::quiet_NaN());
  r.set_rank(1, 12);
  r.set_rank(2, 30);
  r.set_metric("matvec_relerr", 1e-6);
  r.set_metric("inf", std::numeric_limits<double>::infinity());
  KrylovReport k;
  k.iterations = 3;
  k.residuals = {0.5, 0.1, 1e-9};
  k.final_residual = 1e-9;
  k.converged = true;
  r.set_krylov(k);

  const auto j = r.to_json();
  std::string why;
  EXPECT_TRUE(validate_report(j, &why)) << why;
  EXPECT_EQ(j["version"], kReportVersion);
  EXPECT_FALSE(j["timings"].contains("bogus"));
  EXPECT_FALSE(j["errors"].contains("inf"));
  EXPECT_EQ(j["ranks"]["2"], 30);
  EXPECT_EQ(j["krylov"]["iterations"], 3);
  EXPECT_EQ(j["krylov"]["residuals"].size(), 3u);
  EXPECT_EQ(j["config_echo"]["lambda"].get<double>(), cfg.kernel.lambda);
  EXPECT_EQ(j["config_echo"]["kernel"], "gaussian");
  EXPECT_TRUE(validate_report(nlohmann::json::parse(r.dump())));
}

TEST(Report, UntouchedSectionsAreOmitted) {
  const auto j = Report(Config{}).to_json();
  EXPECT_TRUE(validate_report(j));
  EXPECT_EQ(j.size(), 2u);
}

TEST(Report, ValidatorRejects) {
  const auto good = [] {
    Report r{Config{}};
    r.set_rank(1, 4);
    r.set_timing("tree", 0.1);
    r.set_metric("x", 1.0);
    KrylovReport k;
    k.iterations = 1;
    k.residuals = {0.1};
    r.set_krylov(k);
    return r.to_json();
  }();
  ASSERT_TRUE(validate_report(good));

  auto bad = [&](auto mutate, const char* needle) {
    nlohmann::json j = good;
    mutate(j);
    std::string why;
    EXPECT_FALSE(validate_report(j, &why)) << needle;
    EXPECT_NE(why.find(needle), std::string::npos) << why;
  };
  bad([](auto& j) { j["extra"] = 1; }, "extra");
  bad([](auto& j) { j["version"] = "v0"; }, "version");
  bad([](auto& j) { j.erase("config_echo"); }, "config_echo");
  bad([](auto& j) { j["timings"]["tree"] = -1.0; }, "timings.tree");
  bad([](auto& j) { j["timings"]["tree"] = "fast"; }, "timings.tree");
  bad([](auto& j) { j["ranks"]["one"] = 3; }, "ranks key");
  bad([](auto& j) { j["ranks"]["1"] = 2.5; }, "ranks.1");
  bad([](auto& j) { j["errors"]["x"] = nullptr; }, "null");
  bad([](auto& j) { j["krylov"].erase("residuals"); }, "residuals");
  bad([](auto& j) { j["krylov"]["iterations"] = -2; }, "iterations");
  EXPECT_FALSE(validate_report(nlohmann::json::array()));
}
