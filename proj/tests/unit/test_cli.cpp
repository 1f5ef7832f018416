#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "curvkit/report.hpp"

using namespace curvkit;

namespace {

const std::string kData = CURVKIT_TEST_DATA;

struct Invocation {
  int code;
  std::string out, err;
};

Invocation run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, ClassifyCatalogMetric) {
  const Invocation r = run({"classify", "--metric", "melvin", "--param", "B0=1"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("pseudosymmetric[R.R]"), std::string::npos);
}

TEST(Cli, MachineFormatParses) {
  const Invocation r = run({"classify", "--metric-file", kData + "/sphere.metric", "--format", "machine"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const ClassificationReport rep = parse_report(r.out);
  EXPECT_EQ(rep.metric, "sphere3");
  ASSERT_NE(rep.find("ein_level"), nullptr);
  EXPECT_EQ(rep.find("ein_level")->order, 1);
}

TEST(Cli, OutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "curvkit_cli_test.yaml";
  const Invocation r = run({"classify", "--metric", "base_3metric", "--format", "machine", "--output", path.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(parse_report(ss.str()).metric, "base_3metric");
  std::filesystem::remove(path);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"classify", "--metric-file", kData + "/missing.metric"}).code, cli::kFileNotFound);
  EXPECT_EQ(run({"classify", "--metric-file", kData + "/degenerate.metric"}).code, cli::kDegenerate);
  EXPECT_EQ(run({"classify", "--metric-file", kData + "/bad_expr.metric"}).code, cli::kParse);
  EXPECT_EQ(run({"classify", "--bogus-flag"}).code, cli::kUsage);
  EXPECT_EQ(run({"classify", "--metric", "melvin", "--metric-file", kData + "/sphere.metric"}).code, cli::kUsage);
  EXPECT_EQ(run({"classify", "--metric", "melvin", "--grid", "r=2"}).code, cli::kEmptyGrid);
  EXPECT_EQ(run({"classify", "--metric", "melvin", "--grid", "r=1:3:0"}).code, cli::kUsage);
  EXPECT_EQ(run({"classify", "--metric", "melvin", "--param", "B0"}).code, cli::kUsage);
  EXPECT_EQ(run({}).code, cli::kUsage);
}

TEST(Cli, GridRange) {
  const Invocation r = run({"classify", "--metric", "melvin", "--grid", "r=0.5:1.5:3", "--format", "machine"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const ClassificationReport rep = parse_report(r.out);
  ASSERT_EQ(rep.points.size(), 3u);
  EXPECT_DOUBLE_EQ(rep.points[1][1], 1.0);
}

TEST(Cli, Components) {
  const Invocation r = run({"components", "--metric", "melvin", "--tensor", "R", "--at", "r=1"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("R_1313"), std::string::npos);
  EXPECT_NE(r.out.find("0.25"), std::string::npos);
  EXPECT_EQ(run({"components", "--metric", "melvin"}).code, cli::kUsage);
  EXPECT_NE(run({"components", "--metric", "melvin", "--tensor", "nope"}).code, cli::kOk);
}

TEST(Cli, ListNamesCatalog) {
  const Invocation r = run({"list"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("melvin_type_generic"), std::string::npos);
}

TEST(Cli, VerifySingleCriterion) {
  const Invocation ok = run({"verify-paper", "--criterion", "2"});
  EXPECT_EQ(ok.code, cli::kOk) << ok.out << ok.err;
  EXPECT_NE(ok.out.find("PASS"), std::string::npos);
  EXPECT_EQ(run({"verify-paper", "--criterion", "99"}).code, cli::kUsage);
  const Invocation bad = run({"verify-paper", "--criterion", "1", "--tamper-golden"});
  EXPECT_EQ(bad.code, cli::kClaimFailed);
  EXPECT_NE(bad.out.find("base_3metric R_1212 mismatch"), std::string::npos);
}
