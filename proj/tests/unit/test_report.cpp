#include <gtest/gtest.h>

#include "curvkit/report.hpp"

using namespace curvkit;

namespace {

ClassificationReport melvin_report() {
  const CatalogEntry e = lookup("melvin");
  const auto geo = make_geometry(e);
  const SampledGeometry sg(*geo, default_grid(e.metric, e.metric.parameters));
  return build_report(sg, {}, "catalog", &e);
}

}  // namespace

TEST(Report, MachineRoundTrip) {
  const ClassificationReport r = melvin_report();
  const std::string text = to_machine(r);
  const ClassificationReport back = parse_report(text);
  EXPECT_TRUE(back == r);
  EXPECT_EQ(to_machine(back), text);
}

TEST(Report, Deterministic) {
  EXPECT_EQ(to_machine(melvin_report()), to_machine(melvin_report()));
}

TEST(Report, Contents) {
  const ClassificationReport r = melvin_report();
  EXPECT_EQ(r.engine_version, kEngineVersion);
  EXPECT_EQ(r.metric, "melvin");
  ASSERT_NE(r.find("pseudosymmetric[R.R]"), nullptr);
  EXPECT_EQ(r.find("pseudosymmetric[R.R]")->verdict, Verdict::holds);
  EXPECT_EQ(r.find("nonexistent"), nullptr);
  EXPECT_FALSE(r.golden.empty());
  const std::string text = to_text(r);
  EXPECT_NE(text.find("pseudosymmetric[R.R]"), std::string::npos);
}

TEST(Report, RejectsGarbage) {
  EXPECT_ANY_THROW(parse_report("not: [a report"));
}
