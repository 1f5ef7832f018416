#include <gtest/gtest.h>

#include "curvkit/catalog.hpp"
#include "curvkit/chart.hpp"
#include "curvkit/metric_file.hpp"

using namespace curvkit;

namespace {
const std::string kData = CURVKIT_TEST_DATA;
}

TEST(MetricFile, LoadsDefinitionsAndSamples) {
  const MetricSpec m = load_metric_file(kData + "/weyl_melvin.metric");
  EXPECT_EQ(m.name, "weyl_melvin");
  EXPECT_EQ(m.dim(), 4);
  EXPECT_EQ(m.signature, (Signature{1, 3}));
  EXPECT_DOUBLE_EQ(m.parameters.at("B0"), 1.0);
  const NumericTensor g = metric_at(m, std::vector<double>{0, 1, 0, 0}, m.parameters);
  EXPECT_NEAR(g(0, 0), -1.5625, 1e-15);
  EXPECT_NEAR(g(1, 1), 1.5625, 1e-15);
  EXPECT_NEAR(g(3, 3), 0.64, 1e-15);
  EXPECT_EQ(g(0, 1), 0.0);
}

TEST(MetricFile, ExportRoundTrip) {
  for (const char* name : {"melvin", "base_3metric", "melvin_type_generic"}) {
    const CatalogEntry e = lookup(name);
    const MetricSpec back = parse_metric_text(export_metric(e.metric));
    ASSERT_EQ(back.dim(), e.metric.dim());
    EXPECT_EQ(back.chart.coordinates, e.metric.chart.coordinates);
    const SampleGrid grid = default_grid(e.metric, e.metric.parameters);
    for (const auto& p : grid.points) {
      const NumericTensor a = metric_at(e.metric, p, grid.params), b = metric_at(back, p, back.bind(grid.params));
      EXPECT_LE(max_abs(a - b), 1e-14 * max_abs(a)) << name;
    }
    EXPECT_EQ(export_metric(back), export_metric(e.metric)) << name;
  }
}

TEST(MetricFile, Errors) {
  EXPECT_THROW(load_metric_file(kData + "/missing.metric"), FileNotFoundError);
  EXPECT_THROW(load_metric_file(kData + "/bad_expr.metric"), ParseError);
  EXPECT_THROW(parse_metric_text("name: x\ndimension: 3\n"), MetricFileError);
  EXPECT_THROW(parse_metric_text("name: x\ndimension: 3\ncoordinates: [a, b, c]\nsignature: [0, 3]\n"
                                 "components:\n  - \"1 4 : 1\"\n"),
               MetricFileError);
}

TEST(Chart, DegenerateMetricRejected) {
  const MetricSpec m = load_metric_file(kData + "/degenerate.metric");
  EXPECT_THROW(Geometry{m}, DegenerateMetricError);
}

TEST(Chart, SignatureChecked) {
  MetricSpec m = lookup("melvin").metric;
  m.signature = Signature{0, 4};
  const SampleGrid grid = default_grid(m, m.parameters);
  EXPECT_THROW(validate_grid(m, grid), DegenerateMetricError);
}

TEST(Grid, DefaultGridAvoidsExceptionalLoci) {
  const CatalogEntry e = lookup("melvin");
  const SampleGrid grid = default_grid(e.metric, e.metric.parameters);
  ASSERT_GE(grid.points.size(), kMinGridPoints);
  for (const auto& p : grid.points) EXPECT_NE(p[1], 2.0);
}

TEST(Grid, ExceptionalPointsDropped) {
  const CatalogEntry e = lookup("melvin");
  EXPECT_THROW(make_grid(e.metric, e.metric.parameters, {{"r", {2.0}}}), EmptyGridError);
  const SampleGrid g = make_grid(e.metric, e.metric.parameters, {{"r", {1.0, 2.0, 3.0}}});
  EXPECT_EQ(g.points.size(), 2u);
  // With B0 = 2 the locus moves to r = 1.
  EXPECT_THROW(make_grid(e.metric, {{"B0", 2.0}}, {{"r", {1.0}}}), EmptyGridError);
}

TEST(Grid, DomainRespected) {
  const CatalogEntry e = lookup("melvin");
  EXPECT_THROW(make_grid(e.metric, e.metric.parameters, {{"r", {-1.0, 0.0}}}), EmptyGridError);
}

TEST(Grid, Deterministic) {
  const MetricSpec m = load_metric_file(kData + "/sphere.metric");
  const SampleGrid a = default_grid(m, m.parameters), b = default_grid(m, m.parameters);
  EXPECT_EQ(a.points, b.points);
}
