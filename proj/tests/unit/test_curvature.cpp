#include <gtest/gtest.h>

#include <cmath>

#include "curvkit/catalog.hpp"
#include "curvkit/metric_file.hpp"
#include "curvkit/operators.hpp"
#include "curvkit/sampled.hpp"

using namespace curvkit;

namespace {

const std::string kData = CURVKIT_TEST_DATA;

double worst_difference(const SampledGeometry& a, const SampledGeometry& b, const std::string& field) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const NumericTensor& x = a[i].field(field);
    const NumericTensor& y = b[i].field(field);
    worst = std::max(worst, max_abs(x - y) / std::max(1.0, max_abs(x)));
  }
  return worst;
}

}  // namespace

TEST(Curvature, MelvinValuesAtUnitRadius) {
  const CatalogEntry e = lookup("melvin");
  const auto geo = make_geometry(e);
  const SampleGrid grid = make_grid(e.metric, e.metric.parameters, {{"r", {1.0}}});
  const SampledGeometry sg(*geo, grid);
  const PointGeometry& p = sg[0];
  EXPECT_NEAR(p.g()(0, 0), -1.5625, 1e-15);
  EXPECT_NEAR(p.field("R")(0, 2, 0, 2), 0.25, 1e-12);
  EXPECT_NEAR(p.kappa, 0.0, 1e-12);  // traceless Maxwell source
  EXPECT_NEAR(p.field("F")(1, 3), 0.32, 1e-15);
}

TEST(Curvature, RiemannSymmetries) {
  const CatalogEntry e = lookup("melvin_type_generic");
  const auto geo = make_geometry(e);
  const SampledGeometry sg(*geo, default_grid(e.metric, e.metric.parameters));
  const int n = geo->dim();
  for (const auto& p : sg.points()) {
    const NumericTensor& R = p.field("R");
    const double s = max_abs(R);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            EXPECT_NEAR(R(a, b, c, d), -R(b, a, c, d), 1e-12 * s);
            EXPECT_NEAR(R(a, b, c, d), R(c, d, a, b), 1e-12 * s);
            EXPECT_NEAR(R(a, b, c, d) + R(a, c, d, b) + R(a, d, b, c), 0.0, 1e-12 * s);
          }
  }
}

TEST(Curvature, SphereIsEinsteinWithConstantCurvature) {
  const MetricSpec m = load_metric_file(kData + "/sphere.metric");
  const Geometry geo(m);
  const SampledGeometry sg(geo, default_grid(m, m.parameters));
  const double a2 = 4.0;
  for (const auto& p : sg.points()) {
    // In the library's sign convention the round sphere has
    // R = -(g^g)/(2a^2), S = -(2/a^2) g, kappa = -6/a^2.
    const NumericTensor want = (-0.5 / a2) * kulkarni_nomizu(p.g(), p.g());
    EXPECT_LE(max_abs(p.field("R") - want), 1e-12);
    EXPECT_LE(max_abs(p.field("S") + (2.0 / a2) * p.g()), 1e-12);
    EXPECT_NEAR(p.kappa, -6.0 / a2, 1e-12);
    EXPECT_EQ(max_abs(p.field("C")), 0.0);
  }
}

TEST(Curvature, FlatChartHasNoCurvature) {
  const MetricSpec m = load_metric_file(kData + "/flat.metric");
  const Geometry geo(m);
  const SampledGeometry sg(geo, default_grid(m, m.parameters));
  for (const auto& p : sg.points()) {
    EXPECT_LE(max_abs(p.field("R")), 1e-12);
    EXPECT_LE(max_abs(p.field("nablaR")), 1e-12);
  }
}

TEST(Curvature, WeylFormReproducesMelvin) {
  const MetricSpec w = load_metric_file(kData + "/weyl_melvin.metric");
  const CatalogEntry e = lookup("melvin");
  const Geometry gw(w);
  const auto gm = make_geometry(e);
  const SampleGrid grid = default_grid(w, w.parameters);
  const SampledGeometry a(gw, grid), b(*gm, grid);
  for (const char* f : {"g", "R", "S", "C", "nablaR"}) EXPECT_LE(worst_difference(a, b, f), 1e-12) << f;
}

TEST(Curvature, MelvinTypeFamilyContainsMelvin) {
  const CatalogEntry mt = lookup("melvin_type:ln(1 + r^2/4)");
  const CatalogEntry m = lookup("melvin");
  const auto a = make_geometry(mt), b = make_geometry(m);
  const SampleGrid grid = make_grid(m.metric, m.metric.parameters, {{"r", {0.5, 1.0, 1.5, 3.0}}});
  const SampledGeometry sa(*a, grid), sb(*b, grid);
  for (const char* f : {"R", "S", "W", "K"}) EXPECT_LE(worst_difference(sa, sb, f), 1e-12) << f;
}

TEST(Curvature, BaseMetricSignConvention) {
  // R_1313 = e^{2f} f'^2 and S_22 = 2 f'' for the 3-dimensional base.
  const CatalogEntry e = lookup("base_3metric");
  const auto geo = make_geometry(e);
  const SampledGeometry sg(*geo, default_grid(e.metric, e.metric.parameters));
  for (const auto& p : sg.points()) {
    const double r = p.point[1];
    const double f = std::log(1.0 + r), fp = 1.0 / (1.0 + r), fpp = -fp * fp;
    EXPECT_NEAR(p.field("R")(0, 2, 0, 2), std::exp(2 * f) * fp * fp, 1e-12);
    EXPECT_NEAR(p.field("S")(1, 1), 2 * fpp, 1e-12);
    EXPECT_EQ(max_abs(p.field("C")), 0.0);
  }
}

TEST(Curvature, ContractedBianchi) {
  // g^{bc} S_{ab,c} = kappa_{,a} / 2, with kappa_{,a} from a central difference.
  const CatalogEntry e = lookup("melvin_type_generic");
  const auto geo = make_geometry(e);
  const SampledGeometry sg(*geo, default_grid(e.metric, e.metric.parameters), {"S"});
  const Expr kappa = geo->ricci().kappa;
  const double h = 1e-5;
  for (const auto& p : sg.points()) {
    const NumericTensor& dS = p.field("nablaS");
    const NumericTensor& gi = p.ginv();
    std::vector<double> up = p.point, dn = p.point;
    up[1] += h;
    dn[1] -= h;
    const double dk = (evaluate(kappa, up, sg.grid().params) - evaluate(kappa, dn, sg.grid().params)) / (2 * h);
    for (int a = 0; a < 4; ++a) {
      double div = 0.0;
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) div += gi(b, c) * dS(a, b, c);
      EXPECT_NEAR(div, a == 1 ? dk / 2 : 0.0, 1e-7 * std::max(1.0, std::fabs(dk)));
    }
  }
}

TEST(Curvature, UnknownFieldThrows) {
  const CatalogEntry e = lookup("base_3metric");
  const auto geo = make_geometry(e);
  EXPECT_THROW(geo->field("nope"), std::out_of_range);
  EXPECT_TRUE(geo->has_field("K"));
}
