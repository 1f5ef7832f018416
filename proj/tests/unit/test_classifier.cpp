#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "curvkit/catalog.hpp"
#include "curvkit/classifier.hpp"
#include "curvkit/metric_file.hpp"

using namespace curvkit;

namespace {

const std::string kData = CURVKIT_TEST_DATA;

std::map<std::string, FitResult> by_name(std::vector<FitResult> fits) {
  std::map<std::string, FitResult> out;
  for (auto& f : fits) out.emplace(f.name, std::move(f));
  return out;
}

struct Fixture {
  explicit Fixture(const MetricSpec& m) : geo(m), sg(geo, default_grid(m, m.parameters)) {}
  Geometry geo;
  SampledGeometry sg;
};

}  // namespace

TEST(SolvePoint, ExactCombination) {
  Eigen::VectorXd a(4), b(4);
  a << 1, 0, 2, 0;
  b << 0, 1, 0, 3;
  const PointFit f = solve_point(2 * a - 0.5 * b, {a, b}, {});
  EXPECT_EQ(f.verdict, Verdict::holds);
  EXPECT_NEAR(f.coefficients[0], 2.0, 1e-12);
  EXPECT_NEAR(f.coefficients[1], -0.5, 1e-12);
  EXPECT_EQ(f.nullspace_dim, 0);
}

TEST(SolvePoint, FailsAndVacuous) {
  Eigen::VectorXd a(3), l(3);
  a << 1, 0, 0;
  l << 1, 1, 0;
  EXPECT_EQ(solve_point(l, {a}, {}).verdict, Verdict::fails);
  EXPECT_EQ(solve_point(Eigen::VectorXd::Zero(3), {Eigen::VectorXd::Zero(3)}, {}).verdict, Verdict::vacuous);
}

TEST(SolvePoint, DependentBasisReportsNullspace) {
  Eigen::VectorXd a(3);
  a << 1, 2, 3;
  const PointFit f = solve_point(a, {a, 2 * a}, {});
  EXPECT_EQ(f.verdict, Verdict::holds);
  EXPECT_EQ(f.nullspace_dim, 1);
}

TEST(Classifier, SphereIsEinsteinAndRecurrent) {
  const Fixture fx(load_metric_file(kData + "/sphere.metric"));
  const FitResult ein = ein_level(fx.sg, {});
  EXPECT_TRUE(ein.holds());
  EXPECT_EQ(ein.order, 1);
  EXPECT_NEAR(ein.coefficient(0, "n0"), 0.5, 1e-10);  // S + (2/a^2) g = 0, a = 2
  const auto all = by_name(classify(fx.sg, {}));
  EXPECT_TRUE(all.at("semisymmetric[R.R]").holds());
  EXPECT_TRUE(all.at("cyclic_parallel_ricci").holds());
}

TEST(Classifier, MinkowskiIsVacuous) {
  const CatalogEntry e = lookup("minkowski");
  const auto geo = make_geometry(e);
  const SampledGeometry sg(*geo, default_grid(e.metric, e.metric.parameters));
  for (const FitResult& f : classify(sg, {})) {
    EXPECT_NE(f.verdict, Verdict::fails) << f.name;
  }
  const auto all = by_name(classify(sg, {}));
  EXPECT_EQ(all.at("pseudosymmetric[R.R]").verdict, Verdict::vacuous);
}

TEST(Classifier, MelvinHeadlineStructures) {
  const CatalogEntry e = lookup("melvin");
  const auto geo = make_geometry(e);
  const SampledGeometry sg(*geo, default_grid(e.metric, e.metric.parameters));
  const auto all = by_name(classify(sg, {}));
  EXPECT_TRUE(all.at("pseudosymmetric[R.R]").holds());
  EXPECT_FALSE(all.at("semisymmetric[R.R]").holds());
  EXPECT_TRUE(all.at("roter").holds());
  const FitResult& ein = all.at("ein_level");
  EXPECT_TRUE(ein.holds());
}

TEST(Classifier, ToleranceMonotone) {
  // A verdict that holds at a tight tolerance still holds when it is loosened.
  const CatalogEntry e = lookup("melvin_type_generic");
  const auto geo = make_geometry(e);
  const SampledGeometry sg(*geo, default_grid(e.metric, e.metric.parameters));
  const auto tight = by_name(classify(sg, {1e-10, 1e-12}));
  const auto loose = by_name(classify(sg, {1e-6, 1e-12}));
  for (const auto& [name, f] : tight)
    if (f.holds()) EXPECT_TRUE(loose.at(name).holds()) << name;
}

TEST(Classifier, QuasiEinsteinRankOfSphereIsZero) {
  const Fixture fx(load_metric_file(kData + "/sphere.metric"));
  const FitResult q = quasi_einstein_rank(fx.sg, {});
  EXPECT_EQ(q.order, 0);
  EXPECT_NEAR(q.coefficient(0, "alpha"), -0.5, 1e-10);
}

TEST(Classifier, ProportionalityCoefficient) {
  NumericTensor a(2, 2), b(2, 2);
  a(0, 0) = 3;
  a(1, 1) = -6;
  b(0, 0) = 1;
  b(1, 1) = -2;
  const std::vector<NumericTensor> lhs{a}, rhs{b};
  const FitResult f = fit_proportionality("p", lhs, rhs, {});
  EXPECT_TRUE(f.holds());
  EXPECT_NEAR(f.coefficients[0][0], 3.0, 1e-14);
}

TEST(Classifier, VerdictStrings) {
  for (Verdict v : {Verdict::holds, Verdict::fails, Verdict::vacuous, Verdict::not_applicable})
    EXPECT_EQ(verdict_from_string(to_string(v)), v);
}
