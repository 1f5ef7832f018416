#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "curvkit/catalog.hpp"

using namespace curvkit;

TEST(Catalog, NamesResolve) {
  const auto names = catalog_names();
  EXPECT_NE(std::find(names.begin(), names.end(), "melvin"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "base_3metric"), names.end());
  for (const auto& n : names)
    if (n.find('<') == std::string::npos) EXPECT_NO_THROW(lookup(n)) << n;
  EXPECT_THROW(lookup("no_such_metric"), std::out_of_range);
}

TEST(Catalog, ParameterOverride) {
  const CatalogEntry e = lookup("melvin", {{"B0", 2.0}});
  EXPECT_DOUBLE_EQ(e.metric.parameters.at("B0"), 2.0);
  const CatalogEntry flat = lookup("minkowski");
  const std::vector<double> x{0.0, 1.0, 0.0, 0.0};
  const NumericTensor g = metric_at(flat.metric, x, flat.metric.parameters);
  EXPECT_DOUBLE_EQ(g(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(g(3, 3), 1.0);
}

TEST(Catalog, ArbitraryProfiles) {
  const CatalogEntry a = lookup("melvin_type:sin(r) + 2");
  EXPECT_EQ(a.metric.dim(), 4);
  const CatalogEntry b = lookup("base_3metric:r^3");
  EXPECT_EQ(b.metric.dim(), 3);
  EXPECT_THROW(lookup("melvin_type:1 + * r"), ParseError);
}

TEST(Catalog, BaseTablesMatch) {
  for (const char* name : {"base_3metric", "base_3metric_trig", "base_3metric_square"}) {
    const CatalogEntry e = lookup(name);
    const auto geo = make_geometry(e);
    const SampledGeometry sg(*geo, default_grid(e.metric, e.metric.parameters));
    const GoldenReport rep = golden_check(e, sg);
    EXPECT_EQ(rep.count(GoldenStatus::mismatch), 0u) << name;
    EXPECT_EQ(rep.outcomes.size(), e.golden.size());
    EXPECT_TRUE(rep.unlisted.empty()) << name;
  }
}

TEST(Catalog, CountsAddUp) {
  const CatalogEntry e = lookup("melvin_type_generic");
  const auto geo = make_geometry(e);
  const SampledGeometry sg(*geo, default_grid(e.metric, e.metric.parameters));
  const GoldenReport rep = golden_check(e, sg);
  EXPECT_EQ(rep.count(GoldenStatus::match) + rep.count(GoldenStatus::disputed) + rep.count(GoldenStatus::mismatch),
            rep.outcomes.size());
  // Disputed entries are exactly the flagged ones.
  for (std::size_t i = 0; i < rep.outcomes.size(); ++i)
    if (rep.outcomes[i].status == GoldenStatus::disputed) EXPECT_TRUE(e.golden[i].disputed);
}

TEST(Catalog, TamperedEntryIsCaught) {
  CatalogEntry e = lookup("base_3metric");
  auto it = std::find_if(e.golden.begin(), e.golden.end(), [](const GoldenEntry& g) {
    return g.tensor == "R" && g.index == std::vector<int>{1, 2, 1, 2};
  });
  ASSERT_NE(it, e.golden.end());
  it->printed = "2*(" + it->printed + ")";
  const auto geo = make_geometry(e);
  const SampledGeometry sg(*geo, default_grid(e.metric, e.metric.parameters));
  EXPECT_GE(golden_check(e, sg).count(GoldenStatus::mismatch), 1u);
}

TEST(Catalog, StatusStrings) {
  for (GoldenStatus s : {GoldenStatus::match, GoldenStatus::disputed, GoldenStatus::mismatch})
    EXPECT_EQ(golden_status_from_string(to_string(s)), s);
}

TEST(SymmetryOrbit, RiemannHasEightSlots) {
  const auto orbit = symmetry_orbit("R", {0, 1, 0, 2});
  std::set<std::vector<int>> idx;
  for (const auto& [i, sign] : orbit) {
    idx.insert(i);
    EXPECT_TRUE(sign == 1 || sign == -1);
  }
  EXPECT_EQ(idx.size(), 8u);
  for (const auto& [i, sign] : orbit)
    if (i == std::vector<int>{1, 0, 0, 2}) EXPECT_EQ(sign, -1);
}

TEST(SymmetryOrbit, SymmetricAndAntisymmetricPairs) {
  const auto s = symmetry_orbit("S", {0, 2});
  EXPECT_EQ(s.size(), 2u);
  for (const auto& [i, sign] : s) EXPECT_EQ(sign, 1);
  const auto f = symmetry_orbit("F", {1, 3});
  ASSERT_EQ(f.size(), 2u);
  for (const auto& [i, sign] : f)
    if (i == std::vector<int>{3, 1}) EXPECT_EQ(sign, -1);
}
