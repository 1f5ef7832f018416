#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace curvkit;

namespace {

void expect_all_ok(const std::vector<PropertyOutcome>& outcomes) {
  ASSERT_FALSE(outcomes.empty());
  for (const auto& o : outcomes) EXPECT_TRUE(o.ok) << o.name << ": " << o.detail;
}

}  // namespace

TEST(Oracles, RowRank) {
  EXPECT_EQ(oracle::row_rank({{1, 2}, {2, 4}}), 1);
  EXPECT_EQ(oracle::row_rank({{1, 0}, {0, 1e-3}}), 2);
  EXPECT_EQ(oracle::row_rank({{1, 0}, {0, 1e-12}}), 1);
}

TEST(Oracles, NormalEquations) {
  const auto x = oracle::normal_equations({{1, 0, 1}, {0, 1, 1}}, {2, 3, 5});
  ASSERT_EQ(x.size(), 2u);
  EXPECT_NEAR(x[0], 2.0, 1e-12);
  EXPECT_NEAR(x[1], 3.0, 1e-12);
}

TEST(Oracles, FiniteDifferenceCurvature) { expect_all_ok(oracle::fd_curvature_checks()); }
TEST(Oracles, Derivatives) { expect_all_ok(oracle::derivative_checks()); }
TEST(Oracles, Operators) { expect_all_ok(oracle::operator_checks()); }
TEST(Oracles, Fits) { expect_all_ok(oracle::fit_checks()); }
TEST(Oracles, Ranks) { expect_all_ok(oracle::rank_checks()); }
