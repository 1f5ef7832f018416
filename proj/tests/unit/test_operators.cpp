#include <gtest/gtest.h>

#include <random>

#include "curvkit/catalog.hpp"
#include "curvkit/operators.hpp"
#include "curvkit/sampled.hpp"

using namespace curvkit;

namespace {

NumericTensor random_symmetric(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  NumericTensor t(n, 2);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) t(a, b) = t(b, a) = u(rng);
  return t;
}

class MelvinPoint : public ::testing::Test {
 protected:
  void SetUp() override {
    entry_ = lookup("melvin");
    geo_ = make_geometry(entry_);
    sg_ = std::make_unique<SampledGeometry>(*geo_, make_grid(entry_.metric, entry_.metric.parameters, {{"r", {1.0}}}));
  }
  const PointGeometry& p() const { return (*sg_)[0]; }
  CatalogEntry entry_;
  std::unique_ptr<Geometry> geo_;
  std::unique_ptr<SampledGeometry> sg_;
};

}  // namespace

TEST(KulkarniNomizu, IdentitiesOnRandomInput) {
  std::mt19937_64 rng(11);
  for (int n : {3, 4, 5}) {
    const NumericTensor E = random_symmetric(n, rng), F = random_symmetric(n, rng);
    const NumericTensor EF = kulkarni_nomizu(E, F);
    EXPECT_LE(max_abs(EF - kulkarni_nomizu(F, E)), 1e-15);
    // Explicit component formula.
    EXPECT_NEAR(EF(0, 1, 1, 2), E(0, 2) * F(1, 1) - E(0, 1) * F(1, 2) + E(1, 1) * F(0, 2) - E(1, 2) * F(0, 1), 1e-15);
  }
}

TEST(KulkarniNomizu, RejectsBadOperands) {
  NumericTensor a(3, 2), b(3, 3);
  a(0, 1) = 1.0;  // not symmetric
  EXPECT_THROW(kulkarni_nomizu(a, a), std::invalid_argument);
  EXPECT_THROW(kulkarni_nomizu(b, b), std::invalid_argument);
}

TEST(Operators, RejectBadOperands) {
  NumericTensor g(3, 2), T(3, 2), R(3, 3);
  g(0, 1) = 1.0;
  EXPECT_THROW(q_operator(g, T), std::invalid_argument);
  EXPECT_THROW(curvature_action(R, T, T), std::invalid_argument);
  EXPECT_THROW(q_operator(T, NumericTensor(3, 0)), std::invalid_argument);
}

TEST_F(MelvinPoint, GWedgeGAndTachibanaOfG) {
  const NumericTensor G = p().field("G");
  EXPECT_LE(max_abs(kulkarni_nomizu(p().g(), p().g()) - 2.0 * G), 1e-14);
  EXPECT_LE(max_abs(q_operator(p().g(), G)), 1e-14);
}

TEST_F(MelvinPoint, MaxwellFieldValues) {
  const NumericTensor& F = p().field("F");
  EXPECT_NEAR(F(1, 3), 0.32, 1e-15);
  EXPECT_NEAR(F(3, 1), -0.32, 1e-15);
  // Q(g,F)_{1214}: only the slot-1 term g_11 F_24 survives, with a minus sign.
  const NumericTensor QgF = q_operator(p().g(), F);
  EXPECT_NEAR(QgF(0, 1, 0, 3), -p().g()(0, 0) * F(1, 3), 1e-15);
  EXPECT_NEAR(QgF(0, 1, 0, 3), 0.5, 1e-15);
}

TEST_F(MelvinPoint, ActionOfGIsZero) {
  // G acts as the identity-like curvature; G.g = 0 for any metric.
  EXPECT_LE(max_abs(curvature_action(p().field("G"), p().g(), p().ginv())), 1e-14);
  EXPECT_LE(max_abs(curvature_action(p().field("R"), p().g(), p().ginv())), 1e-14);
}

TEST_F(MelvinPoint, NamedProducts) {
  const NumericTensor a = named_tensor(p(), "RdotR");
  EXPECT_LE(max_abs(a - curvature_action(p().field("R"), p().field("R"), p().ginv())), 0.0);
  const NumericTensor q = named_tensor(p(), "QgR");
  EXPECT_LE(max_abs(q - q_operator(p().g(), p().field("R"))), 0.0);
  EXPECT_EQ(named_tensor(p(), "kappa").rank(), 0);
  EXPECT_THROW(named_tensor(p(), "Xdot"), std::out_of_range);
}

TEST(Operators, LinearityInSecondSlot) {
  std::mt19937_64 rng(5);
  const int n = 4;
  const NumericTensor B = random_symmetric(n, rng), T1 = random_symmetric(n, rng), T2 = random_symmetric(n, rng);
  const NumericTensor A = kulkarni_nomizu(random_symmetric(n, rng), random_symmetric(n, rng));
  const NumericTensor gi = random_symmetric(n, rng);
  const double c = 0.37;
  EXPECT_LE(max_abs(q_operator(B, T1 + c * T2) - (q_operator(B, T1) + c * q_operator(B, T2))), 1e-14);
  EXPECT_LE(max_abs(curvature_action(A, T1 + c * T2, gi) -
                    (curvature_action(A, T1, gi) + c * curvature_action(A, T2, gi))),
            1e-13);
}

TEST(Operators, SymbolicAndNumericAgree) {
  const CatalogEntry e = lookup("base_3metric");
  const auto geo = make_geometry(e);
  const SymbolicTensor sym = q_operator(geo->ricci().S, geo->R());
  std::vector<double> x{0.0, 1.3, 0.0};
  Evaluator ev(x, e.metric.parameters);
  const NumericTensor S = evaluate(geo->ricci().S, ev), R = evaluate(geo->R(), ev);
  Evaluator ev2(x, e.metric.parameters);
  EXPECT_LE(max_abs(evaluate(sym, ev2) - q_operator(S, R)), 1e-13);
}
