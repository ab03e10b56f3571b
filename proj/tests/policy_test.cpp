#include <random>

#include <gtest/gtest.h>

#include "ehbp/capacity.hpp"
#include "ehbp/policy.hpp"
#include "oracles.hpp"

using namespace ehbp;

namespace {

// Two sinks hanging off node 1: node 1 has neighbors 2 and 3, two commodities.
Topology split_net() {
  return Topology(3, {{1, 2}, {1, 3}},
                  {CommoditySpec{0, 2, {{1, {0.3, 1}}}}, CommoditySpec{0, 3, {{1, {0.3, 1}}}}});
}

DualState zero_duals(const Topology& t) {
  return DualState{NodeCommodityMap<double>(t.node_count(), t.commodity_count(), 0.0), NodeMap<double>(t.node_count(), 0.0)};
}

}  // namespace

TEST(Pressure, Examples) {
  auto t = split_net();
  auto p = PolicyParams::make(t, PolicyKind::sbp_eh);
  auto d = zero_duals(t);
  d.gamma(1, 1) = 5;
  d.gamma(2, 1) = 2;
  d.beta[1] = 1;
  EXPECT_EQ(pressure(t, p, d, 1, 1, 2), 2.0);
  d.gamma(3, 2) = d.gamma(1, 2) = 4;
  d.beta[1] = 0;
  EXPECT_EQ(pressure(t, p, d, 1, 2, 3), 0.0);
  p.set_weight(t, 1, 3, 2, 1.5);
  EXPECT_EQ(pressure(t, p, d, 1, 2, 3), 1.5);
  EXPECT_THROW(pressure(t, p, d, 2, 1, 3), std::logic_error);
}

TEST(Pressure, EmptyBatteryBlocksEveryTransmission) {
  auto t = default14();
  auto p = PolicyParams::make(t, PolicyKind::sbp_eh);
  ASSERT_TRUE(validate_capacity(t, p, NodeMap<double>(14, 15.0)).empty());
  auto d = zero_duals(t);
  d.beta[5] = 15;
  d.gamma(5, 1) = 14;  // largest value the bound allows: 10 + 1 + 3
  for (CommodityId k = 1; k <= 2; ++k)
    for (NodeId j : t.neighbors(5)) EXPECT_LE(pressure(t, p, d, 5, k, j), -1.0);
  EXPECT_FALSE(sbp_decide(t, p, d, 5).action);
  EXPECT_FALSE(ssbp_decide(t, p, d, 5, 0.0).action);
}

TEST(SbpDecide, PicksTheLargestPositivePressure) {
  auto t = split_net();
  auto p = PolicyParams::make(t, PolicyKind::sbp);
  auto d = zero_duals(t);
  d.gamma(1, 1) = 2;  // (k1, j2): 2, (k1, j3): 2 - gamma(3,1)
  d.gamma(3, 1) = 3;  // (k1, j3): -1
  auto r = sbp_decide(t, p, d, 1);
  ASSERT_TRUE(r.action);
  EXPECT_EQ(*r.action, (Action{1, 2}));
  EXPECT_TRUE(r.fractional.empty());
}

TEST(SbpDecide, NonPositivePressuresMeanNoAction) {
  auto t = split_net();
  auto p = PolicyParams::make(t, PolicyKind::sbp);
  auto d = zero_duals(t);
  EXPECT_FALSE(sbp_decide(t, p, d, 1).action);
  d.gamma(2, 1) = 1;
  EXPECT_FALSE(sbp_decide(t, p, d, 1).action);
}

TEST(SbpDecide, TiesGoToTheSmallestCommodityThenNeighbor) {
  auto t = split_net();
  auto p = PolicyParams::make(t, PolicyKind::sbp);
  auto d = zero_duals(t);
  // (k1, j3) = 3 and (k2, j2) = 3; (k1, j2) and (k2, j3) lower.
  d.gamma(1, 1) = 3;
  d.gamma(2, 1) = 1;
  d.gamma(1, 2) = 3;
  d.gamma(3, 2) = 1;
  auto r = sbp_decide(t, p, d, 1);
  ASSERT_TRUE(r.action);
  EXPECT_EQ(*r.action, (Action{1, 3}));
  d.gamma(2, 1) = 0;  // (k1, j2) = (k1, j3) = 3
  EXPECT_EQ(*sbp_decide(t, p, d, 1).action, (Action{1, 2}));
}

TEST(Waterfill, Examples) {
  std::vector<double> h1{3, 1};
  auto w = waterfill(h1);
  EXPECT_DOUBLE_EQ(w.level, 1.0);
  EXPECT_EQ(w.fill, (std::vector<double>{1, 0}));
  auto o = oracle::bisect_waterfill(h1);
  EXPECT_NEAR(o.level, 1.0, 1e-12);

  std::vector<double> h2{-1, -2};
  w = waterfill(h2);
  EXPECT_EQ(w.level, 0.0);
  EXPECT_EQ(w.fill, (std::vector<double>{0, 0}));

  std::vector<double> h3{1};
  w = waterfill(h3);
  EXPECT_EQ(w.level, 0.0);
  EXPECT_EQ(w.fill, (std::vector<double>{0.5}));

  std::vector<double> h4{4, 4, 4, 4};
  w = waterfill(h4);
  EXPECT_DOUBLE_EQ(w.level, 3.5);
  for (double r : w.fill) EXPECT_DOUBLE_EQ(r, 0.25);
  EXPECT_NEAR(oracle::bisect_waterfill(h4).level, 3.5, 1e-12);

  w = waterfill({});
  EXPECT_EQ(w.level, 0.0);
  EXPECT_TRUE(w.fill.empty());
}

TEST(Waterfill, MatchesBisectionAndKktOnRandomInstances) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> height(-5, 5);
  std::uniform_int_distribution<int> size(1, 12);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> h(static_cast<std::size_t>(size(rng)));
    for (auto& x : h) x = height(rng);
    auto w = waterfill(h);
    auto o = oracle::bisect_waterfill(h);
    ASSERT_NEAR(w.level, o.level, 1e-9);
    double total = 0;
    for (std::size_t n = 0; n < h.size(); ++n) {
      ASSERT_NEAR(w.fill[n], o.fill[n], 1e-9);
      ASSERT_GE(w.fill[n], 0.0);
      total += w.fill[n];
    }
    ASSERT_GE(w.level, 0.0);
    if (w.level == 0.0)
      ASSERT_LE(total, 1.0 + 1e-12);
    else
      ASSERT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(SsbpDecide, FractionalRoutingFollowsTheWaterfill) {
  auto t = split_net();
  auto p = PolicyParams::make(t, PolicyKind::ssbp);
  auto d = zero_duals(t);
  d.gamma(1, 1) = 3;
  d.gamma(1, 2) = 1;
  auto r = ssbp_fractional(t, p, d, 1);
  ASSERT_EQ(r.fractional.size(), 4u);
  // Heights in lexicographic order: (1,2)=3, (1,3)=3, (2,2)=1, (2,3)=1.
  EXPECT_EQ(r.fractional[0].action, (Action{1, 2}));
  EXPECT_EQ(r.fractional[3].action, (Action{2, 3}));
  EXPECT_DOUBLE_EQ(r.waterlevel, 2.0);
  EXPECT_DOUBLE_EQ(r.fractional[0].mass, 0.5);
  EXPECT_DOUBLE_EQ(r.fractional[1].mass, 0.5);
  EXPECT_EQ(r.fractional[2].mass, 0.0);
  for (const auto& m : r.fractional) EXPECT_EQ(m.mass, 0.5 * std::max(m.height - r.waterlevel, 0.0));
}

TEST(SsbpDecide, PointMassAndNoMass) {
  auto t = split_net();
  auto p = PolicyParams::make(t, PolicyKind::ssbp);
  auto d = zero_duals(t);
  for (double u : {0.0, 0.3, 0.999}) EXPECT_FALSE(ssbp_decide(t, p, d, 1, u).action);
  // Only (k2, j3) has positive height, 2, so r = 1 there.
  d.gamma(1, 2) = 2;
  d.gamma(2, 2) = 2;
  auto r = ssbp_fractional(t, p, d, 1);
  EXPECT_DOUBLE_EQ(r.total_mass(), 1.0);
  for (double u : {0.0, 0.5, 0.999999}) EXPECT_EQ(ssbp_decide(t, p, d, 1, u).action, (Action{2, 3}));
}

TEST(SsbpDecide, ResidualMassMeansNoTransmission) {
  auto t = split_net();
  auto p = PolicyParams::make(t, PolicyKind::ssbp);
  auto d = zero_duals(t);
  d.gamma(1, 1) = 1;
  d.gamma(3, 1) = 1;  // only (k1, j2) positive with height 1: r = 0.5
  EXPECT_EQ(ssbp_decide(t, p, d, 1, 0.49).action, (Action{1, 2}));
  EXPECT_FALSE(ssbp_decide(t, p, d, 1, 0.5).action);
}

TEST(SsbpDecide, EqualSplitFrequencies) {
  // Node 1 with four neighbors of equal height 4: r = 0.25 each.
  Topology star(5, {{1, 2}, {1, 3}, {1, 4}, {1, 5}}, {CommoditySpec{0, 2, {{1, {0.3, 1}}}}});
  auto p = PolicyParams::make(star, PolicyKind::ssbp);
  auto d = zero_duals(star);
  d.gamma(1, 1) = 4;
  RandomStream s(99, "route/1");
  constexpr int n = 100000;
  std::map<NodeId, int> counts;
  for (int draw = 0; draw < n; ++draw) {
    auto r = ssbp_decide(star, p, d, 1, s, static_cast<std::uint64_t>(draw));
    ASSERT_TRUE(r.action);
    ++counts[r.action->neighbor];
  }
  const double sigma = std::sqrt(0.25 * 0.75 / n);
  for (NodeId j = 2; j <= 5; ++j) EXPECT_NEAR(counts[j] / double(n), 0.25, 3 * sigma) << j;
}

TEST(SsbpDecide, DrawsAreUnbiased) {
  auto t = default14();
  auto p = PolicyParams::make(t, PolicyKind::ssbp_eh);
  auto d = zero_duals(t);
  d.gamma(5, 1) = 4;
  d.gamma(2, 1) = 1.5;
  d.gamma(3, 1) = 3;
  d.gamma(5, 2) = 2.5;
  d.beta[5] = 0.5;
  auto frac = ssbp_fractional(t, p, d, 5);
  std::vector<double> probs;
  std::vector<Action> cats;
  for (const auto& m : frac.fractional)
    if (m.mass > 0) {
      probs.push_back(m.mass);
      cats.push_back(m.action);
    }
  ASSERT_GE(cats.size(), 2u);
  const double residual = 1.0 - frac.total_mass();
  if (residual > 1e-12) probs.push_back(residual);

  RandomStream s(5, "unbiased");
  constexpr int n = 100000;
  std::vector<double> observed(probs.size(), 0.0);
  for (int draw = 0; draw < n; ++draw) {
    auto r = ssbp_decide(t, p, d, 5, s, static_cast<std::uint64_t>(draw));
    if (!r.action) {
      ++observed.back();
      continue;
    }
    auto it = std::find(cats.begin(), cats.end(), *r.action);
    ASSERT_NE(it, cats.end());
    ++observed[static_cast<std::size_t>(it - cats.begin())];
  }
  const double stat = oracle::chi_square(observed, probs, n);
  EXPECT_LT(stat, oracle::chi_square_critical(static_cast<double>(probs.size() - 1), 0.01));
}

TEST(Auxiliary, ThresholdRule) {
  auto t = default14();
  auto p = PolicyParams::make(t, PolicyKind::ssbp_eh);
  auto d = zero_duals(t);
  ASSERT_EQ(p.x_bar(3, 1), 14.0);
  d.gamma(3, 1) = 9;
  EXPECT_EQ(auxiliary(p, d, 3, 1), 0.0);
  d.gamma(3, 1) = 10;
  EXPECT_EQ(auxiliary(p, d, 3, 1), 0.0);
  d.gamma(3, 1) = 11;
  EXPECT_EQ(auxiliary(p, d, 3, 1), 14.0);
}

TEST(DualUpdates, GammaExamples) {
  EXPECT_EQ(update_gamma(5, 1, 0, 1, 1), 6.0);
  EXPECT_EQ(update_gamma(0, 0, 0, 0, 1), 0.0);
  // gamma 11 above the threshold 10: the auxiliary step pushes it back.
  auto t = default14();
  auto p = PolicyParams::make(t, PolicyKind::ssbp_eh);
  auto d = zero_duals(t);
  d.gamma(3, 1) = 11;
  const double x = auxiliary(p, d, 3, 1);
  EXPECT_EQ(update_gamma(t, d, 3, 1, 1, x, 0, 0), 0.0);
  d.gamma(1, 1) = 0;
  EXPECT_EQ(update_gamma(t, d, 1, 1, 0, 0, 1, 0), 0.0);  // destination stays pinned
}

TEST(DualUpdates, BetaExamples) {
  EXPECT_EQ(update_beta(5, 1, 1), 5.0);
  EXPECT_EQ(update_beta(0, 2, 0), 0.0);
  EXPECT_EQ(update_beta(15, 0, 0), 15.0);
}

TEST(DualUpdates, Initialization) {
  auto t = default14();
  NodeMap<double> bmax(14, 15.0), b0(14, 15.0);
  b0[2] = 0.0;
  b0[3] = 6.5;
  auto d = init_duals(t, b0, bmax);
  EXPECT_EQ(d.beta[1], 0.0);
  EXPECT_EQ(d.beta[2], 15.0);
  EXPECT_EQ(d.beta[3], 8.5);
  for (double g : d.gamma.values()) EXPECT_EQ(g, 0.0);
  b0[4] = 16.0;
  EXPECT_THROW(init_duals(t, b0, bmax), ConfigError);
}

TEST(PolicyParams, DefaultsAndNames) {
  auto t = default14();
  auto p = PolicyParams::make(t, PolicyKind::sbp_eh, 10.0, 0.0);
  for (NodeId i = 1; i <= 14; ++i)
    for (CommodityId k = 1; k <= 2; ++k) EXPECT_EQ(p.x_bar(i, k), 10.0 + t.source(i, k).bound + double(t.degree(i)));
  EXPECT_THROW(PolicyParams::make(t, PolicyKind::sbp_eh, 0.0), ConfigError);
  for (auto k : {PolicyKind::sbp, PolicyKind::ssbp, PolicyKind::sbp_eh, PolicyKind::ssbp_eh})
    EXPECT_EQ(parse_policy_kind(to_string(k)), k);
  EXPECT_TRUE(is_energy_aware(PolicyKind::ssbp_eh));
  EXPECT_FALSE(is_energy_aware(PolicyKind::ssbp));
  EXPECT_TRUE(is_soft(PolicyKind::ssbp));
  EXPECT_EQ(parse_dual_update_mode("fractional"), DualUpdateMode::fractional);
}
