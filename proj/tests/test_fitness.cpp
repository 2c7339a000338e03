#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "riskpool/fitness.hpp"

using namespace riskpool;

namespace {

// Univariate hypergeometric mass via exact products; independent of the log-gamma path.
double hypergeom(int successes, int population, int draws, int k) {
  if (k < 0 || k > successes || draws - k > population - successes || draws - k < 0) return 0.0;
  auto choose = [](int n, int r) {
    double v = 1.0;
    for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
    return v;
  };
  return choose(successes, k) * choose(population - successes, draws - k) / choose(population, draws);
}

}  // namespace

TEST(GroupWeight, HomogeneousUrn) {
  EXPECT_NEAR(group_weight(Strategy::S, 50, 0, 39, 0, 50, 40), 1.0, 1e-12);
  EXPECT_EQ(group_weight(Strategy::S, 50, 0, 38, 1, 50, 40), 0.0);
}

TEST(GroupWeight, SmallUrnByEnumeration) {
  // Others of a focal S at (2,1) in Z=4: {S, I, A}, one drawn.
  EXPECT_NEAR(group_weight(Strategy::S, 2, 1, 1, 0, 4, 2), 1.0 / 3, 1e-14);
  EXPECT_NEAR(group_weight(Strategy::S, 2, 1, 0, 1, 4, 2), 1.0 / 3, 1e-14);
  EXPECT_NEAR(group_weight(Strategy::S, 2, 1, 0, 0, 4, 2), 1.0 / 3, 1e-14);
}

TEST(GroupWeight, NormalizesOverAllCompositions) {
  const int Z = 50, N = 40;
  LogBinomialTable lc(Z);
  for (int iS = 0; iS <= Z; iS += 3)
    for (int iI = 0; iS + iI <= Z; iI += 4)
      for (Strategy focal : kAllStrategies) {
        PopulationState s{iS, iI};
        if (s.count(focal, Z) == 0) continue;
        double sum = 0.0;
        for (int k = 0; k < N; ++k)
          for (int l = 0; k + l < N; ++l) sum += group_weight(focal, iS, iI, k, l, Z, N, lc);
        EXPECT_NEAR(sum, 1.0, 1e-12) << iS << "," << iI;
      }
}

TEST(GroupWeight, FocalWithoutMembersIsContractViolation) {
  EXPECT_THROW(group_weight(Strategy::S, 0, 3, 0, 1, 10, 3), std::invalid_argument);
}

TEST(Fitness, AllPoolState) {
  ModelParams m;
  auto t = make_payoff_tables(m);
  auto f = fitness_at(m.Z, 0, m, t);
  EXPECT_NEAR(f.fS, t.pool[m.N], 1e-12);
  EXPECT_TRUE(std::isnan(f.fI));
}

TEST(Fitness, AllInsuredState) {
  ModelParams m;
  auto t = make_payoff_tables(m);
  auto f = fitness_at(0, m.Z, m, t);
  EXPECT_NEAR(f.fI, t.index[m.N], 1e-12);
  EXPECT_TRUE(std::isnan(f.fS));
  EXPECT_EQ(f.fA, t.loner);
}

TEST(Fitness, SmallPopulationByEnumeration) {
  ModelParams m;
  m.r = 0.03;
  m.Z = 4;
  m.N = 2;
  auto t = make_payoff_tables(m);
  auto f = fitness_at(2, 1, m, t);
  // from tests/oracles/payoff_oracle.py
  EXPECT_NEAR(f.fS, 4.7355454728190032752, 1e-12);
  EXPECT_NEAR(f.fI, 4.7678611921141260038, 1e-12);
}

TEST(Fitness, MarginalHypergeometricAgrees) {
  // fS only depends on the number of S co-players, whose law is univariate hypergeometric.
  ModelParams m;
  m.Z = 30;
  m.N = 12;
  auto t = make_payoff_tables(m);
  LogBinomialTable lc(m.Z);
  for (int iS = 1; iS <= m.Z; iS += 2)
    for (int iI = 0; iS + iI <= m.Z; iI += 3) {
      double fs = 0.0;
      for (int k = 0; k < m.N; ++k) fs += hypergeom(iS - 1, m.Z - 1, m.N - 1, k) * t.pool[k + 1];
      EXPECT_NEAR(fitness_at(iS, iI, m, t, lc).fS, fs, 1e-12);
      if (iI >= 1) {
        double fi = 0.0;
        for (int l = 0; l < m.N; ++l) fi += hypergeom(iI - 1, m.Z - 1, m.N - 1, l) * t.index[l + 1];
        EXPECT_NEAR(fitness_at(iS, iI, m, t, lc).fI, fi, 1e-12);
      }
    }
}

TEST(Fitness, NoContributionPoolIsSelfInsurance) {
  ModelParams m;
  m.delta1 = 0.0;
  StateSpace space(m.Z, m.strategies);
  FitnessTable table(m, space);
  for (std::size_t i = 0; i < space.size(); ++i)
    if (space[i].iS >= 1) {
      EXPECT_NEAR(table[i].fS, table.payoffs().loner, 1e-12);
    }
}

TEST(Fitness, WholePopulationGroups) {
  // N == Z: every co-player is in the group.
  ModelParams m;
  m.Z = 10;
  m.N = 10;
  auto t = make_payoff_tables(m);
  auto f = fitness_at(4, 3, m, t);
  EXPECT_NEAR(f.fS, t.pool[4], 1e-12);
  EXPECT_NEAR(f.fI, t.index[3], 1e-12);
}

TEST(Fitness, TableEntriesFinite) {
  ModelParams m;
  StateSpace space(m.Z, m.strategies);
  FitnessTable table(m, space);
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto s = space[i];
    EXPECT_EQ(std::isfinite(table[i].fS), s.iS >= 1);
    EXPECT_EQ(std::isfinite(table[i].fI), s.iI >= 1);
    EXPECT_EQ(table[i].fA, table.payoffs().loner);
  }
}
