#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "riskpool/model.hpp"
#include "riskpool/state_space.hpp"

namespace riskpool {

// log C(n, k) for 0 <= n <= n_max, filled once from lgamma.
class LogBinomialTable {
 public:
  explicit LogBinomialTable(int n_max) : n_max_(n_max), lf_(static_cast<std::size_t>(n_max) + 1) {
    for (int n = 0; n <= n_max; ++n) lf_[n] = std::lgamma(n + 1.0);
  }
  int n_max() const noexcept { return n_max_; }
  double operator()(int n, int k) const noexcept {
    if (k < 0 || k > n || n < 0) return -INFINITY;
    return lf_[n] - lf_[k] - lf_[n - k];
  }

 private:
  int n_max_;
  std::vector<double> lf_;
};

// Probability that the N-1 co-players of a focal `focal` individual comprise
// k S-players and l I-players, drawn without replacement from the Z-1 others.
inline double group_weight(Strategy focal, int iS, int iI, int k, int l, int Z, int N,
                           const LogBinomialTable& lc) {
  if (k < 0 || l < 0 || k + l > N - 1) return 0.0;
  int others_S = iS, others_I = iI, others_A = Z - iS - iI;
  switch (focal) {
    case Strategy::S: --others_S; break;
    case Strategy::I: --others_I; break;
    case Strategy::A: --others_A; break;
  }
  if (others_S < 0 || others_I < 0 || others_A < 0)
    throw std::invalid_argument("group_weight: focal strategy has no members in this state");
  const int rest = N - 1 - k - l;
  if (k > others_S || l > others_I || rest > others_A) return 0.0;
  return std::exp(lc(others_S, k) + lc(others_I, l) + lc(others_A, rest) - lc(Z - 1, N - 1));
}

inline double group_weight(Strategy focal, int iS, int iI, int k, int l, int Z, int N) {
  return group_weight(focal, iS, iI, k, l, Z, N, LogBinomialTable(Z));
}

// Fitness of each strategy at one state; NaN where the strategy has no members.
struct StateFitness {
  double fS = NAN;
  double fI = NAN;
  double fA = NAN;

  double operator[](Strategy s) const noexcept {
    switch (s) {
      case Strategy::S: return fS;
      case Strategy::I: return fI;
      case Strategy::A: return fA;
    }
    return NAN;
  }
};

inline StateFitness fitness_at(int iS, int iI, const ModelParams& m, const PayoffTables& tables,
                               const LogBinomialTable& lc) {
  const int Z = m.Z, N = m.N;
  if (!PopulationState{iS, iI}.valid(Z)) throw std::out_of_range("fitness_at: invalid state");
  StateFitness f;
  f.fA = tables.loner;
  const int iA = Z - iS - iI;
  if (iS >= 1 && m.strategies.contains(Strategy::S)) {
    double sum = 0.0;
    for (int k = 0; k <= std::min(N - 1, iS - 1); ++k)
      for (int l = 0; l <= std::min(N - 1 - k, iI); ++l) {
        if (N - 1 - k - l > iA) continue;
        sum += group_weight(Strategy::S, iS, iI, k, l, Z, N, lc) * tables.pool[k + 1];
      }
    f.fS = sum;
  }
  if (iI >= 1 && m.strategies.contains(Strategy::I)) {
    double sum = 0.0;
    for (int k = 0; k <= std::min(N - 1, iS); ++k)
      for (int l = 0; l <= std::min(N - 1 - k, iI - 1); ++l) {
        if (N - 1 - k - l > iA) continue;
        sum += group_weight(Strategy::I, iS, iI, k, l, Z, N, lc) * tables.index[l + 1];
      }
    f.fI = sum;
  }
  return f;
}

inline StateFitness fitness_at(int iS, int iI, const ModelParams& m, const PayoffTables& tables) {
  return fitness_at(iS, iI, m, tables, LogBinomialTable(m.Z));
}

// Fitness for every state of a StateSpace; immutable once built.
class FitnessTable {
 public:
  FitnessTable() = default;

  FitnessTable(const ModelParams& m, const StateSpace& space)
      : FitnessTable(m, space, make_payoff_tables(m)) {}

  FitnessTable(const ModelParams& m, const StateSpace& space, PayoffTables tables)
      : tables_(std::move(tables)), values_(space.size()) {
    LogBinomialTable lc(m.Z);
    for (std::size_t i = 0; i < space.size(); ++i) {
      const auto& s = space[i];
      values_[i] = fitness_at(s.iS, s.iI, m, tables_, lc);
    }
  }

  // Table with externally supplied per-state values (tests, custom payoffs).
  static FitnessTable from_values(std::vector<StateFitness> values, PayoffTables tables = {}) {
    FitnessTable t;
    t.values_ = std::move(values);
    t.tables_ = std::move(tables);
    return t;
  }

  const StateFitness& operator[](std::size_t state) const { return values_.at(state); }
  std::size_t size() const noexcept { return values_.size(); }
  const PayoffTables& payoffs() const noexcept { return tables_; }

 private:
  PayoffTables tables_;
  std::vector<StateFitness> values_;
};

}  // namespace riskpool
