#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskpool/model.hpp"

namespace riskpool {

// (iS, iI); the A count is Z - iS - iI.
struct PopulationState {
  int iS = 0;
  int iI = 0;

  int iA(int Z) const noexcept { return Z - iS - iI; }
  int count(Strategy s, int Z) const noexcept {
    switch (s) {
      case Strategy::S: return iS;
      case Strategy::I: return iI;
      case Strategy::A: return iA(Z);
    }
    return 0;
  }
  bool valid(int Z) const noexcept { return iS >= 0 && iI >= 0 && iS + iI <= Z; }

  bool operator==(const PopulationState&) const = default;
};

// State obtained by moving one individual from strategy `from` to `to`.
inline PopulationState moved(PopulationState s, Strategy from, Strategy to) {
  auto bump = [&](Strategy x, int d) {
    if (x == Strategy::S) s.iS += d;
    else if (x == Strategy::I) s.iI += d;
  };
  bump(from, -1);
  bump(to, +1);
  return s;
}

inline constexpr std::size_t simplex_size(int Z) {
  return static_cast<std::size_t>(Z + 1) * static_cast<std::size_t>(Z + 2) / 2;
}

// Rows ordered by iS, then iI.
inline std::size_t state_index(int iS, int iI, int Z) {
  if (Z < 0 || !PopulationState{iS, iI}.valid(Z))
    throw std::out_of_range("state (" + std::to_string(iS) + ", " + std::to_string(iI) +
                            ") is not on the simplex for Z = " + std::to_string(Z));
  const std::size_t s = static_cast<std::size_t>(iS);
  return s * static_cast<std::size_t>(Z + 1) - s * (s - (s > 0 ? 1 : 0)) / 2 + static_cast<std::size_t>(iI);
}

inline PopulationState state_at(std::size_t index, int Z) {
  if (index >= simplex_size(Z)) throw std::out_of_range("state index out of range");
  int iS = 0;
  std::size_t row = static_cast<std::size_t>(Z + 1);
  while (index >= row) {
    index -= row;
    --row;
    ++iS;
  }
  return {iS, static_cast<int>(index)};
}

// Enumeration of every reachable state for the active strategy set:
// the full simplex for three strategies, one edge for two.
class StateSpace {
 public:
  StateSpace(int Z, StrategySet strategies) : Z_(Z), strategies_(strategies) {
    if (Z < 1) throw std::invalid_argument("StateSpace: Z must be >= 1");
    if (strategies.size() < 2) throw std::invalid_argument("StateSpace: need at least two strategies");
    lookup_.assign(static_cast<std::size_t>(Z + 1) * (Z + 1), -1);
    for (int iS = 0; iS <= Z; ++iS)
      for (int iI = 0; iS + iI <= Z; ++iI) {
        PopulationState st{iS, iI};
        if (!admissible(st)) continue;
        lookup_[slot(iS, iI)] = static_cast<long>(states_.size());
        states_.push_back(st);
      }
  }

  int Z() const noexcept { return Z_; }
  StrategySet strategies() const noexcept { return strategies_; }
  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<PopulationState>& states() const noexcept { return states_; }
  const PopulationState& operator[](std::size_t i) const { return states_.at(i); }

  bool contains(PopulationState s) const noexcept {
    return s.valid(Z_) && lookup_[slot(s.iS, s.iI)] >= 0;
  }

  std::size_t index(PopulationState s) const {
    if (!contains(s))
      throw std::out_of_range("state (" + std::to_string(s.iS) + ", " + std::to_string(s.iI) +
                              ") not in state space");
    return static_cast<std::size_t>(lookup_[slot(s.iS, s.iI)]);
  }

 private:
  bool admissible(PopulationState s) const noexcept {
    for (Strategy x : kAllStrategies)
      if (!strategies_.contains(x) && s.count(x, Z_) != 0) return false;
    return true;
  }
  std::size_t slot(int iS, int iI) const noexcept {
    return static_cast<std::size_t>(iS) * (Z_ + 1) + static_cast<std::size_t>(iI);
  }

  int Z_;
  StrategySet strategies_;
  std::vector<PopulationState> states_;
  std::vector<long> lookup_;
};

}  // namespace riskpool
