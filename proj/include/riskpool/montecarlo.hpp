#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "riskpool/fitness.hpp"
#include "riskpool/markov.hpp"
#include "riskpool/model.hpp"
#include "riskpool/state_space.hpp"

namespace riskpool {

struct SimConfig {
  long steps = 2'100'000;  // total elementary updates, burn-in included
  long burnin = 100'000;
  long thinning = 1;
  std::uint64_t seed = 1;
  PopulationState initial{};
};

inline void check(const SimConfig& cfg, int Z) {
  if (cfg.burnin < 0) throw std::invalid_argument("SimConfig: burnin must be >= 0");
  if (cfg.steps <= cfg.burnin) throw std::invalid_argument("SimConfig: steps must exceed burnin");
  if (cfg.thinning < 1) throw std::invalid_argument("SimConfig: thinning must be >= 1");
  if (!cfg.initial.valid(Z)) throw std::invalid_argument("SimConfig: initial state not valid for Z");
}

struct SimResult {
  std::vector<double> frequencies;  // over StateSpace order
  std::array<double, 3> adoption{};
  long samples = 0;
  PopulationState final_state{};
};

// Agent-based realization of the imitation/mutation process.
// RNG: std::mt19937_64 seeded with SimConfig::seed.
class Simulator {
 public:
  Simulator(const ModelParams& m, const StateSpace& space, const FitnessTable& fitness)
      : m_(m), space_(space), fitness_(fitness), active_(m.strategies.members()) {
    if (fitness.size() != space.size()) throw std::invalid_argument("Simulator: fitness table does not match state space");
  }

  // One elementary update from `s`.
  template <class Rng>
  PopulationState step(PopulationState s, Rng& rng) const {
    const int Z = m_.Z;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick_individual(0, Z - 1);
    if (unit(rng) < m_.mu) {
      const Strategy from = strategy_of(s, pick_individual(rng));
      std::uniform_int_distribution<int> pick_other(0, static_cast<int>(active_.size()) - 2);
      int j = pick_other(rng);
      Strategy to = active_[static_cast<std::size_t>(j)];
      if (to == from) to = active_.back();
      return moved(s, from, to);
    }
    if (Z < 2) return s;
    const int a = pick_individual(rng);
    std::uniform_int_distribution<int> pick_rest(0, Z - 2);
    int b = pick_rest(rng);
    if (b >= a) ++b;
    const Strategy from = strategy_of(s, a);
    const Strategy to = strategy_of(s, b);
    if (from == to) return s;
    const auto& f = fitness_[space_.index(s)];
    if (unit(rng) < fermi(f[from], f[to], m_.beta)) return moved(s, from, to);
    return s;
  }

  SimResult run(const SimConfig& cfg) const {
    check(cfg, m_.Z);
    if (!space_.contains(cfg.initial)) throw std::invalid_argument("SimConfig: initial state uses an inactive strategy");
    std::mt19937_64 rng(cfg.seed);
    SimResult res;
    std::vector<long> visits(space_.size(), 0);
    PopulationState s = cfg.initial;
    for (long t = 0; t < cfg.steps; ++t) {
      s = step(s, rng);
      if (t >= cfg.burnin && (t - cfg.burnin) % cfg.thinning == 0) {
        ++visits[space_.index(s)];
        ++res.samples;
      }
    }
    res.frequencies.resize(visits.size());
    for (std::size_t i = 0; i < visits.size(); ++i) res.frequencies[i] = double(visits[i]) / double(res.samples);
    res.adoption = adoption_rates(res.frequencies, space_);
    res.final_state = s;
    return res;
  }

 private:
  // Individuals are laid out S first, then I, then A.
  Strategy strategy_of(PopulationState s, int individual) const noexcept {
    if (individual < s.iS) return Strategy::S;
    if (individual < s.iS + s.iI) return Strategy::I;
    return Strategy::A;
  }

  ModelParams m_;
  const StateSpace& space_;
  const FitnessTable& fitness_;
  std::vector<Strategy> active_;
};

inline SimResult simulate(const ModelParams& m, const SimConfig& cfg) {
  validate(m);
  StateSpace space(m.Z, m.strategies);
  FitnessTable fitness(m, space);
  return Simulator(m, space, fitness).run(cfg);
}

inline double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

}  // namespace riskpool
