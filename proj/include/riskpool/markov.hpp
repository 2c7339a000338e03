#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "riskpool/fitness.hpp"
#include "riskpool/model.hpp"
#include "riskpool/state_space.hpp"

namespace riskpool {

// Probability that an X-player imitates a Y-player: 1 / (1 + exp(beta (fX - fY))).
inline double fermi(double f_from, double f_to, double beta) {
  if (beta == 0.0) return 0.5;
  const double x = beta * (f_from - f_to);
  if (x > 0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

// One-step probability that a single individual switches from X to Y.
// Fitness of X (or Y) is never read when its count is zero.
inline double transition_prob(PopulationState s, Strategy from, Strategy to, const ModelParams& m,
                              const StateFitness& f) {
  if (from == to) throw std::invalid_argument("transition_prob: X and Y must differ");
  if (!m.strategies.contains(from) || !m.strategies.contains(to))
    throw std::invalid_argument("transition_prob: strategy not in the active set");
  const int Z = m.Z;
  const int n_from = s.count(from, Z);
  if (n_from == 0) return 0.0;
  const int n_to = s.count(to, Z);
  const int d = m.strategies.size();
  double imitation = 0.0;
  if (n_to > 0) {
    imitation = (double(n_from) / Z) * (double(n_to) / (Z - 1)) * fermi(f[from], f[to], m.beta);
  }
  return (1.0 - m.mu) * imitation + m.mu * n_from / (double(d - 1) * Z);
}

// The six ordered switches, in the order used by TransitionModel::moves.
inline constexpr std::array<std::pair<Strategy, Strategy>, 6> kMoves{{
    {Strategy::S, Strategy::I},
    {Strategy::S, Strategy::A},
    {Strategy::I, Strategy::S},
    {Strategy::I, Strategy::A},
    {Strategy::A, Strategy::S},
    {Strategy::A, Strategy::I},
}};

enum MoveIndex : std::size_t { kSI = 0, kSA, kIS, kIA, kAS, kAI };

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct TransitionModel {
  StateSpace space;
  ModelParams params;
  std::vector<std::array<double, 6>> moves;  // T_{X->Y} per state, order of kMoves
  SparseRowMatrix kernel;                    // row-stochastic
};

inline TransitionModel build_kernel(const ModelParams& m, const StateSpace& space, const FitnessTable& fitness) {
  if (fitness.size() != space.size()) throw std::invalid_argument("build_kernel: fitness table does not match state space");
  if (space.Z() != m.Z || !(space.strategies() == m.strategies))
    throw std::invalid_argument("build_kernel: state space does not match parameters");
  TransitionModel tm{space, m, std::vector<std::array<double, 6>>(space.size()), SparseRowMatrix()};
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(space.size() * 7);
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto s = space[i];
    double outflow = 0.0;
    for (std::size_t mv = 0; mv < kMoves.size(); ++mv) {
      auto [from, to] = kMoves[mv];
      if (!m.strategies.contains(from) || !m.strategies.contains(to)) continue;
      const double t = transition_prob(s, from, to, m, fitness[i]);
      tm.moves[i][mv] = t;
      if (t == 0.0) continue;
      outflow += t;
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(space.index(moved(s, from, to))), t);
    }
    const double stay = 1.0 - outflow;
    if (stay < -1e-12)
      throw SolverError("build_kernel: negative self-loop mass " + std::to_string(stay) + " at state (" +
                        std::to_string(s.iS) + ", " + std::to_string(s.iI) + ")");
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), std::max(stay, 0.0));
  }
  const auto n = static_cast<Eigen::Index>(space.size());
  tm.kernel.resize(n, n);
  tm.kernel.setFromTriplets(triplets.begin(), triplets.end());
  tm.kernel.makeCompressed();
  return tm;
}

// Validates the parameters, fills the fitness table and assembles the chain.
inline TransitionModel build_model(const ModelParams& m) {
  validate(m);
  StateSpace space(m.Z, m.strategies);
  FitnessTable fitness(m, space);
  return build_kernel(m, space, fitness);
}

// x T for a row vector x.
inline std::vector<double> left_multiply(std::span<const double> x, const SparseRowMatrix& T) {
  std::vector<double> y(x.size(), 0.0);
  for (Eigen::Index r = 0; r < T.outerSize(); ++r) {
    const double xr = x[static_cast<std::size_t>(r)];
    if (xr == 0.0) continue;
    for (SparseRowMatrix::InnerIterator it(T, r); it; ++it) y[static_cast<std::size_t>(it.col())] += xr * it.value();
  }
  return y;
}

// || x T - x ||_inf
inline double stationary_residual(std::span<const double> x, const SparseRowMatrix& T) {
  auto y = left_multiply(x, T);
  double r = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) r = std::max(r, std::abs(y[i] - x[i]));
  return r;
}

struct StationaryOptions {
  double tolerance = 1e-12;          // power-iteration L_inf update threshold
  double residual_target = 1e-10;    // accept the direct solve below this residual
  long max_power_iterations = 20'000'000;
  bool allow_reducible = false;      // accept mu == 0 (absorbing-chain semantics)
  bool force_power_iteration = false;
};

struct StationaryResult {
  std::vector<double> probs;
  std::array<double, 3> adoption{};  // (S, I, A)
  double residual = 0.0;
  std::string method;                // "direct" or "power"
  long iterations = 0;
};

// Expected strategy frequencies under a distribution over `space`.
inline std::array<double, 3> adoption_rates(std::span<const double> probs, const StateSpace& space) {
  if (probs.size() != space.size()) throw std::invalid_argument("adoption_rates: size mismatch");
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  const int Z = space.Z();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const auto& s = space[i];
    acc[0] += probs[i] * s.iS;
    acc[1] += probs[i] * s.iI;
    acc[2] += probs[i] * s.iA(Z);
  }
  for (auto& a : acc) a /= Z;
  return acc;
}

// Iterates x <- x T until the L_inf update drops below `tolerance`.
inline std::vector<double> power_iteration(const SparseRowMatrix& T, std::vector<double> x, double tolerance,
                                           long max_iterations, long* iterations = nullptr) {
  long it = 0;
  for (; it < max_iterations; ++it) {
    auto y = left_multiply(x, T);
    double sum = 0.0;
    for (double v : y) sum += v;
    double delta = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] /= sum;
      delta = std::max(delta, std::abs(y[i] - x[i]));
    }
    x = std::move(y);
    if (delta < tolerance) {
      ++it;
      break;
    }
  }
  if (iterations) *iterations = it;
  if (it >= max_iterations) throw SolverError("power iteration did not converge");
  return x;
}

namespace detail {

// Direct solve of (T^T - I) x = 0 with the first equation replaced by sum(x) = 1.
inline bool direct_stationary(const SparseRowMatrix& T, std::vector<double>& out) {
  const Eigen::Index n = T.rows();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(T.nonZeros() + 2 * n));
  for (Eigen::Index r = 0; r < T.outerSize(); ++r) {
    for (SparseRowMatrix::InnerIterator it(T, r); it; ++it) {
      // entry (row r, col c) of T becomes (c, r) of T^T
      if (it.col() == 0) continue;
      trip.emplace_back(it.col(), r, it.value());
    }
  }
  for (Eigen::Index i = 1; i < n; ++i) trip.emplace_back(i, i, -1.0);
  for (Eigen::Index j = 0; j < n; ++j) trip.emplace_back(0, j, 1.0);
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) return false;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(0) = 1.0;
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) return false;
  out.assign(x.data(), x.data() + n);
  return true;
}

// Clears round-off negatives and renormalizes; false if anything is genuinely negative.
inline bool clean_distribution(std::vector<double>& x) {
  double sum = 0.0;
  for (double& v : x) {
    if (v < 0) {
      if (v < -1e-12) return false;
      v = 0.0;
    }
    sum += v;
  }
  if (!(sum > 0)) return false;
  for (double& v : x) v /= sum;
  return true;
}

}  // namespace detail

inline StationaryResult stationary(const TransitionModel& model, const StationaryOptions& opt = {}) {
  if (model.params.mu == 0.0 && !opt.allow_reducible)
    throw SolverError("mu = 0: chain may be reducible; pass allow_reducible to accept absorbing-chain semantics");
  StationaryResult res;
  const std::size_t n = model.space.size();
  bool ok = false;
  if (!opt.force_power_iteration && model.params.mu > 0.0) {
    ok = detail::direct_stationary(model.kernel, res.probs) && detail::clean_distribution(res.probs);
    if (ok) {
      res.residual = stationary_residual(res.probs, model.kernel);
      ok = res.residual < opt.residual_target;
      res.method = "direct";
    }
  }
  if (!ok) {
    std::vector<double> start(n, 1.0 / double(n));
    if (!res.probs.empty() && detail::clean_distribution(res.probs)) start = res.probs;
    res.probs = power_iteration(model.kernel, std::move(start), opt.tolerance, opt.max_power_iterations,
                                &res.iterations);
    detail::clean_distribution(res.probs);
    res.residual = stationary_residual(res.probs, model.kernel);
    res.method = "power";
  }
  res.adoption = adoption_rates(res.probs, model.space);
  return res;
}

// Per-state (g_I, g_S): net one-step flow towards I and towards S.
struct GradientVector {
  double g_I = 0.0;
  double g_S = 0.0;
};

using GradientField = std::vector<GradientVector>;

inline GradientField gradient_field(const TransitionModel& model) {
  GradientField field(model.space.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const auto& t = model.moves[i];
    field[i].g_I = t[kSI] + t[kAI] - t[kIS] - t[kIA];
    field[i].g_S = t[kIS] + t[kAS] - t[kSI] - t[kSA];
  }
  return field;
}

inline double insurer_profit(double adoption_I, const ModelParams& m) {
  return adoption_I * m.Z * (m.c - m.alpha * m.w * m.q);
}

// States whose probability exceeds `min_mass` and every neighbour reachable by one switch.
inline std::vector<PopulationState> local_maxima(std::span<const double> probs, const StateSpace& space,
                                                 double min_mass = 0.0) {
  static constexpr int kNeighbour[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};
  std::vector<PopulationState> out;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!(probs[i] > min_mass)) continue;
    const auto s = space[i];
    bool peak = true;
    for (const auto& d : kNeighbour) {
      PopulationState nb{s.iS + d[0], s.iI + d[1]};
      if (space.contains(nb) && probs[space.index(nb)] >= probs[i]) {
        peak = false;
        break;
      }
    }
    if (peak) out.push_back(s);
  }
  return out;
}

}  // namespace riskpool
