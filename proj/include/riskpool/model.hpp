#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace riskpool {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

// Raised when a utility is evaluated at a non-positive wealth.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised by validate(); carries every violated constraint.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(std::vector<std::string> violations)
      : std::invalid_argument(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid parameters: ";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += "; ";
      out += v[i];
    }
    return out;
  }
  std::vector<std::string> violations_;
};

// Raised when a numerical routine cannot produce a trustworthy answer.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

// Serialization order is always (S, I, A).
enum class Strategy : int { S = 0, I = 1, A = 2 };

inline constexpr std::array<Strategy, 3> kAllStrategies{Strategy::S, Strategy::I, Strategy::A};

constexpr std::size_t index_of(Strategy s) noexcept { return static_cast<std::size_t>(s); }

constexpr char label(Strategy s) noexcept {
  switch (s) {
    case Strategy::S: return 'S';
    case Strategy::I: return 'I';
    case Strategy::A: return 'A';
  }
  return '?';
}

inline Strategy strategy_from_label(char c) {
  switch (c) {
    case 'S': case 's': return Strategy::S;
    case 'I': case 'i': return Strategy::I;
    case 'A': case 'a': return Strategy::A;
  }
  throw std::invalid_argument(std::string("unknown strategy label '") + c + "'");
}

// Active subset of {S, I, A}.
class StrategySet {
 public:
  constexpr StrategySet() = default;  // all three
  constexpr StrategySet(bool s, bool i, bool a) : active_{s, i, a} {}

  static StrategySet parse(std::string_view text) {
    StrategySet set(false, false, false);
    for (char c : text) {
      if (c == ' ' || c == ',') continue;
      Strategy s = strategy_from_label(c);
      if (set.contains(s)) throw std::invalid_argument("duplicate strategy in set '" + std::string(text) + "'");
      set.active_[index_of(s)] = true;
    }
    return set;
  }

  constexpr bool contains(Strategy s) const noexcept { return active_[index_of(s)]; }

  constexpr int size() const noexcept {
    return int(active_[0]) + int(active_[1]) + int(active_[2]);
  }

  std::vector<Strategy> members() const {
    std::vector<Strategy> out;
    for (Strategy s : kAllStrategies)
      if (contains(s)) out.push_back(s);
    return out;
  }

  std::string to_string() const {
    std::string out;
    for (Strategy s : members()) out += label(s);
    return out;
  }

  constexpr bool operator==(const StrategySet&) const = default;

 private:
  std::array<bool, 3> active_{true, true, true};
};

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

struct ModelParams {
  double w = 1.0;         // wealth
  double p = 0.2;         // disaster probability
  double q = 0.2;         // payout-trigger probability
  double r = 0.001;       // disaster without payout (basis risk)
  double alpha = 0.8;     // fraction of wealth lost in a disaster
  double gamma = 0.8;     // relative risk aversion
  double delta1 = 0.1;    // informal pool contribution fraction
  double delta2 = 0.05;   // index-insurance pool contribution fraction
  double c = 0.17;        // premium
  double beta = 10.0;     // selection intensity
  double mu = 0.02;       // mutation probability
  int Z = 50;             // population size
  int N = 40;             // group size
  StrategySet strategies{};

  bool operator==(const ModelParams&) const = default;
};

// Scalar fields addressable by name (sweep axes, command-line overrides).
inline constexpr std::array<std::string_view, 13> kParamNames{
    "w", "p", "q", "r", "alpha", "gamma", "delta1", "delta2", "c", "beta", "mu", "Z", "N"};

inline bool is_param_name(std::string_view name) {
  for (auto n : kParamNames)
    if (n == name) return true;
  return false;
}

inline double get_param(const ModelParams& m, std::string_view name) {
  if (name == "w") return m.w;
  if (name == "p") return m.p;
  if (name == "q") return m.q;
  if (name == "r") return m.r;
  if (name == "alpha") return m.alpha;
  if (name == "gamma") return m.gamma;
  if (name == "delta1") return m.delta1;
  if (name == "delta2") return m.delta2;
  if (name == "c") return m.c;
  if (name == "beta") return m.beta;
  if (name == "mu") return m.mu;
  if (name == "Z") return m.Z;
  if (name == "N") return m.N;
  throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
}

inline void set_param(ModelParams& m, std::string_view name, double value) {
  auto as_int = [&](int& field) {
    if (!std::isfinite(value) || std::nearbyint(value) != value || std::abs(value) > 1e9)
      throw std::invalid_argument("parameter '" + std::string(name) + "' must be an integer");
    field = static_cast<int>(value);
  };
  if (name == "w") m.w = value;
  else if (name == "p") m.p = value;
  else if (name == "q") m.q = value;
  else if (name == "r") m.r = value;
  else if (name == "alpha") m.alpha = value;
  else if (name == "gamma") m.gamma = value;
  else if (name == "delta1") m.delta1 = value;
  else if (name == "delta2") m.delta2 = value;
  else if (name == "c") m.c = value;
  else if (name == "beta") m.beta = value;
  else if (name == "mu") m.mu = value;
  else if (name == "Z") as_int(m.Z);
  else if (name == "N") as_int(m.N);
  else throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
}

// Collects every violated invariant; throws ParameterError if there is any.
inline const ModelParams& validate(const ModelParams& m) {
  std::vector<std::string> bad;
  auto need = [&](bool ok, const char* what) {
    if (!ok) bad.emplace_back(what);
  };
  const double all[] = {m.w, m.p, m.q, m.r, m.alpha, m.gamma, m.delta1, m.delta2, m.c, m.beta, m.mu};
  for (double v : all) {
    if (!std::isfinite(v)) {
      bad.emplace_back("all parameters must be finite");
      throw ParameterError(std::move(bad));
    }
  }
  need(m.w > 0, "w must be > 0");
  need(m.p >= 0 && m.p <= 1, "p must lie in [0, 1]");
  need(m.q >= 0 && m.q <= 1, "q must lie in [0, 1]");
  need(m.r >= 0, "r must be >= 0");
  need(m.r >= m.p - m.q, "r below max(0, p-q): (q+r-p) would be negative");
  need(m.r <= m.p, "r exceeds min(p, 1-q): (p-r) would be negative");
  need(m.r <= 1 - m.q, "r exceeds min(p, 1-q): (1-q-r) would be negative");
  need(m.alpha > 0 && m.alpha < 1, "alpha must lie in (0, 1)");
  need(m.gamma >= 0, "gamma must be >= 0");
  need(m.delta1 >= 0 && m.delta1 < 1, "delta1 must lie in [0, 1)");
  need(m.delta2 >= 0 && m.delta2 < 1, "delta2 must lie in [0, 1)");
  need(m.beta >= 0, "beta must be >= 0");
  need(m.mu >= 0 && m.mu <= 1, "mu must lie in [0, 1]");
  need(m.Z >= 2, "Z must be >= 2");
  need(m.N >= 2 && m.N <= m.Z, "N must satisfy 2 <= N <= Z");
  need(m.strategies.size() >= 2, "strategy set must contain 2 or 3 strategies");
  need(m.c >= 0, "premium c must be >= 0");
  need(m.w - m.delta1 * m.w > 0, "pool member wealth w - delta1*w must be > 0");
  need(m.w - m.c - m.delta2 * m.w > 0, "insured wealth w - c - delta2*w must be > 0");
  if (m.strategies.contains(Strategy::I))
    need((1 - m.alpha) * m.w - m.c > 0, "premium exceeds (1-alpha)*w: uncompensated-insured wealth <= 0");
  if (!bad.empty()) throw ParameterError(std::move(bad));
  return m;
}

// ---------------------------------------------------------------------------
// Combinatorics
// ---------------------------------------------------------------------------

inline double log_choose(int n, int k) {
  if (k < 0 || k > n) return -INFINITY;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log of l! / (a! b! c!) with a + b + c = l
inline double log_multinomial(int l, int a, int b, int c) {
  return std::lgamma(l + 1.0) - std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(c + 1.0);
}

// count * log(prob) with 0^0 = 1.
inline double log_power(double prob, int count) {
  if (count == 0) return 0.0;
  if (prob <= 0.0) return -INFINITY;
  return count * std::log(prob);
}

// ---------------------------------------------------------------------------
// Payoffs
// ---------------------------------------------------------------------------

// CRRA utility; ln(x) at gamma == 1.
inline double utility(double x, double gamma, std::string_view what = "x") {
  if (!(x > 0)) {
    throw DomainError("utility evaluated at non-positive wealth " + std::string(what) + " = " +
                      std::to_string(x));
  }
  if (gamma == 1.0) return std::log(x);
  return std::pow(x, 1.0 - gamma) / (1.0 - gamma);
}

// Total utility of a k-member informal pool in which h members are hit.
inline double pool_group_utility(int h, int k, const ModelParams& m) {
  if (k < 1 || h < 0 || h > k) throw std::invalid_argument("pool_group_utility: need 0 <= h <= k, k >= 1");
  const double w = m.w;
  if (h == 0) return k * utility(w, m.gamma, "w");
  double victim = (1 - m.alpha) * w - m.delta1 * w + k * m.delta1 * w / h;
  double spared = w - m.delta1 * w;
  return h * utility(victim, m.gamma, "(1-alpha)w - delta1 w + k delta1 w/h") +
         (k - h) * utility(spared, m.gamma, "w - delta1 w");
}

inline double pool_payoff(int k, const ModelParams& m) {
  if (k < 1) throw std::invalid_argument("pool_payoff: k must be >= 1");
  double sum = 0.0;
  for (int h = 0; h <= k; ++h) {
    double weight = std::exp(log_choose(k, h) + log_power(m.p, h) + log_power(1 - m.p, k - h));
    if (weight == 0.0) continue;
    sum += weight * pool_group_utility(h, k, m);
  }
  return sum / k;
}

// Outcome counts for l insured members:
//   u  hit and compensated,   v  spared and not paid,
//   m  spared but paid,       n  hit and not paid.
struct OutcomePartition {
  int u = 0, v = 0, m = 0, n = 0;
  int total() const noexcept { return u + v + m + n; }
};

struct OutcomeProbabilities {
  double compensated, unaffected, false_payout, uncompensated;
};

inline OutcomeProbabilities outcome_probabilities(const ModelParams& m) {
  return {m.p - m.r, 1 - m.q - m.r, m.q + m.r - m.p, m.r};
}

inline double outcome_probability(const OutcomePartition& part, int l, const ModelParams& m) {
  if (part.u < 0 || part.v < 0 || part.m < 0 || part.n < 0 || part.total() != l)
    throw std::invalid_argument("outcome_probability: partition does not sum to l");
  auto pr = outcome_probabilities(m);
  double lg = std::lgamma(l + 1.0) - std::lgamma(part.u + 1.0) - std::lgamma(part.v + 1.0) -
              std::lgamma(part.m + 1.0) - std::lgamma(part.n + 1.0);
  lg += log_power(pr.compensated, part.u) + log_power(pr.unaffected, part.v) +
        log_power(pr.false_payout, part.m) + log_power(pr.uncompensated, part.n);
  return std::exp(lg);
}

// Q_I depends on u and v only through s = u + v.
inline double index_group_utility(int s, int false_paid, int unpaid, int l, const ModelParams& m) {
  const double w = m.w, c = m.c;
  const int fp = false_paid, n = unpaid;
  if (n == 0) {
    double total = 0.0;
    if (s) total += s * utility(w - c, m.gamma, "w - c");
    if (fp) total += fp * utility(w - c + m.alpha * w, m.gamma, "w - c + alpha w");
    return total;
  }
  const double d2w = m.delta2 * w;
  double total = n * utility((1 - m.alpha) * w - c - d2w + l * d2w / n, m.gamma,
                             "(1-alpha)w - c - delta2 w + l delta2 w/n");
  if (s) total += s * utility(w - c - d2w, m.gamma, "w - c - delta2 w");
  if (fp) total += fp * utility(w - c + m.alpha * w - d2w, m.gamma, "w - c + alpha w - delta2 w");
  return total;
}

inline double index_group_utility(const OutcomePartition& part, int l, const ModelParams& m) {
  if (part.total() != l) throw std::invalid_argument("index_group_utility: partition does not sum to l");
  return index_group_utility(part.u + part.v, part.m, part.n, l, m);
}

// Trinomial form over (u+v, m, n).
inline double index_payoff(int l, const ModelParams& m) {
  if (l < 1) throw std::invalid_argument("index_payoff: l must be >= 1");
  auto pr = outcome_probabilities(m);
  const double p_no_claim_gap = pr.compensated + pr.unaffected;
  double sum = 0.0;
  for (int n = 0; n <= l; ++n) {
    for (int fp = 0; fp + n <= l; ++fp) {
      const int s = l - n - fp;
      double lw = log_multinomial(l, s, fp, n) + log_power(p_no_claim_gap, s) +
                  log_power(pr.false_payout, fp) + log_power(pr.uncompensated, n);
      double weight = std::exp(lw);
      if (weight == 0.0) continue;
      sum += weight * index_group_utility(s, fp, n, l, m);
    }
  }
  return sum / l;
}

// Full four-index sum; O(l^3). Reference route for index_payoff.
inline double index_payoff_quadrinomial(int l, const ModelParams& m) {
  if (l < 1) throw std::invalid_argument("index_payoff_quadrinomial: l must be >= 1");
  double sum = 0.0;
  for (int u = 0; u <= l; ++u)
    for (int v = 0; u + v <= l; ++v)
      for (int fp = 0; u + v + fp <= l; ++fp) {
        OutcomePartition part{u, v, fp, l - u - v - fp};
        double weight = outcome_probability(part, l, m);
        if (weight == 0.0) continue;
        sum += weight * index_group_utility(part, l, m);
      }
  return sum / l;
}

inline double loner_payoff(const ModelParams& m) {
  return m.p * utility((1 - m.alpha) * m.w, m.gamma, "(1-alpha)w") +
         (1 - m.p) * utility(m.w, m.gamma, "w");
}

// pool[k] = pi_S(k), index[l] = pi_I(l) for 1..N; slot 0 unused (NaN).
struct PayoffTables {
  std::vector<double> pool;
  std::vector<double> index;
  double loner = 0.0;
};

// The index table is only filled when I is active.
inline PayoffTables make_payoff_tables(const ModelParams& m) {
  PayoffTables t;
  t.pool.assign(m.N + 1, NAN);
  t.index.assign(m.N + 1, NAN);
  t.loner = loner_payoff(m);
  for (int k = 1; k <= m.N; ++k) {
    if (m.strategies.contains(Strategy::S)) t.pool[k] = pool_payoff(k, m);
    if (m.strategies.contains(Strategy::I)) t.index[k] = index_payoff(k, m);
  }
  return t;
}

}  // namespace riskpool
