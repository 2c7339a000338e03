#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "riskpool/markov.hpp"
#include "riskpool/model.hpp"

namespace riskpool {

struct SweepAxis {
  std::string name;
  std::vector<double> values;
  bool operator==(const SweepAxis&) const = default;
};

struct SweepSpec {
  ModelParams base;
  std::vector<SweepAxis> axes;  // one or two; the first axis varies slowest
};

struct SweepRow {
  std::vector<double> axis_values;
  std::array<double, 3> adoption{NAN, NAN, NAN};
  double profit = NAN;
  std::string argmax;  // "S", "I", "A", "tie", or "invalid"
  double residual = NAN;
  std::string error;   // non-empty when the grid point was rejected

  bool ok() const noexcept { return error.empty(); }
};

// Largest adoption rate; "tie" when the top two agree to within `tie_tolerance`.
inline std::string argmax_label(const std::array<double, 3>& adoption, StrategySet active,
                                double tie_tolerance = 1e-12) {
  auto members = active.members();
  std::sort(members.begin(), members.end(),
            [&](Strategy a, Strategy b) { return adoption[index_of(a)] > adoption[index_of(b)]; });
  if (members.size() >= 2 &&
      adoption[index_of(members[0])] - adoption[index_of(members[1])] <= tie_tolerance)
    return "tie";
  return std::string(1, label(members.front()));
}

inline void check(const SweepSpec& spec) {
  if (spec.axes.empty() || spec.axes.size() > 2) throw std::invalid_argument("sweep needs one or two axes");
  for (const auto& ax : spec.axes) {
    if (!is_param_name(ax.name)) throw std::invalid_argument("sweep axis '" + ax.name + "' is not a model parameter");
    if (ax.values.empty()) throw std::invalid_argument("sweep axis '" + ax.name + "' has no values");
  }
  if (spec.axes.size() == 2 && spec.axes[0].name == spec.axes[1].name)
    throw std::invalid_argument("sweep axes must be distinct");
}

// Grid points in row-major axis order.
inline std::vector<std::vector<double>> grid_points(const SweepSpec& spec) {
  std::vector<std::vector<double>> pts;
  if (spec.axes.size() == 1) {
    for (double v : spec.axes[0].values) pts.push_back({v});
  } else {
    for (double a : spec.axes[0].values)
      for (double b : spec.axes[1].values) pts.push_back({a, b});
  }
  return pts;
}

inline SweepRow evaluate_point(const ModelParams& m, std::vector<double> axis_values,
                               const StationaryOptions& opt = {}) {
  SweepRow row;
  row.axis_values = std::move(axis_values);
  try {
    auto model = build_model(m);
    auto st = stationary(model, opt);
    row.adoption = st.adoption;
    row.residual = st.residual;
    row.profit = m.strategies.contains(Strategy::I) ? insurer_profit(st.adoption[1], m) : 0.0;
    row.argmax = argmax_label(st.adoption, m.strategies);
  } catch (const std::exception& e) {
    row.error = e.what();
    row.argmax = "invalid";
  }
  return row;
}

// Runs `task(i)` for i in [0, n) on up to `threads` workers.
template <class Task>
void parallel_for(std::size_t n, unsigned threads, Task&& task) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) task(i);
    });
}

// Per-point failures are recorded in SweepRow::error; the sweep itself does not abort.
inline std::vector<SweepRow> sweep_grid(const SweepSpec& spec, unsigned threads = 1,
                                        const StationaryOptions& opt = {}) {
  check(spec);
  auto pts = grid_points(spec);
  std::vector<SweepRow> rows(pts.size());
  parallel_for(pts.size(), threads, [&](std::size_t i) {
    ModelParams m = spec.base;
    try {
      for (std::size_t a = 0; a < spec.axes.size(); ++a) set_param(m, spec.axes[a].name, pts[i][a]);
    } catch (const std::exception& e) {
      rows[i].axis_values = pts[i];
      rows[i].error = e.what();
      rows[i].argmax = "invalid";
      return;
    }
    rows[i] = evaluate_point(m, pts[i], opt);
  });
  return rows;
}

struct PremiumCurve {
  std::vector<SweepRow> rows;   // axis value is c; infeasible points carry an error
  double best_c = NAN;
  double best_profit = NAN;
  std::size_t best_row = 0;

  // Maximizer strictly inside the feasible part of the grid.
  bool interior_maximum() const {
    std::size_t first = rows.size(), last = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].ok()) {
        first = std::min(first, i);
        last = i;
      }
    return first < last && best_row > first && best_row < last;
  }
};

// Grid search over premiums; ties go to the smaller c.
inline PremiumCurve optimal_premium(const ModelParams& base, const std::vector<double>& c_grid, unsigned threads = 1,
                                    const StationaryOptions& opt = {}) {
  if (!base.strategies.contains(Strategy::I)) throw std::invalid_argument("optimal_premium: strategy I is not active");
  SweepSpec spec{base, {{"c", c_grid}}};
  PremiumCurve curve;
  curve.rows = sweep_grid(spec, threads, opt);
  bool any = false;
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    const auto& row = curve.rows[i];
    if (!row.ok()) continue;
    if (!any || row.profit > curve.best_profit) {
      any = true;
      curve.best_profit = row.profit;
      curve.best_c = row.axis_values[0];
      curve.best_row = i;
    }
  }
  if (!any) throw ParameterError({"optimal_premium: no feasible premium in the grid"});
  return curve;
}

// Inclusive arithmetic grid lo, lo+step, ..., hi (endpoint snapped to within step/2).
inline std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0) || hi < lo) throw std::invalid_argument("linear_grid: need step > 0 and hi >= lo");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 0.5));
  for (long i = 0; i <= n; ++i) out.push_back(lo + double(i) * step);
  return out;
}

inline ModelParams restrict_strategies(ModelParams m, StrategySet subset) {
  if (subset.size() != 2) throw std::invalid_argument("restrict_strategies: subset must contain exactly two strategies");
  m.strategies = subset;
  return m;
}

}  // namespace riskpool
