// riskpool: stationary analysis, gradient fields, sweeps, premium search and
// Monte Carlo runs for the S / I / A disaster-risk strategy game.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "riskpool/riskpool.hpp"

namespace fs = std::filesystem;
using namespace riskpool;

namespace {

constexpr int kExitSolver = 1;
constexpr int kExitValidation = 2;

unsigned resolve_threads(unsigned flag, const RunConfig& cfg) {
  if (flag) return flag;
  if (cfg.threads) return cfg.threads;
  if (const char* env = std::getenv("RISKPOOL_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

StationaryOptions solver_options(const RunConfig& cfg) {
  StationaryOptions opt;
  opt.tolerance = cfg.tolerance;
  opt.allow_reducible = cfg.allow_reducible;
  return opt;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) { io::write_file(path, j.dump(2) + "\n"); }

std::string to_csv(auto&& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

void run_stationary(const RunConfig& cfg, const fs::path& dir) {
  auto model = build_model(validate(cfg.model));
  auto st = stationary(model, solver_options(cfg));
  io::write_file(dir / "stationary.csv", to_csv([&](std::ostream& o) { io::write_distribution(o, st.probs, model.space); }));
  io::write_file(dir / "stationary_summary.csv", to_csv([&](std::ostream& o) { io::write_summary(o, st.adoption, st.residual); }));
  auto meta = io::base_metadata("stationary", cfg);
  meta["states"] = model.space.size();
  meta["residual"] = st.residual;
  meta["method"] = st.method;
  meta["adoption"] = {{"p_S", st.adoption[0]}, {"p_I", st.adoption[1]}, {"p_A", st.adoption[2]}};
  meta["argmax"] = argmax_label(st.adoption, cfg.model.strategies);
  meta["insurer_profit"] = insurer_profit(st.adoption[1], cfg.model);
  write_json(dir / "stationary.json", meta);
  std::cout << "p_S=" << format_double(st.adoption[0]) << " p_I=" << format_double(st.adoption[1])
            << " p_A=" << format_double(st.adoption[2]) << " residual=" << st.residual << "\n";
}

void run_gradient(const RunConfig& cfg, const fs::path& dir) {
  auto model = build_model(validate(cfg.model));
  auto field = gradient_field(model);
  io::write_file(dir / "gradient.csv", to_csv([&](std::ostream& o) { io::write_gradient(o, field, model.space); }));
  auto meta = io::base_metadata("gradient", cfg);
  meta["states"] = model.space.size();
  write_json(dir / "gradient.json", meta);
  std::cout << "wrote " << model.space.size() << " gradient vectors\n";
}

void run_sweep(const RunConfig& cfg, const fs::path& dir, unsigned threads) {
  if (!cfg.sweep || cfg.sweep->axes.empty()) throw ConfigError("sweep requires a [sweep] section with axis1");
  SweepSpec spec{cfg.model, cfg.sweep->axes};
  auto rows = sweep_grid(spec, threads, solver_options(cfg));
  std::vector<std::string> names;
  for (const auto& ax : spec.axes) names.push_back(ax.name);
  io::write_file(dir / "sweep.csv", to_csv([&](std::ostream& o) { io::write_sweep(o, names, rows); }));

  const auto& outs = cfg.sweep->outputs;
  const bool want_stationary = std::find(outs.begin(), outs.end(), "stationary") != outs.end();
  const bool want_gradient = std::find(outs.begin(), outs.end(), "gradient") != outs.end();
  auto meta = io::base_metadata("sweep", cfg);
  auto points = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    nlohmann::ordered_json pt;
    pt["index"] = i;
    pt["axis_values"] = rows[i].axis_values;
    pt["residual"] = rows[i].ok() ? nlohmann::ordered_json(rows[i].residual) : nlohmann::ordered_json(nullptr);
    if (!rows[i].ok()) pt["error"] = rows[i].error;
    points.push_back(pt);
    if (!rows[i].ok() || !(want_stationary || want_gradient)) continue;
    ModelParams m = cfg.model;
    for (std::size_t a = 0; a < names.size(); ++a) set_param(m, names[a], rows[i].axis_values[a]);
    auto model = build_model(m);
    const std::string stem = "sweep_point_" + std::to_string(i);
    if (want_stationary) {
      auto st = stationary(model, solver_options(cfg));
      io::write_file(dir / (stem + "_stationary.csv"),
                     to_csv([&](std::ostream& o) { io::write_distribution(o, st.probs, model.space); }));
    }
    if (want_gradient) {
      auto field = gradient_field(model);
      io::write_file(dir / (stem + "_gradient.csv"),
                     to_csv([&](std::ostream& o) { io::write_gradient(o, field, model.space); }));
    }
  }
  meta["points"] = points;
  write_json(dir / "sweep.json", meta);
  std::size_t failed = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok(); });
  std::cout << "swept " << rows.size() << " points (" << failed << " rejected)\n";
}

void run_premium(const RunConfig& cfg, const fs::path& dir, unsigned threads) {
  validate(cfg.model);
  std::vector<double> grid = cfg.premium && !cfg.premium->grid.empty() ? cfg.premium->grid : linear_grid(0.16, 0.198, 0.002);
  auto curve = optimal_premium(cfg.model, grid, threads, solver_options(cfg));
  io::write_file(dir / "premium.csv", to_csv([&](std::ostream& o) { io::write_sweep(o, {"c"}, curve.rows); }));
  auto meta = io::base_metadata("premium", cfg);
  meta["grid"] = grid;
  meta["best_c"] = curve.best_c;
  meta["best_profit"] = curve.best_profit;
  meta["interior_maximum"] = curve.interior_maximum();
  meta["tie_break"] = "smallest c";
  write_json(dir / "premium.json", meta);
  std::cout << "c*=" << format_double(curve.best_c) << " profit=" << format_double(curve.best_profit)
            << (curve.interior_maximum() ? " (interior)" : " (grid boundary)") << "\n";
}

void run_mc(const RunConfig& cfg, const fs::path& dir, bool compare_exact) {
  validate(cfg.model);
  StateSpace space(cfg.model.Z, cfg.model.strategies);
  FitnessTable fitness(cfg.model, space);
  auto sim = Simulator(cfg.model, space, fitness).run(cfg.mc);
  io::write_file(dir / "mc.csv", to_csv([&](std::ostream& o) { io::write_distribution(o, sim.frequencies, space); }));
  io::write_file(dir / "mc_summary.csv", to_csv([&](std::ostream& o) { io::write_summary(o, sim.adoption, NAN); }));
  auto meta = io::base_metadata("mc", cfg);
  meta["rng"] = "std::mt19937_64";
  meta["seed"] = cfg.mc.seed;
  meta["steps"] = cfg.mc.steps;
  meta["burnin"] = cfg.mc.burnin;
  meta["thinning"] = cfg.mc.thinning;
  meta["initial"] = {cfg.mc.initial.iS, cfg.mc.initial.iI};
  meta["samples"] = sim.samples;
  meta["adoption"] = {{"p_S", sim.adoption[0]}, {"p_I", sim.adoption[1]}, {"p_A", sim.adoption[2]}};
  if (compare_exact) {
    auto model = build_kernel(cfg.model, space, fitness);
    StationaryOptions opt = solver_options(cfg);
    if (cfg.model.mu == 0.0) opt.allow_reducible = true;
    try {
      auto st = stationary(model, opt);
      meta["tv_distance_to_exact"] = total_variation(sim.frequencies, st.probs);
    } catch (const SolverError& e) {
      meta["tv_distance_to_exact"] = nullptr;
    }
  }
  write_json(dir / "mc.json", meta);
  std::cout << "samples=" << sim.samples << " p_S=" << format_double(sim.adoption[0])
            << " p_I=" << format_double(sim.adoption[1]) << " p_A=" << format_double(sim.adoption[2]) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"riskpool: evolutionary dynamics of risk-sharing pools versus index insurance"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  bool no_exact = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--set", overrides, "override, e.g. alpha=0.5 or mc.steps=1000");
    cmd->add_option("-o,--out", out_dir, "output directory (default: [output] dir)");
    cmd->add_option("-t,--threads", threads, "worker threads (default: RISKPOOL_THREADS or all cores)");
  };

  auto* cmd_stationary = app.add_subcommand("stationary", "stationary distribution and adoption rates");
  auto* cmd_gradient = app.add_subcommand("gradient", "per-state selection gradient");
  auto* cmd_sweep = app.add_subcommand("sweep", "one- or two-parameter grid of stationary runs");
  auto* cmd_premium = app.add_subcommand("premium", "insurer profit curve over a premium grid");
  auto* cmd_mc = app.add_subcommand("mc", "Monte Carlo simulation of the same process");
  auto* cmd_config = app.add_subcommand("config", "print the effective configuration");
  for (auto* cmd : {cmd_stationary, cmd_gradient, cmd_sweep, cmd_premium, cmd_mc, cmd_config}) add_common(cmd);
  auto* seed_opt = cmd_mc->add_option("--seed", seed, "RNG seed (overrides mc.seed)");
  cmd_mc->add_flag("--no-exact", no_exact, "skip the exact-solver comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& o : overrides) apply_override(cfg, o);
    if (*seed_opt) cfg.mc.seed = seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    validate(cfg.model);

    if (*cmd_config) {
      std::cout << serialize(cfg);
      return 0;
    }
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    const unsigned nthreads = resolve_threads(threads, cfg);

    if (*cmd_stationary) run_stationary(cfg, dir);
    else if (*cmd_gradient) run_gradient(cfg, dir);
    else if (*cmd_sweep) run_sweep(cfg, dir, nthreads);
    else if (*cmd_premium) run_premium(cfg, dir, nthreads);
    else if (*cmd_mc) run_mc(cfg, dir, !no_exact);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
