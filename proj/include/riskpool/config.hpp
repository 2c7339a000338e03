#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "riskpool/markov.hpp"
#include "riskpool/model.hpp"
#include "riskpool/montecarlo.hpp"
#include "riskpool/sweeps.hpp"

namespace riskpool {

// Malformed or unknown configuration entries.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SweepSection {
  std::vector<SweepAxis> axes;
  std::vector<std::string> outputs{"adoption", "profit"};
  bool operator==(const SweepSection&) const = default;
};

struct PremiumSection {
  std::vector<double> grid;
  bool operator==(const PremiumSection&) const = default;
};

struct RunConfig {
  ModelParams model;
  std::optional<SweepSection> sweep;
  std::optional<PremiumSection> premium;
  SimConfig mc;
  double tolerance = 1e-12;
  bool allow_reducible = false;
  std::string output_dir = "out";
  unsigned threads = 0;  // 0: RISKPOOL_THREADS or hardware concurrency
};

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string trim(std::string s) {
  const char* ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  auto e = s.find_last_not_of(ws);
  s.erase(e == std::string::npos ? 0 : e + 1);
  return s;
}

inline double parse_number(const std::string& raw, const std::string& key) {
  std::string s = trim(raw);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("'" + key + "': expected a number, got '" + raw + "'");
  return v;
}

template <class Int>
Int parse_integer(const std::string& raw, const std::string& key) {
  std::string s = trim(raw);
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("'" + key + "': expected an integer, got '" + raw + "'");
  return v;
}

inline bool parse_bool(const std::string& raw, const std::string& key) {
  std::string s = trim(raw);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("'" + key + "': expected true/false, got '" + raw + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

// "v1, v2, ..." or "lo:hi:step"
inline std::vector<double> parse_values(const std::string& raw, const std::string& key) {
  std::string s = trim(raw);
  if (s.find(':') != std::string::npos) {
    auto parts = split(s, ':');
    if (parts.size() != 3) throw ConfigError("'" + key + "': range must be lo:hi:step");
    try {
      return linear_grid(parse_number(parts[0], key), parse_number(parts[1], key), parse_number(parts[2], key));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("'" + key + "': " + e.what());
    }
  }
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_number(part, key));
  if (out.empty()) throw ConfigError("'" + key + "': empty value list");
  return out;
}

inline std::string join_values(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

// "name = v1, v2" for sweep axes
inline SweepAxis parse_axis(const std::string& raw, const std::string& key) {
  auto eq = raw.find('=');
  if (eq == std::string::npos) throw ConfigError("'" + key + "': expected 'name = values'");
  SweepAxis ax{trim(raw.substr(0, eq)), parse_values(raw.substr(eq + 1), key)};
  if (!is_param_name(ax.name)) throw ConfigError("'" + key + "': '" + ax.name + "' is not a model parameter");
  return ax;
}

inline void set_model_key(ModelParams& m, const std::string& name, const std::string& value, const std::string& key) {
  if (name == "strategies") {
    try {
      m.strategies = StrategySet::parse(trim(value));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("'" + key + "': " + e.what());
    }
    return;
  }
  if (!is_param_name(name)) throw ConfigError("unknown key '" + key + "'");
  try {
    set_param(m, name, parse_number(value, key));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("'" + key + "': " + e.what());
  }
}

inline void set_key(RunConfig& cfg, const std::string& section, const std::string& name, const std::string& value) {
  const std::string key = section + "." + name;
  if (section == "model") {
    set_model_key(cfg.model, name, value, key);
  } else if (section == "sweep") {
    if (!cfg.sweep) cfg.sweep.emplace();
    if (name == "axis1" || name == "axis2") {
      std::size_t slot = name == "axis1" ? 0 : 1;
      if (cfg.sweep->axes.size() <= slot) cfg.sweep->axes.resize(slot + 1);
      cfg.sweep->axes[slot] = parse_axis(value, key);
    } else if (name == "outputs") {
      cfg.sweep->outputs.clear();
      for (auto& o : split(value, ',')) {
        if (o != "adoption" && o != "profit" && o != "stationary" && o != "gradient")
          throw ConfigError("'" + key + "': unknown output '" + o + "'");
        cfg.sweep->outputs.push_back(o);
      }
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  } else if (section == "premium") {
    if (!cfg.premium) cfg.premium.emplace();
    if (name == "grid") cfg.premium->grid = parse_values(value, key);
    else throw ConfigError("unknown key '" + key + "'");
  } else if (section == "mc") {
    if (name == "steps") cfg.mc.steps = parse_integer<long>(value, key);
    else if (name == "burnin") cfg.mc.burnin = parse_integer<long>(value, key);
    else if (name == "thinning") cfg.mc.thinning = parse_integer<long>(value, key);
    else if (name == "seed") cfg.mc.seed = parse_integer<std::uint64_t>(value, key);
    else if (name == "initial_S") cfg.mc.initial.iS = parse_integer<int>(value, key);
    else if (name == "initial_I") cfg.mc.initial.iI = parse_integer<int>(value, key);
    else throw ConfigError("unknown key '" + key + "'");
  } else if (section == "solver") {
    if (name == "tolerance") cfg.tolerance = parse_number(value, key);
    else if (name == "allow_reducible") cfg.allow_reducible = parse_bool(value, key);
    else throw ConfigError("unknown key '" + key + "'");
  } else if (section == "output") {
    if (name == "dir") cfg.output_dir = trim(value);
    else if (name == "threads") cfg.threads = parse_integer<unsigned>(value, key);
    else throw ConfigError("unknown key '" + key + "'");
  } else {
    throw ConfigError("unknown section '[" + section + "]'");
  }
}

}  // namespace detail

// INI-style text: [model], [sweep], [premium], [mc], [solver], [output].
inline RunConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      if (!body.data().empty()) throw ConfigError("key '" + section + "' outside of any section");
      if (section == "sweep") cfg.sweep.emplace();
      else if (section == "premium") cfg.premium.emplace();
      else if (section != "model" && section != "mc" && section != "solver" && section != "output")
        throw ConfigError("unknown section '[" + section + "]'");
    }
    for (const auto& [name, value] : body) detail::set_key(cfg, section, name, value.data());
  }
  if (cfg.sweep) {
    for (const auto& ax : cfg.sweep->axes)
      if (ax.name.empty()) throw ConfigError("sweep.axis2 given without sweep.axis1");
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string serialize(const RunConfig& cfg) {
  std::ostringstream out;
  const auto& m = cfg.model;
  out << "[model]\n";
  for (auto name : kParamNames) {
    double v = get_param(m, name);
    out << name << " = " << (name == "Z" || name == "N" ? std::to_string(static_cast<int>(v)) : format_double(v)) << "\n";
  }
  out << "strategies = " << m.strategies.to_string() << "\n";
  if (cfg.sweep) {
    out << "\n[sweep]\n";
    for (std::size_t i = 0; i < cfg.sweep->axes.size(); ++i)
      out << "axis" << (i + 1) << " = " << cfg.sweep->axes[i].name << " = "
          << detail::join_values(cfg.sweep->axes[i].values) << "\n";
    out << "outputs = ";
    for (std::size_t i = 0; i < cfg.sweep->outputs.size(); ++i) out << (i ? ", " : "") << cfg.sweep->outputs[i];
    out << "\n";
  }
  if (cfg.premium) out << "\n[premium]\ngrid = " << detail::join_values(cfg.premium->grid) << "\n";
  out << "\n[mc]\n"
      << "steps = " << cfg.mc.steps << "\n"
      << "burnin = " << cfg.mc.burnin << "\n"
      << "thinning = " << cfg.mc.thinning << "\n"
      << "seed = " << cfg.mc.seed << "\n"
      << "initial_S = " << cfg.mc.initial.iS << "\n"
      << "initial_I = " << cfg.mc.initial.iI << "\n";
  out << "\n[solver]\n"
      << "tolerance = " << format_double(cfg.tolerance) << "\n"
      << "allow_reducible = " << (cfg.allow_reducible ? "true" : "false") << "\n";
  out << "\n[output]\n"
      << "dir = " << cfg.output_dir << "\n"
      << "threads = " << cfg.threads << "\n";
  return out.str();
}

// "key=value"; a bare key names a [model] field, otherwise "section.key".
inline void apply_override(RunConfig& cfg, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must have the form key=value");
  std::string key = detail::trim(assignment.substr(0, eq));
  std::string value = assignment.substr(eq + 1);
  auto dot = key.find('.');
  if (dot == std::string::npos) detail::set_key(cfg, "model", key, value);
  else detail::set_key(cfg, key.substr(0, dot), key.substr(dot + 1), value);
}

}  // namespace riskpool
