#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskpool/config.hpp"
#include "riskpool/markov.hpp"
#include "riskpool/sweeps.hpp"

namespace riskpool::io {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "1.0.0";

// All CSV floats use 17 significant digits.
inline void write_distribution(std::ostream& out, std::span<const double> probs, const StateSpace& space) {
  out << "i_S,i_I,prob\n";
  for (std::size_t i = 0; i < space.size(); ++i)
    out << space[i].iS << ',' << space[i].iI << ',' << format_double(probs[i]) << '\n';
}

inline void write_summary(std::ostream& out, const std::array<double, 3>& adoption, double residual) {
  out << "p_S,p_I,p_A,residual\n"
      << format_double(adoption[0]) << ',' << format_double(adoption[1]) << ',' << format_double(adoption[2]) << ','
      << format_double(residual) << '\n';
}

inline void write_gradient(std::ostream& out, const GradientField& field, const StateSpace& space) {
  out << "i_S,i_I,g_I,g_S\n";
  for (std::size_t i = 0; i < space.size(); ++i)
    out << space[i].iS << ',' << space[i].iI << ',' << format_double(field[i].g_I) << ','
        << format_double(field[i].g_S) << '\n';
}

inline void write_sweep(std::ostream& out, const std::vector<std::string>& axis_names, const std::vector<SweepRow>& rows) {
  for (const auto& n : axis_names) out << n << ',';
  out << "p_S,p_I,p_A,profit,argmax\n";
  for (const auto& row : rows) {
    for (double v : row.axis_values) out << format_double(v) << ',';
    out << format_double(row.adoption[0]) << ',' << format_double(row.adoption[1]) << ','
        << format_double(row.adoption[2]) << ',' << format_double(row.profit) << ',' << row.argmax << '\n';
  }
}

inline nlohmann::ordered_json params_json(const ModelParams& m) {
  nlohmann::ordered_json j;
  for (auto name : kParamNames) {
    if (name == "Z" || name == "N") j[std::string(name)] = static_cast<int>(get_param(m, name));
    else j[std::string(name)] = get_param(m, name);
  }
  j["strategies"] = m.strategies.to_string();
  return j;
}

// Sidecar shared by every subcommand; callers add command-specific fields.
inline nlohmann::ordered_json base_metadata(const std::string& command, const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["schema_version"] = kSchemaVersion;
  j["parameters"] = params_json(cfg.model);
  j["solver"] = {{"tolerance", cfg.tolerance}, {"allow_reducible", cfg.allow_reducible}};
  j["config"] = serialize(cfg);
  return j;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace riskpool::io
