#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rabi::cli {

/// lo:hi:step, inclusive of both ends.
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
};

/// Parses "lo:hi:step"; throws std::invalid_argument on malformed text,
/// hi < lo, step <= 0 or a step that does not land on hi.
GridSpec parse_grid(const std::string& text);
std::vector<double> expand(const GridSpec& g);
std::string to_string(const GridSpec& g);

struct Preset {
  std::string name;
  std::string command;  ///< subcommand the preset belongs to
  std::string summary;
  std::optional<double> tau;
  std::optional<double> kappa;
  std::vector<double> etas;
  std::optional<GridSpec> tau_grid;
  std::optional<GridSpec> gtilde_grid;
};

const std::vector<Preset>& presets();
/// nullptr when unknown.
const Preset* find_preset(const std::string& name);

}  // namespace rabi::cli
