#include "presets.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "output.hpp"

namespace rabi::cli {

namespace {

double parse_number(const std::string& s, const std::string& whole) {
  if (s.empty()) throw std::invalid_argument("malformed range '" + whole + "'");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("malformed range '" + whole + "'");
  }
  return v;
}

std::size_t grid_count(const GridSpec& g) {
  return static_cast<std::size_t>(std::llround((g.hi - g.lo) / g.step)) + 1;
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? std::string::npos : text.find(':', a + 1);
  if (b == std::string::npos || text.find(':', b + 1) != std::string::npos) {
    throw std::invalid_argument("range '" + text + "' must look like lo:hi:step");
  }
  GridSpec g{parse_number(text.substr(0, a), text), parse_number(text.substr(a + 1, b - a - 1), text),
             parse_number(text.substr(b + 1), text)};
  if (g.hi < g.lo) throw std::invalid_argument("range '" + text + "': hi < lo");
  if (!(g.step > 0.0)) throw std::invalid_argument("range '" + text + "': step must be > 0");
  const double n = (g.hi - g.lo) / g.step;
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
    throw std::invalid_argument("range '" + text + "': step does not divide hi - lo");
  }
  if (grid_count(g) > 10'000'000) throw std::invalid_argument("range '" + text + "': too many points");
  return g;
}

std::vector<double> expand(const GridSpec& g) {
  const std::size_t n = grid_count(g);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = g.lo + static_cast<double>(i) * g.step;
  if (n > 1) out.back() = g.hi;
  return out;
}

std::string to_string(const GridSpec& g) {
  return format_double(g.lo) + ":" + format_double(g.hi) + ":" + format_double(g.step);
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = [] {
    const GridSpec pd_tau{-6.0, 6.0, 0.05};
    const GridSpec pd_gt{0.0, 4.0, 0.02};
    const std::vector<double> sizes{64.0, 256.0, 1024.0};
    std::vector<double> fss_sizes;
    for (int k = 5; k <= 10; ++k) fss_sizes.push_back(std::ldexp(1.0, k));
    return std::vector<Preset>{
        {"fig1a", "phase-diagram", "phase diagram, kappa = 0", std::nullopt, 0.0, {}, pd_tau, pd_gt},
        {"fig1b", "phase-diagram", "phase diagram, kappa = 1", std::nullopt, 1.0, {}, pd_tau, pd_gt},
        {"fig1c", "phase-diagram", "phase diagram, kappa = 3", std::nullopt, 3.0, {}, pd_tau, pd_gt},
        {"fig2", "sweep", "p-type transition, tau = 2, kappa = 3", 2.0, 3.0, sizes, std::nullopt,
         GridSpec{1.5, 2.5, 0.01}},
        {"fig2-x", "sweep", "x-type transition, tau = 4, kappa = 3", 4.0, 3.0, sizes, std::nullopt,
         GridSpec{0.3, 0.75, 0.005}},
        {"fig3", "sweep", "first-order line, tau = 3, kappa = 1", 3.0, 1.0, sizes, std::nullopt,
         GridSpec{1.5, 2.0, 0.01}},
        {"fig3-b", "sweep", "first-order line, tau = 4, kappa = 3", 4.0, 3.0, sizes, std::nullopt,
         GridSpec{0.6, 0.95, 0.005}},
        {"fig4", "fss", "scaling at the ordinary transition, tau = 2, kappa = 3", 2.0, 3.0, fss_sizes,
         std::nullopt, std::nullopt},
        {"fig4-triple", "fss", "scaling at the triple point, tau = kappa = 3", 3.0, 3.0, fss_sizes,
         std::nullopt, std::nullopt},
    };
  }();
  return list;
}

const Preset* find_preset(const std::string& name) {
  for (const Preset& p : presets()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

}  // namespace rabi::cli
