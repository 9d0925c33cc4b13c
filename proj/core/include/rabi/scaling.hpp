#pragma once

// Finite-size scaling: data collapse of O = t^beta f(t eta^nu) with
// t = |1 - gtilde/gc|, and power-law fits O_c ~ eta^(-gamma) at criticality.

#include <string>
#include <utility>
#include <vector>

namespace rabi {

enum class Observable { N0, Gap };

const char* observable_name(Observable o);

struct FssRow {
  double eta = 0.0;
  double gtilde = 0.0;
  double value = 0.0;
};

struct FssDataset {
  Observable observable = Observable::N0;
  double gc = 1.0;
  double t_min = 1e-3;  ///< critical window in t, inclusive
  double t_max = 1e-1;
  std::vector<FssRow> rows;
};

struct ScaledCurve {
  double eta = 0.0;
  int side = -1;           ///< -1 below gc, +1 above
  std::vector<double> x;   ///< t eta^nu, ascending
  std::vector<double> y;   ///< O t^-beta
};

struct CollapseResult {
  double beta = 0.0;
  double nu = 0.0;
  /// Mean squared log-deviation of each curve from a monotone spline through
  /// the other curves, over the pooled variance of log(O t^-beta). 0 for a
  /// perfect collapse; +inf when no curve overlaps another.
  double residual = 0.0;
  int compared_points = 0;
  int excluded_critical = 0;     ///< rows with t == 0
  int excluded_nonpositive = 0;  ///< rows with O <= 0
  int excluded_window = 0;       ///< rows outside [t_min, t_max]
  std::vector<ScaledCurve> scaled_curves;
};

/// Throws std::invalid_argument when fewer than 3 distinct eta values remain
/// after the exclusions, or when gc <= 0.
CollapseResult collapse(const FssDataset& data, double beta, double nu);

struct PowerLawFit {
  double exponent = 0.0;  ///< gamma in O_c = A eta^-gamma
  double std_error = 0.0;
  double r2 = 0.0;
  double prefactor = 0.0;  ///< A
  int points = 0;
};

/// Least squares on (log eta, log O_c). Throws std::invalid_argument for
/// fewer than 3 distinct sizes or any non-positive value.
PowerLawFit fit_critical_powerlaw(const std::vector<std::pair<double, double>>& points);

struct ExponentScan {
  double beta = 0.0;
  double nu = 0.0;
  double residual = 0.0;
  std::vector<double> beta_grid;
  std::vector<double> nu_grid;
  std::vector<double> surface;  ///< row-major, beta index outer

  double at(std::size_t i_beta, std::size_t j_nu) const { return surface[i_beta * nu_grid.size() + j_nu]; }
};

/// Exhaustive grid search; ties go to the smaller nu, then the smaller beta.
ExponentScan scan_exponents(const FssDataset& data, const std::vector<double>& beta_grid,
                            const std::vector<double>& nu_grid, int jobs = 1);

}  // namespace rabi
