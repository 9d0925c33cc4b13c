#pragma once

// Generates finite-size-scaling datasets from exact diagonalization around a
// known critical coupling.

#include <vector>

#include "rabi/scaling.hpp"
#include "rabi/spectra.hpp"

namespace rabi {

struct FssConfig {
  double tau = 2.0;
  double kappa = 3.0;
  double omega = 1.0;
  double gc = 2.0;               ///< analytic critical coupling
  std::vector<double> etas;
  std::vector<double> ts;        ///< reduced distances t > 0
  SolverOptions opts;
  int jobs = 1;
};

struct CriticalPoint {
  double eta = 0.0;
  double n0 = 0.0;
  double gap = 0.0;
  bool converged = false;
};

struct FssData {
  /// n0 on both sides of gc (gtilde = gc (1 -+ t)).
  FssDataset n0;
  /// E1 - E0 on the normal side only; above gc it is the tunneling splitting.
  FssDataset gap;
  std::vector<CriticalPoint> critical;  ///< one per eta, at gtilde = gc
  int unconverged = 0;
};

FssData generate_fss(const FssConfig& cfg);

/// n points log-spaced over [lo, hi], inclusive.
std::vector<double> log_spaced(double lo, double hi, int n);

/// (eta, value) pairs for fit_critical_powerlaw.
std::vector<std::pair<double, double>> critical_series(const std::vector<CriticalPoint>& pts, Observable o);

}  // namespace rabi
