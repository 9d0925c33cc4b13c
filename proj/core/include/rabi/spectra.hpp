#pragma once

// Exact diagonalization per parity sector with adaptive Fock truncation.

#include <string>
#include <vector>

#include "rabi/model.hpp"

namespace rabi {

enum class SolverKind {
  Auto,     ///< currently the banded direct solver at every size
  Direct,   ///< LAPACK band reduction + inverse iteration
  Lanczos,  ///< matrix-vector products only
};

const char* solver_name(SolverKind k);

struct SolverOptions {
  int n_max_initial = 32;
  int n_max_ceiling = 16384;
  double rel_tol = 1e-6;
  double tail_tol = 1e-8;        ///< ground-state weight allowed above 0.9 n_max
  std::size_t dense_threshold = 4096;  ///< largest dimension a full dense matrix is built for
  int n_eigen = 2;               ///< eigenpairs per parity sector
  SolverKind solver = SolverKind::Auto;
  bool adaptive_start = true;    ///< raise n_max_initial from a mean-field photon estimate

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct SpectrumResult {
  double e0 = 0.0;
  double e1 = 0.0;
  double gap = 0.0;               ///< e1 - e0 over the full spectrum
  double gap_same_parity = 0.0;   ///< first excitation inside the ground-state sector
  double x2_a = 0.0;
  double p2_a = 0.0;
  double x2_b = 0.0;
  double p2_b = 0.0;
  double photons = 0.0;           ///< <a^+a>
  double n0 = 0.0;                ///< photons / eta
  double gamma = 1.0;             ///< (mu + nu)^2 of the squeezed frame
  double tail_weight = 0.0;
  int ground_parity = 1;
  int n_max_used = 0;
  bool converged = false;
};

/// Mean-field estimate of <a^+a> in the lab frame (0 in the normal phase).
double mean_field_photons(const ModelParams& params);

/// One solve at a fixed truncation. `converged` reflects the tail test only.
SpectrumResult spectrum_at(const ModelParams& params, int n_max, const SolverOptions& opts = {});

/// Doubles n_max from the starting value until energies and observables are
/// stable to rel_tol and the tail test passes; returns converged = false if
/// the ceiling is reached first.
SpectrumResult ground_spectrum(const ModelParams& params, const SolverOptions& opts = {});

struct SweepPoint {
  double gtilde = 0.0;
  SpectrumResult result;
};

struct Sweep {
  double tau = 1.0;
  double kappa = 0.0;
  double eta = 1.0;
  double omega = 1.0;
  std::vector<SweepPoint> points;
};

/// Throws std::invalid_argument unless `gtildes` is strictly increasing.
Sweep sweep_coupling(double tau, double kappa, double eta, double omega,
                     const std::vector<double>& gtildes, const SolverOptions& opts = {},
                     int jobs = 1);

struct DerivativeSample {
  double gtilde = 0.0;
  double value = 0.0;
  bool one_sided = false;  ///< endpoint value from a one-sided stencil
};

/// dE0/dg (order 1) or d^2E0/dg^2 (order 2) in the unrescaled coupling
/// g = gtilde sqrt(omega delta)/2. Central differences inside, one-sided at
/// the ends. Throws for a non-uniform grid or too few points.
std::vector<DerivativeSample> energy_derivative(const Sweep& sweep, int order);

/// d g / d gtilde for the sweep's (omega, eta).
double coupling_chain_factor(double omega, double eta);

enum class TransitionKind { SecondOrder, FirstOrder };

/// Second order: argmax |E0''| over interior points with parabolic
/// refinement. First order: midpoint of the adjacent pair with the largest
/// |Delta E0'|. Throws std::runtime_error when the extremum sits at the edge.
double locate_transition(const Sweep& sweep, TransitionKind kind);

/// Largest |E0'(g_{i+1}) - E0'(g_i)| over adjacent points.
double max_slope_jump(const Sweep& sweep);

}  // namespace rabi
