#pragma once

// Analytic phase boundaries of the anisotropic Rabi model with an A^2 term
// in the limit eta -> infinity, and the resulting phase classification.

#include <string>
#include <vector>

namespace rabi {

/// A critical coupling together with its validity. `value` always carries
/// the raw formula (possibly inf/nan) so that coalescing formulas can be
/// compared at the edge of their validity domains.
struct CriticalCoupling {
  double value = 0.0;
  std::string invalid_reason;  ///< empty when valid

  bool valid() const { return invalid_reason.empty(); }
};

/// kappa at which the x^2 and p^2 couplings of the low-energy oscillator are
/// equal: 4 tau / ((1 - tau)^2 gtilde^2). Returns +/-inf at tau = 1.
/// Throws std::invalid_argument for gtilde <= 0.
double kappa_c(double tau, double gtilde);

/// Normal <-> p-type boundary, 2/|1 - tau|; valid for tau != 1 and tau < kappa.
CriticalCoupling gc_p(double tau, double kappa);
/// Normal <-> x-type boundary, 2/sqrt((1 + tau)^2 - 4 kappa); valid for tau > kappa.
CriticalCoupling gc_x(double tau, double kappa);
/// x-type <-> p-type first-order line, 2 sqrt(tau/kappa)/|1 - tau|; valid for tau > kappa > 0.
CriticalCoupling gc_first_order(double tau, double kappa);
/// Triple point 2/(tau - 1), valid only at kappa == tau > 1 (1e-12 tolerance).
CriticalCoupling gc_triple(double tau, double kappa);

enum class Phase : int { Normal = 0, XSrp = 1, PSrp = 2 };

const char* phase_name(Phase p);

struct PhaseLabel {
  Phase phase = Phase::Normal;
  /// gtilde minus the nearest boundary crossed along the gtilde axis at fixed
  /// (tau, kappa); +inf when the line crosses none.
  double boundary_proximity = 0.0;
};

/// Classification from the critical-coupling formulas and kappa_c.
/// Ties: on a second-order boundary -> Normal; on the first-order line -> XSrp.
Phase classify_by_boundaries(double tau, double kappa, double gtilde);
/// Classification from the signs of the low-energy oscillator coefficients
/// c_x = 4 - gtilde^2 xi_x^2 and c_p = 4 - gtilde^2 (1 - tau)^2.
Phase classify_by_coefficients(double tau, double kappa, double gtilde);

/// Throws std::invalid_argument for gtilde < 0 or kappa < 0.
PhaseLabel classify(double tau, double kappa, double gtilde);

/// Analytic critical coupling at which finite-size scaling is anchored:
/// the triple point when kappa == tau > 1, otherwise whichever of gc_p and
/// gc_x is valid. Returns an invalid coupling when neither applies.
CriticalCoupling applicable_critical_coupling(double tau, double kappa);

enum class BoundaryKind { GcP, GcX, GcFirstOrder, Triple };

const char* boundary_name(BoundaryKind k);

struct BoundarySample {
  double tau = 0.0;
  double gtilde = 0.0;
  bool valid = false;
};

struct BoundaryCurve {
  BoundaryKind kind = BoundaryKind::GcP;
  double kappa = 0.0;
  std::vector<BoundarySample> samples;
  std::string validity;  ///< human-readable validity domain in tau
};

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

/// Samples all four boundary kinds on `samples` equally spaced tau values.
/// The triple-point curve holds at most one sample (tau = kappa).
std::vector<BoundaryCurve> boundary_curves(double kappa, Range tau_range, int samples);

struct PhaseGrid {
  double kappa = 0.0;
  std::vector<double> taus;
  std::vector<double> gtildes;
  std::vector<Phase> labels;  ///< row-major: gtilde index outer, tau index inner
  std::vector<BoundaryCurve> boundaries;

  Phase at(std::size_t i_tau, std::size_t j_gtilde) const {
    return labels[j_gtilde * taus.size() + i_tau];
  }
};

/// Throws std::invalid_argument for resolution < 2 or non-finite ranges.
PhaseGrid phase_diagram_grid(double kappa, Range tau_range, Range gtilde_range,
                             int tau_resolution, int gtilde_resolution, int jobs = 1);

}  // namespace rabi
