#pragma once

// Effective low-energy theory in the eta -> infinity limit: gap formulas for
// the three phases and the displaced-frame solutions of the superradiant
// branches.

#include <array>

#include "rabi/criticality.hpp"

namespace rabi {

/// (omega/4) sqrt({4 - [(1+tau)^2 - 4 kappa] gt^2} [4 - (1-tau)^2 gt^2]).
/// Throws std::domain_error when the radicand is negative.
double normal_gap(double tau, double kappa, double gtilde, double omega = 1.0);

/// Gap in the x-type phase. Zero at gc_x and on the first-order line.
/// Throws std::domain_error below gc_x or beyond the first-order line.
double xsrp_gap(double tau, double kappa, double gtilde, double omega = 1.0);

/// Gap in the p-type phase. Zero at gc_p and on the first-order line.
/// Throws std::domain_error below gc_p or on the x-type side of the line.
double psrp_gap(double tau, double kappa, double gtilde, double omega = 1.0);

enum class Branch { X, P };

const char* branch_name(Branch b);

struct EffectiveFrame {
  Branch branch = Branch::X;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
  double cos_theta3 = 1.0;
  double x0 = 0.0;  ///< x-branch displacement (0 on the p branch)
  double p0 = 0.0;  ///< p-branch displacement (0 on the x branch)

  double gamma = 1.0;
  double eta = 1.0;
  double eta_p = 1.0;   ///< eta / gamma
  double eta_pp = 1.0;  ///< eta_p / cos(theta3)
  double gtilde_pp = 0.0;
  double tau_pp = 1.0;

  double gtilde_p = 0.0;        ///< gt'
  double gtilde_p_tau_p = 0.0;  ///< gt' tau'

  // gt'cos(theta_-) and gt'tau'cos(theta_+).
  double chan_minus = 0.0;
  double chan_plus = 0.0;

  double c_eps_x() const { return chan_minus + chan_plus; }
  double c_eps_p() const { return chan_minus - chan_plus; }
};

/// Throws std::domain_error when cos(theta3) for the branch is outside (0, 1].
EffectiveFrame effective_frame(double tau, double kappa, double gtilde, double eta, Branch branch);

/// (gamma omega / 4) sqrt((4 - Cx^2 cos^3 th3)(4 - Cp^2 cos th3)).
double frame_gap(const EffectiveFrame& f, double omega = 1.0);

/// Leading-order squeezed-frame quadrature square per eta: x0^2/eta or p0^2/eta.
double predict_order_parameter(const EffectiveFrame& f);

/// Residuals of the six conditions that make the displaced, rotated
/// Hamiltonian collapse back to Rabi form, in the order
/// C_sx, C_sy, C_xsy, C_psx, C_x, C_y.
std::array<double, 6> constraint_residuals(const EffectiveFrame& f);

struct GapPrediction {
  Phase regime = Phase::Normal;
  double epsilon = 0.0;
  double c_eps_x = 0.0;  ///< only meaningful in a superradiant regime
  double c_eps_p = 0.0;
};

/// Picks the formula by classify(). Throws std::domain_error if the
/// regime's formula is undefined at this point.
GapPrediction analytic_gap(double tau, double kappa, double gtilde, double omega = 1.0);

}  // namespace rabi
