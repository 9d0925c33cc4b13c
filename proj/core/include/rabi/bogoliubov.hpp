#pragma once

// Squeeze transformation b = mu a + nu a^+ that removes the (a + a^+)^2 term.

#include "rabi/model.hpp"

namespace rabi {

struct BogoliubovFrame {
  double mu = 1.0;
  double nu = 0.0;
  double gamma = 1.0;  ///< (mu + nu)^2 = sqrt(1 + kappa gtilde^2)
  double zeta = 0.0;   ///< nu / mu, in [0, 1)

  double omega_p = 1.0;  ///< gamma * omega

  // Coupling channels in the squeezed frame. g_p (1 + tau_p) and
  // g_p (1 - tau_p) are always finite even where mu - tau nu vanishes.
  double g_rot = 0.0;   ///< g' = g (mu - tau nu)
  double g_crot = 0.0;  ///< g' tau' = g (tau mu - nu)

  double g_p = 0.0;    ///< same as g_rot
  double tau_p = 1.0;  ///< g_crot / g_rot; non-finite when g_rot == 0
  double eta_p = 1.0;  ///< delta / omega_p
  double gtilde_p = 0.0;         ///< 2 g' / sqrt(omega' delta)
  double gtilde_p_tau_p = 0.0;   ///< 2 g' tau' / sqrt(omega' delta)
  double xi_x = 0.0;   ///< (1 + tau)(1 - zeta)/(1 + zeta)

  bool tau_p_finite() const;
};

/// zeta = nu/mu as a function of s = kappa gtilde^2, evaluated without
/// subtractive cancellation.
double squeeze_ratio(double kappa_gtilde_sq);

BogoliubovFrame bogoliubov_frame(const ModelParams& params);

/// Couplings of the squeezed-frame Hamiltonian
///   omega' b^+b + (delta/2) s_z + g'[(b s_+ + b^+ s_-) + tau'(b s_- + b^+ s_+)]
/// plus the zero-point shift (omega' - omega)/2, so spectra match the lab frame.
RabiCouplings transformed_couplings(const ModelParams& params);

HamiltonianMatrix transformed_hamiltonian(const ModelParams& params, FockTruncation trunc);

}  // namespace rabi
