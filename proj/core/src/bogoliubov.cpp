#include "rabi/bogoliubov.hpp"

#include <cmath>
#include <limits>

namespace rabi {

bool BogoliubovFrame::tau_p_finite() const { return std::isfinite(tau_p); }

double squeeze_ratio(double s) {
  if (s <= 0.0) return 0.0;
  // zeta = A - sqrt(A^2 - 1) with A = 1 + 2/s, rewritten as 1/(A + sqrt(A^2 - 1)).
  // A^2 - 1 = (2/s)(2 + 2/s) keeps full precision for small s.
  const double u = 2.0 / s;
  const double root = std::sqrt(u * (2.0 + u));
  return 1.0 / ((1.0 + u) + root);
}

BogoliubovFrame bogoliubov_frame(const ModelParams& params) {
  params.validate();
  BogoliubovFrame f;
  const double gt = params.gtilde();
  const double s = params.kappa * gt * gt;

  f.zeta = squeeze_ratio(s);
  f.mu = 1.0 / std::sqrt((1.0 - f.zeta) * (1.0 + f.zeta));
  f.nu = f.zeta * f.mu;
  f.gamma = std::sqrt(1.0 + s);
  f.omega_p = f.gamma * params.omega;

  const double g = params.g;
  const double tau = params.tau;
  const double plus = g * (1.0 + tau) * (f.mu - f.nu);   // g'(1 + tau')
  const double minus = g * (1.0 - tau) * (f.mu + f.nu);  // g'(1 - tau')
  if (s == 0.0) {
    f.g_rot = g;
    f.g_crot = g * tau;
  } else {
    f.g_rot = 0.5 * (plus + minus);
    f.g_crot = 0.5 * (plus - minus);
  }
  f.g_p = f.g_rot;
  f.tau_p = f.g_rot != 0.0 ? f.g_crot / f.g_rot : std::numeric_limits<double>::quiet_NaN();

  f.eta_p = params.delta / f.omega_p;
  const double norm = 2.0 / std::sqrt(f.omega_p * params.delta);
  f.gtilde_p = norm * f.g_rot;
  f.gtilde_p_tau_p = norm * f.g_crot;
  f.xi_x = (1.0 + tau) * (1.0 - f.zeta) / (1.0 + f.zeta);
  return f;
}

RabiCouplings transformed_couplings(const ModelParams& params) {
  const BogoliubovFrame f = bogoliubov_frame(params);
  // omega a^+a + d (a + a^+)^2 = omega' b^+b + (omega' - omega)/2.
  return {f.omega_p, params.delta, f.g_rot, f.g_crot, 0.0, 0.5 * (f.omega_p - params.omega)};
}

HamiltonianMatrix transformed_hamiltonian(const ModelParams& params, FockTruncation trunc) {
  return build_rabi_matrix(transformed_couplings(params), trunc);
}

}  // namespace rabi
