#include "rabi/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <numbers>
#include <stdexcept>

#include "rabi/bogoliubov.hpp"

namespace rabi {

namespace {

// Small negative radicands from rounding right at a closing point are clamped.
double checked_sqrt(double v, double scale, const char* what) {
  if (v < 0.0) {
    if (v > -1e-12 * std::max(scale, 1.0)) return 0.0;
    throw std::domain_error(std::string(what) + ": outside the formula's domain");
  }
  return std::sqrt(v);
}

double gamma_of(double kappa, double gtilde) { return std::sqrt(1.0 + kappa * gtilde * gtilde); }

}  // namespace

double normal_gap(double tau, double kappa, double gtilde, double omega) {
  const double g2 = gtilde * gtilde;
  const double fx = 4.0 - ((1.0 + tau) * (1.0 + tau) - 4.0 * kappa) * g2;
  const double fp = 4.0 - (1.0 - tau) * (1.0 - tau) * g2;
  if (fx < 0.0 || fp < 0.0) {
    if (!(fx < -1e-12 || fp < -1e-12)) return 0.0;
    throw std::domain_error("normal_gap: point is not in the normal phase");
  }
  return 0.25 * omega * std::sqrt(fx * fp);
}

double xsrp_gap(double tau, double kappa, double gtilde, double omega) {
  const CriticalCoupling gc = gc_x(tau, kappa);
  if (!std::isfinite(gc.value) || !(1.0 + tau > 0.0)) {
    throw std::domain_error("xsrp_gap: no x-type transition at this (tau, kappa)");
  }
  const double g2 = gtilde * gtilde;
  const double gam = gamma_of(kappa, gtilde);
  const double a = g2 * (1.0 + tau) * (1.0 + tau) + 4.0 * gam * gam;
  const double b = g2 - gc.value * gc.value;
  const double c = 4.0 * tau - (1.0 - tau) * (1.0 - tau) * kappa * g2;
  if (b < -1e-12 || c < -1e-12) throw std::domain_error("xsrp_gap: point is not in the x-type phase");
  const double root = checked_sqrt(a * std::max(b, 0.0) * std::max(c, 0.0), a, "xsrp_gap");
  return 2.0 * gam * omega * root / (std::pow(1.0 + tau, 3) * gc.value * g2);
}

double psrp_gap(double tau, double kappa, double gtilde, double omega) {
  if (tau == 1.0) throw std::domain_error("psrp_gap: p-type phase forbidden at tau = 1");
  const double gcp = 2.0 / std::abs(1.0 - tau);
  const double g2 = gtilde * gtilde;
  const double d2 = (1.0 - tau) * (1.0 - tau);
  const double a = g2 * d2 + 4.0;
  const double b = g2 - gcp * gcp;
  const double c = d2 * kappa * g2 - 4.0 * tau;
  if (b < -1e-12 || c < -1e-12) throw std::domain_error("psrp_gap: point is not in the p-type phase");
  const double root = checked_sqrt(a * std::max(b, 0.0) * std::max(c, 0.0), a, "psrp_gap");
  // |1 - tau|^3 keeps the gap non-negative on both sides of tau = 1.
  return 2.0 * omega * root / (std::pow(std::abs(1.0 - tau), 3) * gcp * g2);
}

const char* branch_name(Branch b) { return b == Branch::X ? "x_srp" : "p_srp"; }

EffectiveFrame effective_frame(double tau, double kappa, double gtilde, double eta, Branch branch) {
  if (!(eta > 0.0)) throw std::invalid_argument("effective_frame: eta must be > 0");
  if (!(gtilde > 0.0)) throw std::domain_error("effective_frame: gtilde must be > 0");

  ModelParams p = params_from_rescaled(gtilde, tau, kappa, eta, 1.0);
  const BogoliubovFrame bf = bogoliubov_frame(p);

  EffectiveFrame f;
  f.branch = branch;
  f.gamma = bf.gamma;
  f.eta = eta;
  f.eta_p = eta / bf.gamma;

  const double g2 = gtilde * gtilde;
  double c3 = 0.0;
  if (branch == Branch::X) {
    c3 = 4.0 * f.gamma * f.gamma / (g2 * (1.0 + tau) * (1.0 + tau));
  } else {
    if (tau == 1.0) throw std::domain_error("effective_frame: p branch undefined at tau = 1");
    c3 = 4.0 / (g2 * (1.0 - tau) * (1.0 - tau));
  }
  if (!(c3 > 0.0) || c3 > 1.0 + 1e-14) {
    throw std::domain_error("effective_frame: coupling is subcritical for this branch");
  }
  c3 = std::min(c3, 1.0);
  const double s3 = std::sqrt((1.0 - c3) * (1.0 + c3));
  f.cos_theta3 = c3;
  f.theta3 = std::acos(c3);

  // gt' and gt' tau' in the squeezed frame, from the singularity-free pair.
  const double gp = bf.gtilde_p;
  const double gpt = bf.gtilde_p_tau_p;
  f.gtilde_p = gp;
  f.gtilde_p_tau_p = gpt;
  if (branch == Branch::X) {
    f.theta1 = f.theta2 = 0.0;
    f.x0 = std::sqrt(eta / (8.0 * std::pow(f.gamma, 3))) * gtilde * (1.0 + tau) * s3;
    f.chan_minus = gp;   // cos(theta_-) = 1
    f.chan_plus = gpt;   // cos(theta_+) = 1
  } else {
    f.theta1 = f.theta2 = 0.5 * std::numbers::pi;
    f.p0 = -std::sqrt(eta / (8.0 * f.gamma)) * gtilde * (1.0 - tau) * s3;
    f.chan_minus = gp;    // cos(theta_-) = cos 0
    f.chan_plus = -gpt;   // cos(theta_+) = cos pi
  }

  f.eta_pp = f.eta_p / c3;
  const double num = f.chan_minus * (c3 - 1.0) + f.chan_plus * (c3 + 1.0);
  const double den = f.chan_minus * (c3 + 1.0) + f.chan_plus * (c3 - 1.0);
  f.gtilde_pp = 0.5 * std::sqrt(c3) * den;
  f.tau_pp = den != 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
  return f;
}

double frame_gap(const EffectiveFrame& f, double omega) {
  const double c3 = f.cos_theta3;
  const double cx = f.c_eps_x();
  const double cp = f.c_eps_p();
  const double a = 4.0 - cx * cx * c3 * c3 * c3;
  const double b = 4.0 - cp * cp * c3;
  return 0.25 * f.gamma * omega * checked_sqrt(a * b, 16.0, "frame_gap");
}

double predict_order_parameter(const EffectiveFrame& f) {
  const double d = f.branch == Branch::X ? f.x0 : f.p0;
  return d * d / f.eta;
}

std::array<double, 6> constraint_residuals(const EffectiveFrame& f) {
  const double norm = std::sqrt(8.0 * f.eta_p);
  const double theta_m = f.theta1 - f.theta2;
  const double theta_p = f.theta1 + f.theta2;
  const double gr = f.gtilde_p / norm;
  const double gcr = f.gtilde_p_tau_p / norm;
  const double gplus = gr + gcr;
  const double gminus = gr - gcr;

  const double c3 = std::cos(f.theta3);
  const double s3 = std::sin(f.theta3);
  const double c1 = std::cos(f.theta1), s1 = std::sin(f.theta1);
  const double c2 = std::cos(f.theta2), s2 = std::sin(f.theta2);
  const double cm = std::cos(theta_m), sm = std::sin(theta_m);
  const double cpl = std::cos(theta_p), spl = std::sin(theta_p);

  std::array<double, 6> c{};
  c[0] = -0.5 * s3 + (gplus * f.x0 * c2 - gminus * f.p0 * s2) * c3;
  c[1] = -(gplus * f.x0 * s2 + gminus * f.p0 * c2);
  c[2] = gr * sm - gcr * spl;
  c[3] = c3 * (gr * sm + gcr * spl);
  c[4] = (f.x0 * c1 - f.p0 * s1) - f.eta_p * s3 * (gr * cm + gcr * cpl);
  c[5] = (f.x0 * s1 + f.p0 * c1) - f.eta_p * s3 * (gr * sm + gcr * spl);
  return c;
}

GapPrediction analytic_gap(double tau, double kappa, double gtilde, double omega) {
  GapPrediction g;
  g.regime = classify(tau, kappa, gtilde).phase;
  switch (g.regime) {
    case Phase::Normal:
      g.epsilon = normal_gap(tau, kappa, gtilde, omega);
      break;
    case Phase::XSrp: {
      g.epsilon = xsrp_gap(tau, kappa, gtilde, omega);
      const EffectiveFrame f = effective_frame(tau, kappa, gtilde, 1.0, Branch::X);
      g.c_eps_x = f.c_eps_x();
      g.c_eps_p = f.c_eps_p();
      break;
    }
    case Phase::PSrp: {
      g.epsilon = psrp_gap(tau, kappa, gtilde, omega);
      const EffectiveFrame f = effective_frame(tau, kappa, gtilde, 1.0, Branch::P);
      g.c_eps_x = f.c_eps_x();
      g.c_eps_p = f.c_eps_p();
      break;
    }
  }
  return g;
}

}  // namespace rabi
