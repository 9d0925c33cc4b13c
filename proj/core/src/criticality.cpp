#include "rabi/criticality.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rabi/bogoliubov.hpp"
#include "rabi/parallel.hpp"

namespace rabi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gc_p_raw(double tau) {
  return tau == 1.0 ? kInf : 2.0 / std::abs(1.0 - tau);
}

double gc_x_raw(double tau, double kappa) {
  const double disc = (1.0 + tau) * (1.0 + tau) - 4.0 * kappa;
  return disc > 0.0 ? 2.0 / std::sqrt(disc) : std::numeric_limits<double>::quiet_NaN();
}

double gc_first_order_raw(double tau, double kappa) {
  if (kappa <= 0.0 || tau < 0.0) return std::numeric_limits<double>::quiet_NaN();
  return tau == 1.0 ? kInf : 2.0 * std::sqrt(tau / kappa) / std::abs(1.0 - tau);
}

std::vector<double> linspace(Range r, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        (i == count - 1) ? r.hi : r.lo + (r.hi - r.lo) * static_cast<double>(i) / (count - 1);
  }
  return out;
}

}  // namespace

double kappa_c(double tau, double gtilde) {
  if (!(gtilde > 0.0)) throw std::invalid_argument("kappa_c requires gtilde > 0");
  if (tau == 1.0) return kInf;
  const double d = 1.0 - tau;
  return 4.0 * tau / (d * d * gtilde * gtilde);
}

CriticalCoupling gc_p(double tau, double kappa) {
  CriticalCoupling c{gc_p_raw(tau), {}};
  if (tau == 1.0) {
    c.invalid_reason = "p-type forbidden at tau = 1";
  } else if (!(tau < kappa)) {
    c.invalid_reason = "x-type dominates at onset (tau >= kappa)";
  }
  return c;
}

CriticalCoupling gc_x(double tau, double kappa) {
  CriticalCoupling c{gc_x_raw(tau, kappa), {}};
  if (!((1.0 + tau) * (1.0 + tau) > 4.0 * kappa)) {
    c.invalid_reason = "no real solution ((1 + tau)^2 <= 4 kappa)";
  } else if (!(tau > kappa)) {
    c.invalid_reason = "p-type dominates at onset (tau <= kappa)";
  }
  return c;
}

CriticalCoupling gc_first_order(double tau, double kappa) {
  CriticalCoupling c{gc_first_order_raw(tau, kappa), {}};
  if (!(kappa > 0.0)) {
    c.invalid_reason = "no first-order line without an A^2 term";
  } else if (!(tau > kappa)) {
    c.invalid_reason = "first-order line requires tau > kappa";
  } else if (tau == 1.0) {
    c.invalid_reason = "tau = 1";
  }
  return c;
}

CriticalCoupling gc_triple(double tau, double kappa) {
  CriticalCoupling c{tau == 1.0 ? kInf : 2.0 / (tau - 1.0), {}};
  if (!(tau > 1.0)) {
    c.invalid_reason = "triple point requires tau > 1";
  } else if (std::abs(kappa - tau) > 1e-12 * std::max(1.0, std::abs(tau))) {
    c.invalid_reason = "triple point requires kappa == tau";
  }
  return c;
}

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Normal: return "normal";
    case Phase::XSrp: return "x_srp";
    case Phase::PSrp: return "p_srp";
  }
  return "?";
}

Phase classify_by_boundaries(double tau, double kappa, double gtilde) {
  if (gtilde == 0.0) return Phase::Normal;
  const double kc = kappa_c(tau, gtilde);
  if (kappa > kc) {
    return (tau != 1.0 && gtilde > gc_p_raw(tau)) ? Phase::PSrp : Phase::Normal;
  }
  const double gx = gc_x_raw(tau, kappa);
  return (std::isfinite(gx) && gtilde > gx) ? Phase::XSrp : Phase::Normal;
}

Phase classify_by_coefficients(double tau, double kappa, double gtilde) {
  ModelParams p;
  p.omega = 1.0;
  p.delta = 1.0;
  p.g = 0.5 * gtilde;
  p.tau = tau;
  p.kappa = kappa;
  const double xi = bogoliubov_frame(p).xi_x;
  const double g2 = gtilde * gtilde;
  const double coupling_x = xi * xi;
  const double coupling_p = (1.0 - tau) * (1.0 - tau);
  const double c_x = 4.0 - g2 * coupling_x;
  const double c_p = 4.0 - g2 * coupling_p;
  const bool soft_x = c_x < 0.0;
  const bool soft_p = c_p < 0.0;
  if (!soft_x && !soft_p) return Phase::Normal;
  if (soft_x && !soft_p) return Phase::XSrp;
  if (!soft_x && soft_p) return Phase::PSrp;
  return coupling_p > coupling_x ? Phase::PSrp : Phase::XSrp;
}

PhaseLabel classify(double tau, double kappa, double gtilde) {
  if (!std::isfinite(tau) || !std::isfinite(kappa) || !std::isfinite(gtilde)) {
    throw std::invalid_argument("classify: non-finite input");
  }
  if (gtilde < 0.0) throw std::invalid_argument("classify: gtilde must be >= 0");
  if (kappa < 0.0) throw std::invalid_argument("classify: kappa must be >= 0");

  PhaseLabel label;
  label.phase = classify_by_boundaries(tau, kappa, gtilde);

  const std::array<double, 3> candidates{gc_x_raw(tau, kappa), gc_p_raw(tau),
                                         gc_first_order_raw(tau, kappa)};
  double best = kInf;
  for (double b : candidates) {
    if (!std::isfinite(b) || !(b > 0.0)) continue;
    const double h = 1e-9 * b;
    if (classify_by_boundaries(tau, kappa, b - h) == classify_by_boundaries(tau, kappa, b + h)) {
      continue;
    }
    const double d = gtilde - b;
    if (std::abs(d) < std::abs(best)) best = d;
  }
  label.boundary_proximity = best;
  return label;
}

CriticalCoupling applicable_critical_coupling(double tau, double kappa) {
  const CriticalCoupling tri = gc_triple(tau, kappa);
  if (tri.valid()) return tri;
  const CriticalCoupling p = gc_p(tau, kappa);
  if (p.valid()) return p;
  const CriticalCoupling x = gc_x(tau, kappa);
  if (x.valid()) return x;
  return {std::numeric_limits<double>::quiet_NaN(), "no second-order boundary at this (tau, kappa)"};
}

const char* boundary_name(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::GcP: return "gc_p";
    case BoundaryKind::GcX: return "gc_x";
    case BoundaryKind::GcFirstOrder: return "gc_1";
    case BoundaryKind::Triple: return "triple";
  }
  return "?";
}

std::vector<BoundaryCurve> boundary_curves(double kappa, Range tau_range, int samples) {
  if (samples < 2) throw std::invalid_argument("boundary_curves: need >= 2 samples");
  if (!std::isfinite(tau_range.lo) || !std::isfinite(tau_range.hi) ||
      !(tau_range.hi > tau_range.lo)) {
    throw std::invalid_argument("boundary_curves: invalid tau range");
  }
  if (!(kappa >= 0.0)) throw std::invalid_argument("boundary_curves: kappa must be >= 0");

  const auto taus = linspace(tau_range, samples);
  std::vector<BoundaryCurve> out;

  auto sample_curve = [&](BoundaryKind kind, auto fn, std::string validity) {
    BoundaryCurve c{kind, kappa, {}, std::move(validity)};
    c.samples.reserve(taus.size());
    for (double t : taus) {
      const CriticalCoupling v = fn(t, kappa);
      c.samples.push_back({t, v.value, v.valid()});
    }
    out.push_back(std::move(c));
  };
  sample_curve(BoundaryKind::GcP, gc_p, "tau != 1 and tau < kappa");
  sample_curve(BoundaryKind::GcX, gc_x, "(1 + tau)^2 > 4 kappa and tau > kappa");
  sample_curve(BoundaryKind::GcFirstOrder, gc_first_order, "tau > kappa > 0, tau != 1");

  BoundaryCurve tri{BoundaryKind::Triple, kappa, {}, "kappa == tau > 1"};
  if (kappa > 1.0 && kappa >= tau_range.lo && kappa <= tau_range.hi) {
    const CriticalCoupling t = gc_triple(kappa, kappa);
    tri.samples.push_back({kappa, t.value, t.valid()});
  }
  out.push_back(std::move(tri));
  return out;
}

PhaseGrid phase_diagram_grid(double kappa, Range tau_range, Range gtilde_range,
                             int tau_resolution, int gtilde_resolution, int jobs) {
  if (tau_resolution < 2 || gtilde_resolution < 2) {
    throw std::invalid_argument("phase_diagram_grid: resolution must be >= 2 per axis");
  }
  if (!std::isfinite(tau_range.lo) || !std::isfinite(tau_range.hi) ||
      !std::isfinite(gtilde_range.lo) || !std::isfinite(gtilde_range.hi) ||
      !(tau_range.hi > tau_range.lo) || !(gtilde_range.hi > gtilde_range.lo)) {
    throw std::invalid_argument("phase_diagram_grid: ranges must be finite and increasing");
  }
  if (gtilde_range.lo < 0.0) throw std::invalid_argument("phase_diagram_grid: gtilde >= 0");
  if (!(kappa >= 0.0)) throw std::invalid_argument("phase_diagram_grid: kappa must be >= 0");

  PhaseGrid grid;
  grid.kappa = kappa;
  grid.taus = linspace(tau_range, tau_resolution);
  grid.gtildes = linspace(gtilde_range, gtilde_resolution);

  const std::size_t nt = grid.taus.size();
  auto rows = parallel_map(grid.gtildes.size(), jobs, [&](std::size_t j) {
    std::vector<Phase> row(nt);
    for (std::size_t i = 0; i < nt; ++i) {
      row[i] = classify_by_boundaries(grid.taus[i], kappa, grid.gtildes[j]);
    }
    return row;
  });
  grid.labels.reserve(nt * grid.gtildes.size());
  for (const auto& row : rows) grid.labels.insert(grid.labels.end(), row.begin(), row.end());

  grid.boundaries = boundary_curves(kappa, tau_range, tau_resolution);
  return grid;
}

}  // namespace rabi
