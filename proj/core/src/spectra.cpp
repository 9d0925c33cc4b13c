#include "rabi/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rabi/bogoliubov.hpp"
#include "rabi/eigensolver.hpp"
#include "rabi/parallel.hpp"

namespace rabi {

const char* solver_name(SolverKind k) {
  switch (k) {
    case SolverKind::Auto: return "auto";
    case SolverKind::Direct: return "direct";
    case SolverKind::Lanczos: return "lanczos";
  }
  return "?";
}

void SolverOptions::validate() const {
  if (n_max_initial < 1) throw std::invalid_argument("n_max_initial must be >= 1");
  if (n_max_ceiling < n_max_initial) throw std::invalid_argument("n_max_initial must not exceed n_max_ceiling");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be > 0");
  if (!(tail_tol > 0.0)) throw std::invalid_argument("tail_tol must be > 0");
  if (dense_threshold < 1) throw std::invalid_argument("dense_threshold must be > 0");
  if (n_eigen < 2) throw std::invalid_argument("n_eigen must be >= 2");
}

namespace {

struct SectorSolve {
  std::vector<double> values;
  Eigen::VectorXd ground;
};

SectorSolve solve_sector(const RabiCouplings& c, int n_max, Parity parity, const SolverOptions& opts) {
  const BandedSymmetric h = sector_hamiltonian(c, n_max, parity);
  const int count = std::min<int>(opts.n_eigen, static_cast<int>(h.n));
  EigenPairs pairs = opts.solver == SolverKind::Lanczos ? lanczos_lowest(h, count, 1)
                                                        : banded_lowest(h, count, 1);
  return {std::move(pairs.values), pairs.vectors.col(0)};
}

bool close_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

bool stable(const SpectrumResult& a, const SpectrumResult& b, double rel_tol, double omega) {
  const double etol = rel_tol * omega;
  return close_abs(a.e0, b.e0, etol) && close_abs(a.e1, b.e1, etol) &&
         close_abs(a.gap_same_parity, b.gap_same_parity, etol) &&
         close_rel(a.x2_a, b.x2_a, rel_tol) && close_rel(a.p2_a, b.p2_a, rel_tol) &&
         close_rel(a.photons, b.photons, rel_tol);
}

}  // namespace

double mean_field_photons(const ModelParams& params) {
  params.validate();
  const double d = params.d_strength();
  const double dl = params.delta;
  auto branch = [dl](double a, double b) {
    if (!(b > 0.0)) return 0.0;
    const double u = b / (4.0 * a * a) - dl * dl / (4.0 * b);
    return u > 0.0 ? 0.5 * u : 0.0;
  };
  const double g2 = params.g * params.g;
  const double nx = branch(0.5 * params.omega + 2.0 * d, 0.5 * g2 * (1.0 + params.tau) * (1.0 + params.tau));
  const double np = branch(0.5 * params.omega, 0.5 * g2 * (1.0 - params.tau) * (1.0 - params.tau));
  return std::max(nx, np);
}

SpectrumResult spectrum_at(const ModelParams& params, int n_max, const SolverOptions& opts) {
  params.validate();
  opts.validate();
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");

  const RabiCouplings c = RabiCouplings::from(params);
  const SectorSolve even = solve_sector(c, n_max, Parity::Even, opts);
  const SectorSolve odd = solve_sector(c, n_max, Parity::Odd, opts);

  const bool even_ground = even.values[0] <= odd.values[0];
  const SectorSolve& gs = even_ground ? even : odd;
  const SectorSolve& other = even_ground ? odd : even;

  SpectrumResult r;
  r.e0 = gs.values[0];
  r.e1 = std::min(gs.values[1], other.values[0]);
  r.gap = std::max(r.e1 - r.e0, 0.0);
  r.gap_same_parity = gs.values[1] - gs.values[0];
  r.ground_parity = even_ground ? 1 : -1;
  r.n_max_used = n_max;

  const Eigen::VectorXd& psi = gs.ground;
  double n_avg = 0.0;
  double a2 = 0.0;  // <a^2>; n and n-2 share the qubit state inside a sector
  double tail = 0.0;
  const double tail_from = 0.9 * n_max;
  for (Eigen::Index n = 0; n < psi.size(); ++n) {
    const double w = psi(n) * psi(n);
    const double dn = static_cast<double>(n);
    n_avg += dn * w;
    if (n >= 2) a2 += psi(n - 2) * psi(n) * std::sqrt(dn * (dn - 1.0));
    if (dn > tail_from) tail += w;
  }
  r.photons = n_avg;
  r.n0 = n_avg / params.eta();
  r.x2_a = n_avg + 0.5 + a2;
  r.p2_a = n_avg + 0.5 - a2;
  r.gamma = bogoliubov_frame(params).gamma;
  r.x2_b = r.gamma * r.x2_a;
  r.p2_b = r.p2_a / r.gamma;
  r.tail_weight = tail;
  r.converged = tail <= opts.tail_tol;
  return r;
}

SpectrumResult ground_spectrum(const ModelParams& params, const SolverOptions& opts) {
  params.validate();
  opts.validate();

  int n = opts.n_max_initial;
  if (opts.adaptive_start) {
    const double guess = 2.5 * mean_field_photons(params) + 32.0;
    if (guess > n) n = static_cast<int>(std::min<double>(std::ceil(guess), opts.n_max_ceiling));
  }
  // Leave room for at least one doubling.
  n = std::max(1, std::min(n, opts.n_max_ceiling / 2));

  SpectrumResult prev = spectrum_at(params, n, opts);
  for (;;) {
    const long long next_ll = 2LL * n;
    if (next_ll > opts.n_max_ceiling) {
      prev.converged = false;
      return prev;
    }
    const int next = static_cast<int>(next_ll);
    SpectrumResult cur = spectrum_at(params, next, opts);
    const bool ok = stable(prev, cur, opts.rel_tol, params.omega) && cur.tail_weight <= opts.tail_tol;
    if (ok) {
      cur.converged = true;
      return cur;
    }
    prev = cur;
    n = next;
  }
}

Sweep sweep_coupling(double tau, double kappa, double eta, double omega,
                     const std::vector<double>& gtildes, const SolverOptions& opts, int jobs) {
  for (std::size_t i = 1; i < gtildes.size(); ++i) {
    if (!(gtildes[i] > gtildes[i - 1])) {
      throw std::invalid_argument("sweep_coupling: gtilde list must be strictly increasing");
    }
  }
  Sweep s{tau, kappa, eta, omega, {}};
  if (gtildes.empty()) return s;
  // Validate once up front so bad input fails before any work is scheduled.
  (void)params_from_rescaled(gtildes.front(), tau, kappa, eta, omega);
  opts.validate();

  auto results = parallel_map(gtildes.size(), jobs, [&](std::size_t i) {
    return ground_spectrum(params_from_rescaled(gtildes[i], tau, kappa, eta, omega), opts);
  });
  s.points.reserve(gtildes.size());
  for (std::size_t i = 0; i < gtildes.size(); ++i) s.points.push_back({gtildes[i], results[i]});
  return s;
}

double coupling_chain_factor(double omega, double eta) {
  return 0.5 * std::sqrt(omega * (eta * omega));
}

std::vector<DerivativeSample> energy_derivative(const Sweep& sweep, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("energy_derivative: order must be 1 or 2");
  const auto& p = sweep.points;
  const std::size_t n = p.size();
  if (n < static_cast<std::size_t>(order + 1)) {
    throw std::invalid_argument("energy_derivative: too few points for this order");
  }
  const double step = p[1].gtilde - p[0].gtilde;
  for (std::size_t i = 1; i < n; ++i) {
    const double s = p[i].gtilde - p[i - 1].gtilde;
    if (std::abs(s - step) > 1e-6 * std::abs(step)) {
      throw std::invalid_argument("energy_derivative: gtilde grid must be uniform");
    }
  }
  const double h = step * coupling_chain_factor(sweep.omega, sweep.eta);
  auto e = [&](std::size_t i) { return p[i].result.e0; };

  std::vector<DerivativeSample> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i].gtilde = p[i].gtilde;

  if (order == 1) {
    out[0] = {p[0].gtilde, (e(1) - e(0)) / h, true};
    out[n - 1] = {p[n - 1].gtilde, (e(n - 1) - e(n - 2)) / h, true};
    for (std::size_t i = 1; i + 1 < n; ++i) out[i].value = (e(i + 1) - e(i - 1)) / (2.0 * h);
  } else {
    const double h2 = h * h;
    out[0] = {p[0].gtilde, (e(0) - 2.0 * e(1) + e(2)) / h2, true};
    out[n - 1] = {p[n - 1].gtilde, (e(n - 1) - 2.0 * e(n - 2) + e(n - 3)) / h2, true};
    for (std::size_t i = 1; i + 1 < n; ++i) out[i].value = (e(i + 1) - 2.0 * e(i) + e(i - 1)) / h2;
  }
  return out;
}

double max_slope_jump(const Sweep& sweep) {
  const auto d1 = energy_derivative(sweep, 1);
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < d1.size(); ++i) best = std::max(best, std::abs(d1[i + 1].value - d1[i].value));
  return best;
}

double locate_transition(const Sweep& sweep, TransitionKind kind) {
  if (kind == TransitionKind::SecondOrder) {
    const auto d2 = energy_derivative(sweep, 2);
    const std::size_t n = d2.size();
    if (n < 5) throw std::invalid_argument("locate_transition: need >= 5 points");
    std::size_t best = 1;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (std::abs(d2[i].value) > std::abs(d2[best].value)) best = i;
    }
    if (best == 1 || best == n - 2) {
      throw std::runtime_error("locate_transition: |E0''| peaks at the edge of the grid");
    }
    const double ym = std::abs(d2[best - 1].value);
    const double y0 = std::abs(d2[best].value);
    const double yp = std::abs(d2[best + 1].value);
    const double h = d2[best + 1].gtilde - d2[best].gtilde;
    const double denom = ym - 2.0 * y0 + yp;
    double shift = 0.0;
    if (denom < 0.0) shift = std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
    return d2[best].gtilde + shift * h;
  }

  const auto d1 = energy_derivative(sweep, 1);
  const std::size_t n = d1.size();
  if (n < 4) throw std::invalid_argument("locate_transition: need >= 4 points");
  std::size_t best = 0;
  double jump = -1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double j = std::abs(d1[i + 1].value - d1[i].value);
    if (j > jump) {
      jump = j;
      best = i;
    }
  }
  if (best == 0 || best + 2 == n) {
    throw std::runtime_error("locate_transition: slope jump at the edge of the grid");
  }
  return 0.5 * (d1[best].gtilde + d1[best + 1].gtilde);
}

}  // namespace rabi
