#include "rabi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "rabi/bogoliubov.hpp"
#include "rabi/criticality.hpp"
#include "rabi/effective.hpp"
#include "rabi/model.hpp"
#include "rabi/scaling.hpp"
#include "rabi/spectra.hpp"

namespace rabi {

namespace {

class Suite {
 public:
  // Records observed <= bound.
  void le(const char* module, const char* name, double observed, double bound) {
    out_.push_back({module, name, observed <= bound, observed, bound});
  }
  void ok(const char* module, const char* name, bool cond) {
    out_.push_back({module, name, cond, cond ? 1.0 : 0.0, 1.0});
  }
  std::vector<CheckResult> take() { return std::move(out_); }

 private:
  std::vector<CheckResult> out_;
};

Eigen::VectorXd sorted_lowest(const Eigen::MatrixXd& h, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(k);
}

void model_checks(Suite& s, const VerifyOptions& opts, std::mt19937& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double herm = 0.0, comm = 0.0;
  for (int i = 0; i < 10; ++i) {
    const ModelParams p = params_from_rescaled(3.0 * u01(rng), 6.0 * u01(rng) - 3.0, 4.0 * u01(rng),
                                               1.0 + 15.0 * u01(rng));
    HamiltonianMatrix h = build_hamiltonian(p, {40});
    if (opts.inject_hermiticity_fault && i == 0) h = h.with_entry_shift(0, 3, 1e-3 * h.max_abs());
    herm = std::max(herm, hermiticity_defect(h));
    const HamiltonianMatrix par = parity_operator({40});
    comm = std::max(comm, commutator_max_abs(h, par) / h.max_abs());
  }
  s.le("core-model", "hermiticity", herm, 1e-12);
  s.le("core-model", "parity commutation", comm, 1e-10);

  const HamiltonianMatrix par = parity_operator({17});
  Eigen::MatrixXd pd = par.to_dense();
  s.le("core-model", "parity involution", (pd * pd - Eigen::MatrixXd::Identity(pd.rows(), pd.cols())).cwiseAbs().maxCoeff(), 0.0);

  double round = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double gt = 4.0 * u01(rng), tau = 6.0 * u01(rng) - 3.0, ka = 4.0 * u01(rng);
    const double eta = std::exp(6.0 * u01(rng)), om = 0.1 + 3.0 * u01(rng);
    const RescaledParams r = rescaled_coupling(params_from_rescaled(gt, tau, ka, eta, om));
    round = std::max({round, std::abs(r.gtilde - gt) / std::max(gt, 1e-300), std::abs(r.eta - eta) / eta,
                      std::abs(r.omega - om) / om});
  }
  s.le("core-model", "rescaled round trip", round, 1e-14);

  // Enlarging the basis never raises the ground energy.
  double rise = 0.0;
  SolverOptions so;
  for (const auto& [gt, tau, ka] : {std::tuple{1.0, 2.0, 3.0}, {2.5, 2.0, 3.0}, {0.7, 4.0, 3.0}}) {
    const ModelParams p = params_from_rescaled(gt, tau, ka, 16.0);
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 16; n <= 256; n *= 2) {
      const double e = spectrum_at(p, n, so).e0;
      rise = std::max(rise, e - prev);
      prev = e;
    }
  }
  s.le("core-model", "variational monotonicity", rise, 1e-9);
}

void bogoliubov_checks(Suite& s, std::mt19937& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double norm = 0.0, elim = 0.0, gam = 0.0, plus = 0.0, minus = 0.0;
  for (int i = 0; i < 50; ++i) {
    const ModelParams p = params_from_rescaled(3.0 * u01(rng), 6.0 * u01(rng) - 3.0, 5.0 * u01(rng),
                                               1.0 + 30.0 * u01(rng));
    const BogoliubovFrame f = bogoliubov_frame(p);
    norm = std::max(norm, std::abs(f.mu * f.mu - f.nu * f.nu - 1.0));
    const double d = p.d_strength();
    elim = std::max(elim, std::abs(d * (f.mu - f.nu) * (f.mu - f.nu) - p.omega * f.mu * f.nu) / p.omega);
    gam = std::max(gam, std::abs(f.gamma - std::sqrt(1.0 + p.kappa * p.gtilde() * p.gtilde())));
    const double scale = std::max(p.g, 1e-300);
    plus = std::max(plus, std::abs((f.g_rot + f.g_crot) - p.g * (1.0 + p.tau) * (f.mu - f.nu)) / scale);
    minus = std::max(minus, std::abs((f.g_rot - f.g_crot) - p.g * (1.0 - p.tau) * (f.mu + f.nu)) / scale);
  }
  s.le("bogoliubov", "mu^2 - nu^2 = 1", norm, 1e-12);
  s.le("bogoliubov", "A^2 term eliminated", elim, 1e-12);
  s.le("bogoliubov", "gamma closed form", gam, 1e-12);
  s.le("bogoliubov", "g'(1 + tau') identity", plus, 1e-12);
  s.le("bogoliubov", "g'(1 - tau') identity", minus, 1e-12);

  double lim = 0.0;
  for (double k : {1e-4, 1e-6, 1e-8, 1e-10}) {
    const ModelParams p = params_from_rescaled(1.5, 2.0, k, 8.0);
    const BogoliubovFrame f = bogoliubov_frame(p);
    const double x = k * 1.5 * 1.5;
    // zeta ~ x/4 and gamma - 1 ~ x/2 to first order.
    lim = std::max({lim, std::abs(f.zeta / (x / 4.0) - 1.0), std::abs((f.gamma - 1.0) / (x / 2.0) - 1.0)});
  }
  s.le("bogoliubov", "kappa -> 0 limit", lim, 1e-2);

  double spec = 0.0;
  for (const auto& [tau, ka, gt] : {std::tuple{2.0, 3.0, 1.0}, {1.0, 1.0, 1.0}}) {
    const ModelParams p = params_from_rescaled(gt, tau, ka, 4.0);
    const Eigen::VectorXd a = sorted_lowest(build_hamiltonian(p, {200}).to_dense(), 5);
    const Eigen::VectorXd b = sorted_lowest(transformed_hamiltonian(p, {200}).to_dense(), 5);
    spec = std::max(spec, (a - b).cwiseAbs().maxCoeff());
  }
  s.le("bogoliubov", "spectral invariance", spec, 1e-6);
}

void criticality_checks(Suite& s) {
  double coal = 0.0;
  for (double t : {1.5, 2.0, 3.0, 5.0, 10.0}) {
    const double tri = 2.0 / (t - 1.0);
    coal = std::max({coal, std::abs(gc_p(t, t).value - tri), std::abs(gc_x(t, t).value - tri),
                     std::abs(gc_first_order(t, t).value - tri), std::abs(gc_triple(t, t).value - tri)});
  }
  s.le("criticality", "boundaries coalesce at tau = kappa", coal, 1e-12);

  double selfc = 0.0;
  for (double t : {0.5, 2.0, 3.0, 4.0, 7.0}) {
    for (double k : {0.1, 0.4, 1.0, 2.5}) {
      if (!(t > k)) continue;
      const CriticalCoupling g1 = gc_first_order(t, k);
      if (!g1.valid()) continue;
      selfc = std::max(selfc, std::abs(kappa_c(t, g1.value) - k) / k);
    }
  }
  s.le("criticality", "kappa_c(gc_1) = kappa", selfc, 1e-12);

  // Even tau resolution keeps tau = 0 (the kappa = kappa_c line) off the grid.
  const PhaseGrid g = phase_diagram_grid(0.0, {-3.0, 3.0}, {0.0, 4.0}, 60, 81);
  int mirror_bad = 0;
  for (std::size_t j = 0; j < g.gtildes.size(); ++j) {
    for (std::size_t i = 0; i < g.taus.size(); ++i) {
      const Phase a = g.at(i, j);
      const Phase b = g.at(g.taus.size() - 1 - i, j);
      const Phase mirrored = a == Phase::XSrp ? Phase::PSrp : a == Phase::PSrp ? Phase::XSrp : Phase::Normal;
      if (b != mirrored) ++mirror_bad;
    }
  }
  s.le("criticality", "kappa = 0 mirror symmetry", mirror_bad, 0.0);

  int disagree = 0;
  for (double k : {0.0, 1.0, 3.0}) {
    const PhaseGrid pg = phase_diagram_grid(k, {-2.0, 6.0}, {0.0, 4.0}, 41, 41);
    for (std::size_t j = 0; j < pg.gtildes.size(); ++j) {
      for (std::size_t i = 0; i < pg.taus.size(); ++i) {
        const double t = pg.taus[i], gt = pg.gtildes[j];
        if (std::abs(classify(t, k, gt).boundary_proximity) <= 1e-9) continue;
        if (classify_by_coefficients(t, k, gt) != pg.at(i, j)) ++disagree;
      }
    }
  }
  s.le("criticality", "classification routes agree", disagree, 0.0);
}

void spectra_checks(Suite& s, std::mt19937& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  SolverOptions lz;
  lz.solver = SolverKind::Lanczos;
  double oracle = 0.0, unc = 0.0, frame = 0.0, purity = 0.0;
  const int n_max = 96;
  for (int i = 0; i < 6; ++i) {
    const ModelParams p = params_from_rescaled(3.0 * u01(rng), 5.0 * u01(rng) - 1.0, 4.0 * u01(rng),
                                               1.0 + 15.0 * u01(rng));
    const SpectrumResult r = spectrum_at(p, n_max, lz);
    const HamiltonianMatrix h = build_hamiltonian(p, {n_max});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.to_dense());
    oracle = std::max({oracle, std::abs(r.e0 - es.eigenvalues()(0)), std::abs(r.e1 - es.eigenvalues()(1))});
    unc = std::max(unc, 0.25 - r.x2_a * r.p2_a);
    frame = std::max({frame, std::abs(r.x2_b / (r.gamma * r.x2_a) - 1.0), std::abs(r.p2_b * r.gamma / r.p2_a - 1.0)});
    if (es.eigenvalues()(1) - es.eigenvalues()(0) > 1e-6) {
      const Eigen::VectorXd v = es.eigenvectors().col(0);
      const double pe = v.dot(parity_operator({n_max}).apply(v));
      purity = std::max(purity, 1.0 - std::abs(pe));
    }
  }
  s.le("spectra", "sector solve matches dense oracle", oracle, 1e-8);
  s.le("spectra", "uncertainty bound", unc, 1e-9);
  s.le("spectra", "frame relation", frame, 1e-10);
  s.le("spectra", "ground state parity purity", purity, 1e-8);

  const SpectrumResult vac = ground_spectrum(params_from_rescaled(0.0, 2.0, 3.0, 16.0));
  s.le("spectra", "decoupled vacuum", std::max({std::abs(vac.e0 + 8.0), std::abs(vac.gap - 1.0), vac.n0}), 1e-10);
}

void effective_checks(Suite& s) {
  double cres = 0.0, fgap = 0.0;
  for (const auto& [tau, ka, gt, br] :
       {std::tuple{4.0, 3.0, 0.65, Branch::X}, {2.0, 3.0, 2.5, Branch::P}, {3.0, 3.0, 1.2, Branch::P},
        {1.0, 0.0, 1.5, Branch::X}}) {
    const EffectiveFrame f = effective_frame(tau, ka, gt, 16.0, br);
    for (double c : constraint_residuals(f)) cres = std::max(cres, std::abs(c));
    const double fac = br == Branch::X ? xsrp_gap(tau, ka, gt) : psrp_gap(tau, ka, gt);
    fgap = std::max(fgap, std::abs(frame_gap(f) - fac));
  }
  s.le("effective", "branch constraint residuals", cres, 1e-10);
  s.le("effective", "general gap equals factored form", fgap, 1e-10);

  const double h = 1e-10;
  const double close = std::max({normal_gap(2.0, 3.0, 2.0 - h), psrp_gap(2.0, 3.0, 2.0 + h),
                                 normal_gap(4.0, 3.0, 2.0 / std::sqrt(13.0) - h),
                                 xsrp_gap(4.0, 3.0, 2.0 / std::sqrt(13.0) + h)});
  s.le("effective", "two-sided gap closure", close, 1e-4);

  const double g1 = gc_first_order(4.0, 3.0).value;
  s.le("effective", "gapless on the first-order line", std::max(xsrp_gap(4.0, 3.0, g1), psrp_gap(4.0, 3.0, g1)), 1e-6);
}

void scaling_checks(Suite& s) {
  // Planted family on shared scaled nodes: O = t^b F(t eta^n).
  const double b = 0.5, n = 2.0 / 3.0;
  FssDataset d;
  d.observable = Observable::Gap;
  d.gc = 2.0;
  for (double eta : {64.0, 128.0, 256.0, 512.0}) {
    for (int k = 0; k < 12; ++k) {
      const double x = 0.5 * std::pow(1.35, k);
      const double t = x / std::pow(eta, n);
      if (t < d.t_min || t > d.t_max) continue;
      d.rows.push_back({eta, d.gc * (1.0 - t), std::pow(t, b) * (1.0 + 1.0 / x)});
    }
  }
  s.le("scaling", "planted collapse residual", collapse(d, b, n).residual, 1e-10);

  std::vector<std::pair<double, double>> pts;
  for (double eta : {32.0, 64.0, 128.0, 256.0, 512.0, 1024.0}) pts.emplace_back(eta, 7.0 * std::pow(eta, -2.0 / 3.0));
  s.le("scaling", "power law exact", std::abs(fit_critical_powerlaw(pts).exponent - 2.0 / 3.0), 1e-10);

  FssDataset perm = d;
  std::reverse(perm.rows.begin(), perm.rows.end());
  for (auto& r : perm.rows) r.value *= 3.7;
  const double r0 = collapse(d, 1.0, 1.0).residual;
  const double r1 = collapse(perm, 1.0, 1.0).residual;
  s.le("scaling", "residual invariance", std::abs(r0 - r1) / std::max(r0, 1e-300), 1e-9);
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(const VerifyOptions& opts) {
  Suite s;
  std::mt19937 rng(opts.seed);
  model_checks(s, opts, rng);
  bogoliubov_checks(s, rng);
  criticality_checks(s);
  spectra_checks(s, rng);
  effective_checks(s);
  scaling_checks(s);
  return s.take();
}

}  // namespace rabi
