#include <algorithm>
#include <cmath>
#include <thread>

#include <gtest/gtest.h>

#include "rabi/bogoliubov.hpp"
#include "rabi/criticality.hpp"
#include "rabi/spectra.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

using namespace rabi;

namespace {

int workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) v.push_back(lo + step * i);
  return v;
}

Sweep synthetic_sweep(const std::vector<double>& gts, double eta, double (*e0)(double)) {
  Sweep s;
  s.eta = eta;
  for (double gt : gts) {
    SweepPoint p;
    p.gtilde = gt;
    p.result.e0 = e0(gt);
    s.points.push_back(p);
  }
  return s;
}

}  // namespace

TEST(Spectra, DecoupledVacuum) {
  const SpectrumResult r = ground_spectrum(params_from_rescaled(0.0, 2.0, 3.0, 50.0));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.e0, -25.0, 1e-12);
  EXPECT_NEAR(r.gap, 1.0, 1e-12);
  EXPECT_NEAR(r.x2_a, 0.5, 1e-12);
  EXPECT_NEAR(r.p2_a, 0.5, 1e-12);
  EXPECT_NEAR(r.n0, 0.0, 1e-12);
}

TEST(Spectra, MatchesDenseOracle) {
  const ModelParams p = params_from_rescaled(1.0, 2.0, 3.0, 16.0);
  const SpectrumResult r = ground_spectrum(p);
  ASSERT_TRUE(r.converged);

  const int n_max = 512;
  const oracle::Dense d = oracle::diagonalize(oracle::hamiltonian(p.omega, p.delta, p.g, p.tau, p.kappa, n_max));
  const Eigen::VectorXd v = d.vectors.col(0);
  const double photons = v.dot(oracle::number(n_max) * v);
  const double x2 = v.dot(oracle::x_squared(n_max) * v);
  const double p2 = v.dot(oracle::p_squared(n_max) * v);
  const double parity = v.dot(oracle::parity(n_max) * v);
  const double gamma = bogoliubov_frame(p).gamma;

  EXPECT_NEAR(r.e0, d.values(0), 1e-8);
  EXPECT_NEAR(r.e1, d.values(1), 1e-8);
  EXPECT_NEAR(r.gap, d.values(1) - d.values(0), 1e-8);
  EXPECT_NEAR(r.photons, photons, 1e-6 * std::max(1.0, photons));
  EXPECT_NEAR(r.n0, photons / 16.0, 1e-6);
  EXPECT_NEAR(r.x2_a, x2, 1e-6 * x2);
  EXPECT_NEAR(r.p2_a, p2, 1e-6 * p2);
  EXPECT_NEAR(r.x2_b, gamma * x2, 1e-6 * gamma * x2);
  EXPECT_NEAR(r.p2_b, p2 / gamma, 1e-6 * p2);
  EXPECT_EQ(r.ground_parity, parity > 0 ? 1 : -1);
  EXPECT_NEAR(std::abs(parity), 1.0, 1e-8);
}

TEST(Spectra, SolverPathsAgree) {
  gen::for_all(10, [](gen::Gen& g, int i) {
    const ModelParams p = g.small_params();
    SolverOptions lz;
    lz.solver = SolverKind::Lanczos;
    const SpectrumResult a = spectrum_at(p, 256);
    const SpectrumResult b = spectrum_at(p, 256, lz);
    EXPECT_NEAR(a.e0, b.e0, 1e-8 * std::max(1.0, std::abs(a.e0))) << PROP_CONTEXT(i);
    EXPECT_NEAR(a.e1, b.e1, 1e-8 * std::max(1.0, std::abs(a.e1))) << PROP_CONTEXT(i);
  });
}

TEST(Spectra, PTypeExcitationGrowsWithSize) {
  // Deep in the p-type phase p2_b/eta settles to a positive constant and x2_b stays O(1).
  std::vector<double> ratio;
  for (double eta : {64.0, 256.0, 1024.0}) {
    const SpectrumResult r = ground_spectrum(params_from_rescaled(2.5, 2.0, 3.0, eta));
    ASSERT_TRUE(r.converged) << eta;
    ratio.push_back(r.p2_b / eta);
    EXPECT_LT(r.x2_b, 2.0) << eta;
  }
  EXPECT_GT(ratio[0], 0.0);
  const double d1 = std::abs(ratio[1] - ratio[0]);
  const double d2 = std::abs(ratio[2] - ratio[1]);
  EXPECT_LT(d2, 0.5 * d1);
  EXPECT_GT(ratio[2], 0.05);
}

TEST(Spectra, SweepBasics) {
  const Sweep s = sweep_coupling(2.0, 3.0, 16.0, 1.0, {0.0, 0.5, 1.0});
  ASSERT_EQ(s.points.size(), 3u);
  for (std::size_t i = 1; i < 3; ++i) EXPECT_LE(s.points[i].result.e0, s.points[i - 1].result.e0);
  // Same values from the dense oracle.
  for (const SweepPoint& pt : s.points) {
    const ModelParams p = params_from_rescaled(pt.gtilde, 2.0, 3.0, 16.0);
    const oracle::Dense d = oracle::diagonalize(oracle::hamiltonian(p.omega, p.delta, p.g, p.tau, p.kappa, 512));
    EXPECT_NEAR(pt.result.e0, d.values(0), 1e-8);
  }

  EXPECT_TRUE(sweep_coupling(2.0, 3.0, 16.0, 1.0, {}).points.empty());
  EXPECT_THROW(sweep_coupling(2.0, 3.0, 16.0, 1.0, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(sweep_coupling(2.0, 3.0, 16.0, 1.0, {0.5, 0.2}), std::invalid_argument);
}

TEST(Spectra, SweepIndependentOfJobs) {
  const auto gts = grid(0.2, 2.4, 0.2);
  const Sweep a = sweep_coupling(4.0, 3.0, 64.0, 1.0, gts, {}, 1);
  const Sweep b = sweep_coupling(4.0, 3.0, 64.0, 1.0, gts, {}, 5);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].result.e0, b.points[i].result.e0);
    EXPECT_EQ(a.points[i].result.x2_b, b.points[i].result.x2_b);
    EXPECT_EQ(a.points[i].result.n_max_used, b.points[i].result.n_max_used);
  }
}

TEST(Spectra, QuadratureSwitchAtFirstOrderLine) {
  const double g1 = 4.0 * std::sqrt(3.0) / 9.0;
  const Sweep s = sweep_coupling(4.0, 3.0, 512.0, 1.0, grid(0.70, 0.84, 0.01), {}, workers());
  int switches = 0;
  for (std::size_t i = 1; i < s.points.size(); ++i) {
    const auto& a = s.points[i - 1].result;
    const auto& b = s.points[i].result;
    ASSERT_TRUE(a.converged && b.converged);
    const bool xa = a.x2_b > a.p2_b;
    const bool xb = b.x2_b > b.p2_b;
    if (xa == xb) continue;
    ++switches;
    EXPECT_TRUE(xa);
    EXPECT_LE(s.points[i - 1].gtilde, g1);
    EXPECT_GE(s.points[i].gtilde, g1);
  }
  EXPECT_EQ(switches, 1);
}

TEST(Spectra, DerivativesExactOnQuadratic) {
  const double eta = 9.0;
  const double c = coupling_chain_factor(1.0, eta);
  EXPECT_DOUBLE_EQ(c, 1.5);
  const Sweep s = synthetic_sweep(grid(0.5, 1.5, 0.05), eta, [](double gt) {
    const double g = 1.5 * gt;
    return 3.0 * g * g - 2.0 * g + 0.25;
  });
  const auto d2 = energy_derivative(s, 2);
  const auto d1 = energy_derivative(s, 1);
  ASSERT_EQ(d2.size(), s.points.size());
  EXPECT_TRUE(d2.front().one_sided);
  EXPECT_TRUE(d2.back().one_sided);
  for (std::size_t i = 1; i + 1 < d2.size(); ++i) {
    EXPECT_FALSE(d2[i].one_sided);
    EXPECT_NEAR(d2[i].value, 6.0, 1e-10 * 6.0);
    const double g = 1.5 * d1[i].gtilde;
    EXPECT_NEAR(d1[i].value, 6.0 * g - 2.0, 1e-10 * std::abs(6.0 * g - 2.0) + 1e-12);
  }
}

TEST(Spectra, DerivativeErrors) {
  const Sweep two = synthetic_sweep({1.0, 1.1}, 4.0, [](double g) { return g; });
  EXPECT_THROW(energy_derivative(two, 2), std::invalid_argument);
  const Sweep uneven = synthetic_sweep({1.0, 1.1, 1.3}, 4.0, [](double g) { return g; });
  EXPECT_THROW(energy_derivative(uneven, 1), std::invalid_argument);
  const Sweep ok = synthetic_sweep({1.0, 1.1, 1.2}, 4.0, [](double g) { return g; });
  EXPECT_THROW(energy_derivative(ok, 3), std::invalid_argument);
}

TEST(Spectra, LocateSyntheticTransitions) {
  // Kink in E0' at 1.3: E0 = -|gt - 1.3|.
  const auto gts = grid(1.003, 1.603, 0.01);
  const Sweep kink = synthetic_sweep(gts, 4.0, [](double gt) { return -std::abs(gt - 1.3); });
  EXPECT_NEAR(locate_transition(kink, TransitionKind::FirstOrder), 1.3, 0.01);
  // Central differences at 1.283, 1.293, 1.303, 1.313 give 1, 0.7, -0.3, -1:
  // the unit-2 jump is spread over two intervals, the largest being 1.
  EXPECT_NEAR(max_slope_jump(kink), 1.0 / coupling_chain_factor(1.0, 4.0), 1e-9);

  // Smooth peak of -E0'' at 1.3 (E0'' = -eps/((x)^2 + eps^2)).
  const Sweep peak = synthetic_sweep(gts, 4.0, [](double gt) {
    const double x = gt - 1.3, e = 0.05;
    return -(x * std::atan(x / e) - 0.5 * e * std::log(x * x + e * e));
  });
  EXPECT_NEAR(locate_transition(peak, TransitionKind::SecondOrder), 1.3, 0.01);

  // Monotone curvature: the extremum sits at the edge.
  const Sweep edge = synthetic_sweep(gts, 4.0, [](double gt) { return -gt * gt * gt * gt; });
  EXPECT_THROW(locate_transition(edge, TransitionKind::SecondOrder), std::runtime_error);
}

TEST(Spectra, SecondOrderPeakDriftsTowardCriticalCoupling) {
  const int jobs = workers();
  auto peak = [&](double eta, double lo, double hi) {
    const Sweep s = sweep_coupling(2.0, 3.0, eta, 1.0, grid(lo, hi, 0.01), {}, jobs);
    for (const SweepPoint& p : s.points) EXPECT_TRUE(p.result.converged) << eta << " " << p.gtilde;
    return locate_transition(s, TransitionKind::SecondOrder);
  };
  const double p6 = peak(64.0, 1.5, 3.0);
  const double p8 = peak(256.0, 1.8, 2.6);
  const double p10 = peak(1024.0, 1.8, 2.4);
  const double p12 = peak(4096.0, 1.8, 2.3);
  EXPECT_GT(p6, p8);
  EXPECT_GT(p8, p10);
  EXPECT_GT(p10, p12);
  EXPECT_GT(p12, 2.0);
  EXPECT_LT(std::abs(p12 - 2.0), 0.05);
}

TEST(Spectra, FirstOrderTransitionLocated) {
  const Sweep s = sweep_coupling(3.0, 1.0, 1024.0, 1.0, grid(1.6, 1.9, 0.01), {}, workers());
  EXPECT_NEAR(locate_transition(s, TransitionKind::FirstOrder), std::sqrt(3.0), 0.05);
}

TEST(Spectra, GroundStateInvariants) {
  gen::for_all(30, [](gen::Gen& g, int i) {
    const ModelParams p = g.small_params(16.0, 3.0);
    const SpectrumResult r = ground_spectrum(p);
    ASSERT_TRUE(r.converged) << PROP_CONTEXT(i) << " " << gen::describe(p);
    const double gamma = bogoliubov_frame(p).gamma;
    EXPECT_GE(r.gap, -1e-12) << PROP_CONTEXT(i);
    EXPECT_GE(r.x2_a * r.p2_a, 0.25 - 1e-9) << PROP_CONTEXT(i);
    EXPECT_NEAR(r.x2_b, gamma * r.x2_a, 1e-10 * r.x2_b) << PROP_CONTEXT(i);
    EXPECT_NEAR(r.p2_b, r.p2_a / gamma, 1e-10 * r.p2_b) << PROP_CONTEXT(i);
    EXPECT_GE(r.n0, 0.0);
    EXPECT_TRUE(r.ground_parity == 1 || r.ground_parity == -1);
    EXPECT_NEAR(r.gamma, gamma, 1e-12 * gamma);
    EXPECT_LE(r.tail_weight, SolverOptions{}.tail_tol);
  });
}

TEST(Spectra, GroundStateHasDefiniteParity) {
  gen::for_all(8, [](gen::Gen& g, int i) {
    const ModelParams p = g.small_params(8.0, 1.5);
    const int n_max = 200;
    const oracle::Dense d = oracle::diagonalize(oracle::hamiltonian(p.omega, p.delta, p.g, p.tau, p.kappa, n_max));
    if (d.values(1) - d.values(0) < 1e-6) return;
    const Eigen::VectorXd v = d.vectors.col(0);
    const double par = v.dot(oracle::parity(n_max) * v);
    EXPECT_NEAR(std::abs(par), 1.0, 1e-8) << PROP_CONTEXT(i);
    EXPECT_EQ(spectrum_at(p, n_max).ground_parity, par > 0 ? 1 : -1) << PROP_CONTEXT(i);
  });
}

TEST(Spectra, EnergyNeverRisesWithCutoff) {
  gen::for_all(10, [](gen::Gen& g, int i) {
    const ModelParams p = g.small_params(16.0, 3.0);
    double prev = INFINITY;
    for (int n_max : {16, 32, 64, 128, 256}) {
      const double e0 = spectrum_at(p, n_max).e0;
      EXPECT_LE(e0, prev + 1e-10 * std::max(1.0, std::abs(e0))) << PROP_CONTEXT(i);
      prev = e0;
    }
  });
}

TEST(Spectra, NormalPhaseFlatness) {
  struct Line {
    double tau, kappa;
  };
  for (const Line& l : {Line{2.0, 3.0}, Line{4.0, 3.0}, Line{1.0, 0.0}, Line{-2.0, 0.5}}) {
    const double gc = applicable_critical_coupling(l.tau, l.kappa).value;
    for (double eta : {256.0, 1024.0}) {
      for (double f : {0.1, 0.25, 0.4, 0.5}) {
        const SpectrumResult r = ground_spectrum(params_from_rescaled(f * gc, l.tau, l.kappa, eta));
        EXPECT_LT(r.n0, 10.0 / eta) << l.tau << " " << l.kappa << " " << eta << " " << f;
      }
    }
  }
}

TEST(Spectra, OptionsValidated) {
  SolverOptions o;
  o.rel_tol = 0.0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
  o = {};
  o.n_max_initial = 64;
  o.n_max_ceiling = 32;
  EXPECT_THROW(o.validate(), std::invalid_argument);
  o = {};
  o.n_eigen = 0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
}

TEST(Spectra, CeilingReportsUnconverged) {
  SolverOptions o;
  o.n_max_initial = 8;
  o.n_max_ceiling = 16;
  o.adaptive_start = false;
  const SpectrumResult r = ground_spectrum(params_from_rescaled(3.0, 2.0, 3.0, 256.0), o);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.n_max_used, 16);
}
