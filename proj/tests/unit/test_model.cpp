#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "rabi/model.hpp"
#include "rabi/spectra.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

using namespace rabi;

TEST(Model, DecoupledLimitIsDiagonal) {
  ModelParams p;
  p.omega = 1.3;
  p.delta = 4.0;
  p.g = 0.0;
  p.tau = 2.0;
  p.kappa = 3.0;
  const Eigen::MatrixXd h = build_hamiltonian(p, {10}).to_dense();
  const Eigen::MatrixXd off = h - Eigen::MatrixXd(h.diagonal().asDiagonal());
  EXPECT_EQ(off.cwiseAbs().maxCoeff(), 0.0);
  for (int n = 0; n <= 10; ++n) {
    EXPECT_DOUBLE_EQ(h(basis_index(n, 0), basis_index(n, 0)), 1.3 * n - 2.0);
    EXPECT_DOUBLE_EQ(h(basis_index(n, 1), basis_index(n, 1)), 1.3 * n + 2.0);
  }
  EXPECT_DOUBLE_EQ(h.diagonal().minCoeff(), -2.0);
}

TEST(Model, FourByFourHandComputed) {
  ModelParams p;
  p.omega = 1.0;
  p.delta = 1.0;
  p.g = 0.5;
  p.tau = 1.0;
  p.kappa = 0.0;
  // Basis (0,-), (0,+), (1,-), (1,+).
  Eigen::Matrix4d expect;
  expect << -0.5, 0.0, 0.0, 0.5,
             0.0, 0.5, 0.5, 0.0,
             0.0, 0.5, 0.5, 0.0,
             0.5, 0.0, 0.0, 1.5;
  const Eigen::MatrixXd h = build_hamiltonian(p, {1}).to_dense();
  EXPECT_LT((h - expect).cwiseAbs().maxCoeff(), 1e-15);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const double s5 = std::sqrt(5.0);
  const double want[] = {(1.0 - s5) / 2.0, 0.0, 1.0, (1.0 + s5) / 2.0};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(es.eigenvalues()(i), want[i], 1e-14);
}

TEST(Model, MatchesKroneckerOracle) {
  gen::for_all(60, [](gen::Gen& g, int i) {
    const ModelParams p = g.small_params();
    const int n_max = g.integer(1, 40);
    const Eigen::MatrixXd h = build_hamiltonian(p, {n_max}).to_dense();
    const Eigen::MatrixXd ref = oracle::hamiltonian(p.omega, p.delta, p.g, p.tau, p.kappa, n_max);
    const double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
    EXPECT_LT((h - ref).cwiseAbs().maxCoeff(), 1e-13 * scale) << PROP_CONTEXT(i) << " " << gen::describe(p);
  });
}

TEST(Model, HermitianAndParityConserving) {
  gen::for_all(40, [](gen::Gen& g, int i) {
    const ModelParams p = g.small_params();
    const FockTruncation t{40};
    const HamiltonianMatrix h = build_hamiltonian(p, t);
    EXPECT_LE(hermiticity_defect(h), 1e-12) << PROP_CONTEXT(i);
    EXPECT_LT(commutator_max_abs(h, parity_operator(t)), 1e-10 * h.max_abs()) << PROP_CONTEXT(i);
  });
}

TEST(Model, ParityOperator) {
  const Eigen::MatrixXd p0 = parity_operator({0}).to_dense();
  ASSERT_EQ(p0.rows(), 2);
  EXPECT_EQ(p0(0, 0), 1.0);
  EXPECT_EQ(p0(1, 1), -1.0);

  for (int n_max : {0, 1, 7, 40}) {
    const Eigen::MatrixXd p = parity_operator({n_max}).to_dense();
    EXPECT_EQ((p * p - Eigen::MatrixXd::Identity(p.rows(), p.cols())).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((p - oracle::parity(n_max)).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Model, SectorBlocksAreRestrictions) {
  gen::for_all(30, [](gen::Gen& g, int i) {
    const ModelParams p = g.small_params();
    const int n_max = g.integer(2, 30);
    const Eigen::MatrixXd full = build_hamiltonian(p, {n_max}).to_dense();
    for (Parity par : {Parity::Even, Parity::Odd}) {
      const Eigen::MatrixXd blk = sector_hamiltonian(RabiCouplings::from(p), n_max, par).to_dense();
      for (int n = 0; n <= n_max; ++n) {
        for (int m = 0; m <= n_max; ++m) {
          const double want = full(basis_index(n, sector_spin(n, par)), basis_index(m, sector_spin(m, par)));
          ASSERT_NEAR(blk(n, m), want, 1e-14 * std::max(1.0, std::abs(want))) << PROP_CONTEXT(i);
        }
      }
    }
  });
}

TEST(Model, SectorSpinMatchesParityDefinition) {
  const Eigen::MatrixXd p = oracle::parity(9);
  for (int n = 0; n <= 9; ++n) {
    for (Parity par : {Parity::Even, Parity::Odd}) {
      const std::size_t k = basis_index(n, sector_spin(n, par));
      EXPECT_EQ(p(k, k), static_cast<double>(static_cast<int>(par)));
    }
  }
}

TEST(Model, RescaledParameters) {
  const ModelParams zero = params_from_rescaled(0.0, 2.0, 3.0, 50.0, 1.0);
  EXPECT_EQ(zero.g, 0.0);

  const ModelParams p = params_from_rescaled(2.0, 0.5, 1.0, 100.0, 1.0);
  EXPECT_DOUBLE_EQ(p.g, 10.0);
  EXPECT_DOUBLE_EQ(p.delta, 100.0);
  EXPECT_DOUBLE_EQ(p.d_strength(), 1.0 * 100.0 / 100.0);
  EXPECT_DOUBLE_EQ(p.eta(), 100.0);
}

TEST(Model, RescaledRoundTrip) {
  gen::for_all(200, [](gen::Gen& g, int i) {
    const double gt = g.gtilde(5.0), tau = g.tau(), kappa = g.kappa();
    const double eta = g.log_uniform(1e-2, 1e5), omega = g.log_uniform(1e-3, 1e3);
    const ModelParams p = params_from_rescaled(gt, tau, kappa, eta, omega);
    const RescaledParams r = rescaled_coupling(p);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    if (gt == 0.0) {
      EXPECT_EQ(r.gtilde, 0.0);
    } else {
      EXPECT_LE(rel(r.gtilde, gt), 1e-14) << PROP_CONTEXT(i);
    }
    EXPECT_LE(rel(r.eta, eta), 1e-14) << PROP_CONTEXT(i);
    EXPECT_LE(rel(r.omega, omega), 1e-14) << PROP_CONTEXT(i);
    EXPECT_EQ(r.tau, tau);
    EXPECT_EQ(r.kappa, kappa);
    EXPECT_DOUBLE_EQ(p.d_strength(), kappa * p.g * p.g / p.delta);
    EXPECT_LE(rel(p.gtilde() * p.gtilde(), 4.0 * p.g * p.g / (p.omega * p.delta)), 1e-14);
  });
}

TEST(Model, RejectsInvalidInput) {
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(params_from_rescaled(1.0, 1.0, 0.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(params_from_rescaled(1.0, 1.0, 0.0, 4.0, -1.0), std::invalid_argument);
  EXPECT_THROW(params_from_rescaled(-1.0, 1.0, 0.0, 4.0, 1.0), std::invalid_argument);

  ModelParams p;
  p.g = 0.3;
  EXPECT_THROW(build_hamiltonian(p, {0}), std::invalid_argument);
  ModelParams bad = p;
  bad.tau = nan;
  EXPECT_THROW(build_hamiltonian(bad, {4}), std::invalid_argument);
  bad = p;
  bad.delta = inf;
  EXPECT_THROW(build_hamiltonian(bad, {4}), std::invalid_argument);
  bad = p;
  bad.kappa = -0.1;
  EXPECT_THROW(build_hamiltonian(bad, {4}), std::invalid_argument);
}

TEST(Model, GroundEnergyNeverRisesWithCutoff) {
  gen::for_all(25, [](gen::Gen& g, int i) {
    const ModelParams p = g.small_params(8.0, 2.5);
    double prev = std::numeric_limits<double>::infinity();
    for (int n_max : {8, 16, 32, 64}) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_hamiltonian(p, {n_max}).to_dense(),
                                                        Eigen::EigenvaluesOnly);
      const double e0 = es.eigenvalues()(0);
      EXPECT_LE(e0, prev + 1e-10 * std::max(1.0, std::abs(e0))) << PROP_CONTEXT(i) << " " << gen::describe(p);
      prev = e0;
    }
  });
}

TEST(Model, NoLevelCollapseAtIsotropicMinimalA2) {
  // tau = 1, kappa = 1 at eta = 64: the gap never drops below 0.1 omega.
  for (double gt = 0.0; gt <= 5.0 + 1e-12; gt += 0.25) {
    const SpectrumResult r = ground_spectrum(params_from_rescaled(gt, 1.0, 1.0, 64.0));
    ASSERT_TRUE(r.converged) << "gtilde " << gt;
    EXPECT_GT(r.gap, 0.1) << "gtilde " << gt;
  }
}
