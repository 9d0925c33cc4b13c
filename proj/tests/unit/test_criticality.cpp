#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "rabi/criticality.hpp"
#include "support/gen.hpp"

using namespace rabi;

TEST(Criticality, KappaC) {
  EXPECT_DOUBLE_EQ(kappa_c(3.0, 1.0), 3.0);
  EXPECT_EQ(kappa_c(0.0, 1.7), 0.0);
  EXPECT_DOUBLE_EQ(kappa_c(2.0, 2.0), 2.0);
  EXPECT_LT(kappa_c(-1.0, 1.0), 0.0);
  EXPECT_TRUE(std::isinf(kappa_c(1.0, 1.0)));
  EXPECT_THROW(kappa_c(2.0, 0.0), std::invalid_argument);
}

TEST(Criticality, BoundaryValues) {
  EXPECT_NEAR(gc_p(2.0, 3.0).value, 2.0, 1e-12);
  EXPECT_TRUE(gc_p(2.0, 3.0).valid());
  EXPECT_NEAR(gc_p(-1.0, 0.0).value, 1.0, 1e-12);
  EXPECT_TRUE(gc_p(-1.0, 0.0).valid());
  EXPECT_FALSE(gc_p(1.0, 2.0).valid());
  EXPECT_FALSE(gc_p(3.0, 2.0).valid());

  EXPECT_NEAR(gc_x(4.0, 3.0).value, 2.0 / std::sqrt(13.0), 1e-12);
  EXPECT_NEAR(gc_x(4.0, 3.0).value, 0.554700, 1e-6);
  EXPECT_NEAR(gc_x(1.0, 0.0).value, 1.0, 1e-12);
  EXPECT_TRUE(gc_x(1.0, 0.0).valid());
  EXPECT_FALSE(gc_x(1.0, 1.0).valid());
  EXPECT_FALSE(gc_p(1.0, 1.0).valid());
  EXPECT_FALSE(gc_x(2.0, 3.0).valid());

  EXPECT_NEAR(gc_first_order(3.0, 1.0).value, std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(gc_first_order(4.0, 3.0).value, 4.0 * std::sqrt(3.0) / 9.0, 1e-12);
  EXPECT_TRUE(gc_first_order(4.0, 3.0).valid());
  EXPECT_FALSE(gc_first_order(3.0, 3.0).valid());
  EXPECT_FALSE(gc_first_order(3.0, 0.0).valid());

  EXPECT_NEAR(gc_triple(3.0, 3.0).value, 1.0, 1e-12);
  EXPECT_TRUE(gc_triple(3.0, 3.0).valid());
  EXPECT_NEAR(gc_triple(2.0, 2.0).value, 2.0, 1e-12);
  EXPECT_FALSE(gc_triple(1.0, 1.0).valid());
  EXPECT_FALSE(gc_triple(3.0, 2.0).valid());
}

TEST(Criticality, InvalidMarkersCarryReasons) {
  for (const CriticalCoupling& c : {gc_p(1.0, 2.0), gc_x(1.0, 1.0), gc_first_order(1.0, 0.0), gc_triple(0.5, 0.5)}) {
    EXPECT_FALSE(c.valid());
    EXPECT_FALSE(c.invalid_reason.empty());
  }
}

TEST(Criticality, ClassifyExamples) {
  EXPECT_EQ(classify(2.0, 3.0, 2.5).phase, Phase::PSrp);
  EXPECT_EQ(classify(4.0, 3.0, 0.6).phase, Phase::XSrp);
  EXPECT_EQ(classify(4.0, 3.0, 0.9).phase, Phase::PSrp);
  EXPECT_EQ(classify(2.0, 3.0, 1.0).phase, Phase::Normal);
  EXPECT_EQ(classify(1.0, 1.0, 5.0).phase, Phase::Normal);
  EXPECT_EQ(classify(1.0, 0.0, 1.5).phase, Phase::XSrp);
  EXPECT_EQ(classify(0.3, 2.0, 0.0).phase, Phase::Normal);
}

TEST(Criticality, TieBreakOnBoundaries) {
  EXPECT_EQ(classify(2.0, 3.0, 2.0).phase, Phase::Normal);
  EXPECT_EQ(classify(1.0, 0.0, 1.0).phase, Phase::Normal);
  const double g1 = gc_first_order(3.0, 1.0).value;
  EXPECT_EQ(classify(3.0, 1.0, g1).phase, Phase::XSrp);
}

TEST(Criticality, BoundaryProximity) {
  const PhaseLabel l = classify(2.0, 3.0, 2.5);
  EXPECT_NEAR(l.boundary_proximity, 0.5, 1e-12);
  EXPECT_NEAR(classify(2.0, 3.0, 1.75).boundary_proximity, -0.25, 1e-12);
  EXPECT_TRUE(std::isinf(classify(1.0, 1.0, 2.0).boundary_proximity));
  EXPECT_NEAR(classify(4.0, 3.0, 0.7).boundary_proximity, 0.7 - 4.0 * std::sqrt(3.0) / 9.0, 1e-12);
}

TEST(Criticality, ClassifyRejectsBadInput) {
  EXPECT_THROW(classify(1.0, 1.0, -0.1), std::invalid_argument);
  EXPECT_THROW(classify(1.0, -1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(classify(NAN, 1.0, 0.1), std::invalid_argument);
}

TEST(Criticality, FormulasCoalesceAtTriplePoint) {
  gen::for_all(200, [](gen::Gen& g, int i) {
    const double t = g.uniform(1.0 + 1e-3, 20.0);
    const double tri = gc_triple(t, t).value;
    EXPECT_NEAR(gc_p(t, t).value, tri, 1e-12 * tri) << PROP_CONTEXT(i);
    EXPECT_NEAR(gc_x(t, t).value, tri, 1e-12 * tri) << PROP_CONTEXT(i);
    EXPECT_NEAR(gc_first_order(t, t).value, tri, 1e-12 * tri) << PROP_CONTEXT(i);
  });
}

TEST(Criticality, KappaCSelfConsistentOnFirstOrderLine) {
  gen::for_all(300, [](gen::Gen& g, int i) {
    const double kappa = g.uniform(1e-3, 8.0);
    double tau = kappa + g.uniform(1e-3, 8.0);
    if (tau == 1.0) tau += 0.5;
    const CriticalCoupling c = gc_first_order(tau, kappa);
    ASSERT_TRUE(c.valid()) << PROP_CONTEXT(i);
    const double k = kappa_c(tau, c.value);
    EXPECT_LE(std::abs(k - kappa), 1e-12 * kappa) << PROP_CONTEXT(i) << " tau=" << tau << " kappa=" << kappa;
  });
}

TEST(Criticality, MirrorSymmetryWithoutA2) {
  auto mirror = [](Phase p) {
    return p == Phase::XSrp ? Phase::PSrp : (p == Phase::PSrp ? Phase::XSrp : Phase::Normal);
  };
  gen::for_all(2000, [&](gen::Gen& g, int i) {
    const double tau = g.uniform(-6.0, 6.0);
    const double gt = g.uniform(0.0, 5.0);
    if (tau == 0.0) return;
    EXPECT_EQ(classify(-tau, 0.0, gt).phase, mirror(classify(tau, 0.0, gt).phase))
        << PROP_CONTEXT(i) << " tau=" << tau << " gtilde=" << gt;
  });
}

TEST(Criticality, RoutesAgreeOffBoundaries) {
  gen::for_all(4000, [](gen::Gen& g, int i) {
    const double tau = g.uniform(-6.0, 6.0);
    const double kappa = g.kappa();
    const double gt = g.uniform(1e-3, 5.0);
    const PhaseLabel l = classify(tau, kappa, gt);
    if (std::abs(l.boundary_proximity) <= 1e-9) return;
    EXPECT_EQ(classify_by_coefficients(tau, kappa, gt), l.phase)
        << PROP_CONTEXT(i) << " tau=" << tau << " kappa=" << kappa << " gtilde=" << gt;
  });
}

TEST(Criticality, ApplicableCoupling) {
  EXPECT_DOUBLE_EQ(applicable_critical_coupling(2.0, 3.0).value, 2.0);
  EXPECT_DOUBLE_EQ(applicable_critical_coupling(3.0, 3.0).value, 1.0);
  EXPECT_NEAR(applicable_critical_coupling(4.0, 3.0).value, 2.0 / std::sqrt(13.0), 1e-15);
  EXPECT_FALSE(applicable_critical_coupling(1.0, 1.0).valid());
}

TEST(Criticality, BoundaryCurvesSatisfyFormulas) {
  const auto curves = boundary_curves(3.0, {-6.0, 6.0}, 241);
  std::set<BoundaryKind> kinds;
  bool triple_seen = false;
  for (const BoundaryCurve& c : curves) {
    kinds.insert(c.kind);
    EXPECT_FALSE(c.validity.empty());
    for (const BoundarySample& s : c.samples) {
      CriticalCoupling ref;
      switch (c.kind) {
        case BoundaryKind::GcP: ref = gc_p(s.tau, 3.0); break;
        case BoundaryKind::GcX: ref = gc_x(s.tau, 3.0); break;
        case BoundaryKind::GcFirstOrder: ref = gc_first_order(s.tau, 3.0); break;
        case BoundaryKind::Triple: ref = gc_triple(s.tau, 3.0); break;
      }
      EXPECT_EQ(s.valid, ref.valid());
      if (s.valid) EXPECT_NEAR(s.gtilde, ref.value, 1e-12 * std::abs(ref.value));
      if (c.kind == BoundaryKind::Triple && s.valid) {
        triple_seen = true;
        EXPECT_DOUBLE_EQ(s.tau, 3.0);
        EXPECT_NEAR(s.gtilde, 1.0, 1e-12);
      }
    }
  }
  EXPECT_EQ(kinds.size(), 4u);
  EXPECT_TRUE(triple_seen);
}

TEST(Criticality, NoFirstOrderLineWithoutA2) {
  for (const BoundaryCurve& c : boundary_curves(0.0, {-6.0, 6.0}, 121)) {
    if (c.kind != BoundaryKind::GcFirstOrder) continue;
    for (const BoundarySample& s : c.samples) EXPECT_FALSE(s.valid);
  }
}

TEST(Criticality, GridWithoutA2IsMirrorSymmetric) {
  // 61 tau samples on [-3, 3] so that tau -> -tau maps grid points onto grid points.
  const PhaseGrid g = phase_diagram_grid(0.0, {-3.0, 3.0}, {0.0, 4.0}, 61, 81, 3);
  const std::size_t nt = g.taus.size();
  ASSERT_EQ(nt, 61u);
  ASSERT_EQ(g.labels.size(), nt * g.gtildes.size());
  for (std::size_t j = 0; j < g.gtildes.size(); ++j) {
    for (std::size_t i = 0; i < nt; ++i) {
      const Phase a = g.at(i, j);
      const Phase b = g.at(nt - 1 - i, j);
      if (std::abs(g.taus[i]) < 1e-12) continue;
      const double prox = classify(g.taus[i], 0.0, g.gtildes[j]).boundary_proximity;
      if (std::abs(prox) < 1e-9) continue;
      if (a == Phase::Normal) EXPECT_EQ(b, Phase::Normal);
      if (a == Phase::XSrp) EXPECT_EQ(b, Phase::PSrp);
      if (a == Phase::PSrp) EXPECT_EQ(b, Phase::XSrp);
    }
  }
}

TEST(Criticality, GridAtMinimalA2HasNoXTypeBelowTauOne) {
  const PhaseGrid g = phase_diagram_grid(1.0, {-6.0, 6.0}, {0.0, 4.0}, 121, 101);
  bool x_above = false;
  for (std::size_t j = 0; j < g.gtildes.size(); ++j) {
    for (std::size_t i = 0; i < g.taus.size(); ++i) {
      if (g.at(i, j) != Phase::XSrp) continue;
      EXPECT_GT(g.taus[i], 1.0);
      x_above = true;
    }
  }
  EXPECT_TRUE(x_above);
}

TEST(Criticality, GridWithStrongA2ShowsTriplePoint) {
  const PhaseGrid g = phase_diagram_grid(3.0, {2.0, 4.0}, {0.5, 1.5}, 41, 41);
  // Three labels meet within one cell of (3, 1).
  std::set<Phase> near;
  for (std::size_t j = 0; j < g.gtildes.size(); ++j) {
    for (std::size_t i = 0; i < g.taus.size(); ++i) {
      if (std::abs(g.taus[i] - 3.0) <= 0.05 + 1e-12 && std::abs(g.gtildes[j] - 1.0) <= 0.025 + 1e-12) {
        near.insert(g.at(i, j));
      }
    }
  }
  EXPECT_EQ(near.size(), 3u);
  EXPECT_THROW(phase_diagram_grid(3.0, {2.0, 4.0}, {0.5, 1.5}, 1, 41), std::invalid_argument);
}

TEST(Criticality, GridIndependentOfJobs) {
  const PhaseGrid a = phase_diagram_grid(1.0, {-6.0, 6.0}, {0.0, 4.0}, 97, 53, 1);
  const PhaseGrid b = phase_diagram_grid(1.0, {-6.0, 6.0}, {0.0, 4.0}, 97, 53, 6);
  EXPECT_EQ(a.labels, b.labels);
}
