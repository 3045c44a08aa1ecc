#include "syncnet/synthesis.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "syncnet/corpus.hpp"
#include "syncnet/error.hpp"
#include "syncnet/simulate.hpp"
#include "syncnet/verify.hpp"

namespace syncnet {
namespace {

TEST(InvariantFormTest, OrthogonalGivesIdentity) {
  const auto form = solve_invariant_r(rotation(0.9));
  EXPECT_EQ(form.r, Mat::Identity(2, 2));
  EXPECT_EQ(form.residual, 0.0);
  EXPECT_EQ(form.iterations, 0);
}

TEST(InvariantFormTest, ScaledRotationMatchesOracle) {
  const Mat s{{2.0, 0.0}, {0.0, 1.0}};
  const Mat f = s * rotation(0.9) * s.inverse();
  const auto form = solve_invariant_r(f);
  EXPECT_LE(form.residual, 1e-12);
  EXPECT_LE((form.r - oracles::ergodic_invariant_form(f)).norm(), 1e-8);
  // For S = diag(2, 1), R is proportional to S^{-2}.
  const Mat expected = Mat{{0.25, 0.0}, {0.0, 1.0}} * (2.0 / 1.25);
  EXPECT_LE((form.r - expected).norm(), 1e-8);
}

TEST(InvariantFormTest, JordanBlockDoesNotConverge) {
  InvariantFormOptions opts;
  opts.max_iter = 1L << 18;
  EXPECT_THROW(solve_invariant_r(Mat{{1.0, 1.0}, {0.0, 1.0}}, opts), NoConvergence);
}

TEST(InvariantFormTest, SymmetricNullSpaceBasis) {
  // Simple spectrum {e^{+-i}, 1}: the invariant symmetric forms are
  // spanned by S^{-T} blkdiag(I_2, 0) S^{-1} and S^{-T} blkdiag(0, 1) S^{-1}.
  corpus::Rng rng(20);
  const Mat s = corpus::random_well_conditioned(rng, 3);
  const Mat f = s * blkdiag(rotation(1.0), Mat::Identity(1, 1)) * s.inverse();
  const auto basis = invariant_form_basis(f);
  ASSERT_EQ(basis.size(), 2u);
  for (const Mat& b : basis) {
    EXPECT_LE((f.transpose() * b * f - b).norm(), 1e-10);
    EXPECT_LE((b - b.transpose()).norm(), 1e-14);
  }
}

TEST(InvariantFormTest, AgreesWithOracleOnRandomUnitSpectra) {
  corpus::Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    const Mat f = corpus::random_unit_spectrum(rng, 1 + t % 6);
    const auto form = solve_invariant_r(f);
    EXPECT_LE(form.residual, 1e-12);
    EXPECT_LE((form.r - oracles::ergodic_invariant_form(f)).norm(), 1e-8);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat>(form.r).eigenvalues()(0), 0.0);
  }
}

TEST(SynthesizeTest, ScalarIntegrator) {
  const auto g = synthesize(LinearSystem(Mat::Ones(1, 1), Mat::Ones(1, 1)));
  EXPECT_EQ(g.n1, 1);
  EXPECT_NEAR(g.l(0, 0), 1.0, 1e-15);
}

TEST(SynthesizeTest, RotationWithPosition) {
  const double theta = 0.6;
  const auto g = synthesize(LinearSystem(rotation(theta), Mat{{1.0, 0.0}}));
  ASSERT_EQ(g.n1, 2);
  EXPECT_LE((g.l - Mat{{std::cos(theta)}, {std::sin(theta)}}).norm(), 1e-12);
  EXPECT_LE(g.residuals.gain_identity, 1e-12);
}

TEST(SynthesizeTest, SchurStableGivesZeroGain) {
  const auto g = synthesize(LinearSystem(Mat{{0.5, 0.2}, {0.0, -0.3}}, Mat{{1.0, 1.0}}));
  EXPECT_EQ(g.n1, 0);
  EXPECT_EQ(g.n2, 2);
  EXPECT_EQ(g.l.rows(), 2);
  EXPECT_EQ(g.l.cols(), 1);
  EXPECT_TRUE(g.l.isZero(0.0));
}

TEST(SynthesizeTest, AssumptionFailures) {
  EXPECT_THROW(synthesize(LinearSystem(Mat{{1.0, 1.0}, {0.0, 1.0}}, Mat{{1.0, 0.0}})),
               AssumptionViolated);
  EXPECT_THROW(synthesize(LinearSystem(Mat::Identity(2, 2), Mat{{1.0, 0.0}})),
               AssumptionViolated);
}

TEST(SynthesizeTest, DuplicatedOutputs) {
  const LinearSystem sys(rotation(0.5), Mat{{1.0, 0.0}, {1.0, 0.0}});
  try {
    synthesize(sys);
    FAIL() << "expected RankDeficientCU";
  } catch (const RankDeficientCU& e) {
    EXPECT_EQ(e.rank(), 1);
    EXPECT_EQ(e.outputs(), 2);
  }
  SynthesisOptions opts;
  opts.reduce_outputs = true;
  const auto g = synthesize(sys, opts);
  EXPECT_TRUE(g.outputs_reduced);
  EXPECT_EQ(g.h.rows(), 1);
  EXPECT_EQ(g.l.cols(), 2);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_LE((g.output_map.cwiseAbs() - Mat{{s, s}}).norm(), 1e-12);
}

TEST(ReduceOutputsTest, FullRankIsUnchanged) {
  const LinearSystem sys(rotation(0.5), Mat{{1.0, 0.0}});
  const auto red = reduce_outputs(sys, Mat::Identity(2, 2));
  EXPECT_LE((red.t.cwiseAbs() - Mat::Identity(1, 1)).norm(), 1e-15);
  EXPECT_LE((red.system.c().cwiseAbs() - sys.c()).norm(), 1e-15);
}

TEST(ReduceOutputsTest, ReducedAndFullLoopsCoincide) {
  const LinearSystem sys(rotation(0.5), Mat{{1.0, 0.0}, {1.0, 0.0}});
  SynthesisOptions opts;
  opts.reduce_outputs = true;
  const auto g = synthesize(sys, opts);
  const auto red = reduce_outputs(sys, g.split.u);
  const Mat l_reduced = synthesize(red.system).l;
  const Topology topo = Topology::create(corpus::ring_lambda(3));
  NetworkState full = random_initial_state(2, 3, 4);
  NetworkState reduced = full;
  for (int k = 0; k < 50; ++k) {
    full = step_output_coupled(sys, g.l, topo, full);
    reduced = step_output_coupled(red.system, l_reduced, topo, reduced);
    ASSERT_LE((full.states - reduced.states).norm(), 1e-12);
  }
}

TEST(SynthesizeTest, CorpusInvariants) {
  corpus::Rng rng(22);
  for (int t = 0; t < 100; ++t) {
    const LinearSystem sys = corpus::random_system(rng);
    const auto g = synthesize(sys);
    if (g.n1 == 0) continue;
    const Mat& r = g.r_mat;
    const Mat& f = g.split.f;
    EXPECT_LE(spectral_norm(f.transpose() * r * f - r), 1e-10 * spectral_norm(r));
    EXPECT_LE((r - r.transpose()).norm(), 1e-14);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat>(r).eigenvalues()(0), 0.0);
    EXPECT_LE(spectral_norm(g.q.transpose() * g.q - Mat::Identity(g.n1, g.n1)), 1e-9);
    EXPECT_LE(spectral_norm(g.h * g.h.transpose() - Mat::Identity(g.h.rows(), g.h.rows())), 1e-10);
    const Mat lhs = g.l * sys.c() * g.split.u * g.r_inv_sqrt;
    const Mat rhs = g.split.u * f * g.r_inv_sqrt * g.h.transpose() * g.h;
    EXPECT_LE(spectral_norm(lhs - rhs), 1e-8);
    // Observability transfers to (H, Q), and Lemma 2 holds.
    EXPECT_TRUE(check_b_assumptions(g.q, g.h).ok());
    EXPECT_LT(lemma2_alpha(g.q, g.h), 1.0);
  }
}

TEST(SynthesizeTest, Deterministic) {
  corpus::Rng rng(23);
  const LinearSystem sys = corpus::random_system(rng, 6, 4, 2);
  const Mat first = synthesize(sys).l;
  for (int t = 0; t < 3; ++t) EXPECT_EQ(synthesize(sys).l, first);
}

TEST(SynthesizeDualTest, TransposesPrimalGain) {
  EXPECT_NEAR(synthesize_dual(Mat::Ones(1, 1), Mat::Ones(1, 1))(0, 0), 1.0, 1e-15);
  const Mat a = rotation(0.6);
  const Mat c{{1.0, 0.0}};
  const Mat k = synthesize_dual(a.transpose(), c.transpose());
  EXPECT_EQ(k, synthesize(LinearSystem(a, c)).l.transpose());
}

}  // namespace
}  // namespace syncnet
