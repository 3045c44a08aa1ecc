#include "syncnet/numerics.hpp"

#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "syncnet/corpus.hpp"
#include "syncnet/error.hpp"

namespace syncnet {
namespace {

Mat random_matrix(corpus::Rng& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

TEST(KronTest, IdentityTimesIdentity) {
  EXPECT_TRUE(kron(Mat::Identity(2, 2), Mat::Identity(3, 3)).isApprox(Mat::Identity(6, 6)));
}

TEST(KronTest, RowTimesColumn) {
  const Mat k = kron(Mat{{1.0, 2.0}}, Mat{{3.0}, {4.0}});
  const Mat expected{{3.0, 6.0}, {4.0, 8.0}};
  EXPECT_EQ(k, expected);
}

TEST(KronTest, MatchesIndexFormula) {
  corpus::Rng rng(3);
  const Mat a = random_matrix(rng, 2, 3);
  const Mat b = random_matrix(rng, 4, 2);
  EXPECT_LE((kron(a, b) - oracles::kron_by_index(a, b)).norm(), 1e-15);
}

TEST(KronTest, NormIsMultiplicative) {
  corpus::Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const Mat a = random_matrix(rng, 3, 3);
    const Mat b = random_matrix(rng, 3, 3);
    EXPECT_NEAR(spectral_norm(kron(a, b)), spectral_norm(a) * spectral_norm(b),
                1e-12 * spectral_norm(a) * spectral_norm(b));
  }
}

TEST(KronTest, MixedProductAndBilinearity) {
  corpus::Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const Mat a = random_matrix(rng, 2, 2), c = random_matrix(rng, 2, 2);
    const Mat b = random_matrix(rng, 3, 3), d = random_matrix(rng, 3, 3);
    EXPECT_LE(spectral_norm(kron(a, b) * kron(c, d) - kron(a * c, b * d)), 1e-12);
    EXPECT_LE(spectral_norm(kron(a, b) + kron(a, d) - kron(a, b + d)), 1e-12);
  }
}

TEST(SpectralNormTest, Basics) {
  EXPECT_DOUBLE_EQ(spectral_norm(Mat::Identity(4, 4)), 1.0);
  EXPECT_NEAR(spectral_norm(Mat{{3.0, 0.0}, {0.0, -5.0}}), 5.0, 1e-14);
}

TEST(SpectralNormTest, AgreesWithSphereSampling) {
  corpus::Rng rng(6);
  for (int t = 0; t < 3; ++t) {
    const Mat a = random_matrix(rng, 5, 5);
    const double sampled = oracles::sampled_spectral_norm(a, 20000, 11 + t);
    const double exact = spectral_norm(a);
    EXPECT_LE(sampled, exact * (1.0 + 1e-12));
    EXPECT_NEAR(sampled, exact, 1e-6 * exact);
  }
}

TEST(ProjectorFromRangeTest, AxisAligned) {
  const auto r = projector_from_range(Mat{{1.0}, {0.0}});
  EXPECT_EQ(r.rank, 1);
  EXPECT_LE((r.projector.matrix() - Mat{{1.0, 0.0}, {0.0, 0.0}}).norm(), 1e-15);
  EXPECT_LE((r.h - Mat{{1.0, 0.0}}).norm(), 1e-15);
}

TEST(ProjectorFromRangeTest, RankOneByHand) {
  const auto r = projector_from_range(Mat{{1.0, 1.0}, {1.0, 1.0}});
  EXPECT_EQ(r.rank, 1);
  EXPECT_LE((r.projector.matrix() - 0.5 * Mat::Ones(2, 2)).norm(), 1e-14);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_LE((r.h.cwiseAbs() - Mat{{s, s}}).norm(), 1e-14);
}

TEST(ProjectorFromRangeTest, ZeroSourceThrows) {
  EXPECT_THROW(projector_from_range(Mat::Zero(3, 2)), ZeroRange);
}

TEST(ProjectorFromRangeTest, InvariantsOnRandomInputs) {
  corpus::Rng rng(7);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int t = 0; t < 100; ++t) {
    const int n = dim(rng);
    const int k = dim(rng);
    Mat src = random_matrix(rng, n, k);
    if (t % 3 == 0 && k > 1) src.col(k - 1) = src.col(0) * 2.0;
    const auto r = projector_from_range(src);
    const Mat& p = r.projector.matrix();
    EXPECT_LE((p - p.transpose()).norm(), 1e-12);
    EXPECT_LE((p * p - p).norm(), 1e-12);
    EXPECT_LE((r.h * r.h.transpose() - Mat::Identity(r.rank, r.rank)).norm(), 1e-12);
    EXPECT_EQ(r.rank, numerical_rank(src));
    // range(H^T) = range(src): P leaves src fixed.
    EXPECT_LE((p * src - src).norm(), 1e-10 * std::max(1.0, src.norm()));
    const Mat v = r.projector.complement().matrix();
    EXPECT_LE((p * v).norm(), 1e-12);
    EXPECT_LE((v * p).norm(), 1e-12);
  }
}

TEST(OrthoProjectorTest, RejectsNonProjector) {
  EXPECT_THROW(OrthoProjector(Mat{{1.0, 1.0}, {0.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(OrthoProjector(2.0 * Mat::Identity(2, 2)), std::invalid_argument);
}

TEST(SpectralSplitTest, PreSplitInput) {
  const Mat a = blkdiag(rotation(0.7), Mat::Constant(1, 1, 0.5));
  const auto s = real_spectral_split(a);
  ASSERT_EQ(s.n1, 2);
  ASSERT_EQ(s.n2, 1);
  EXPECT_LE((s.g - Mat::Constant(1, 1, 0.5)).norm(), 1e-12);
  // U spans the first two coordinates; F is similar to rot(0.7).
  EXPECT_LE(s.u.row(2).norm(), 1e-12);
  EXPECT_NEAR(s.f.trace(), 2.0 * std::cos(0.7), 1e-12);
  EXPECT_NEAR(s.f.determinant(), 1.0, 1e-12);
}

TEST(SpectralSplitTest, FullyUnitary) {
  const Mat a = rotation(1.3);
  const auto s = real_spectral_split(a);
  EXPECT_EQ(s.n1, 2);
  EXPECT_EQ(s.n2, 0);
  EXPECT_EQ(s.w.cols(), 0);
  EXPECT_LE((s.u * s.f * s.u_dag - a).norm(), 1e-12);
}

TEST(SpectralSplitTest, RecoversRotationUnderSimilarity) {
  corpus::Rng rng(8);
  const Mat s_mat = corpus::random_well_conditioned(rng, 4);
  Mat core = Mat::Zero(4, 4);
  core.topLeftCorner(2, 2) = rotation(1.1);
  core(2, 2) = 0.3;
  core(3, 3) = -0.2;
  const Mat a = s_mat * core * s_mat.inverse();
  const auto s = real_spectral_split(a);
  ASSERT_EQ(s.n1, 2);
  Eigen::EigenSolver<Mat> es(s.f);
  for (int i = 0; i < 2; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    EXPECT_NEAR(std::abs(z), 1.0, 1e-8);
    EXPECT_NEAR(std::abs(std::arg(z)), 1.1, 1e-8);
  }
}

TEST(SpectralSplitTest, RejectsUnstable) {
  EXPECT_THROW(real_spectral_split(Mat::Constant(1, 1, 1.5)), SplitFailed);
}

TEST(SpectralSplitTest, RoundTripOnRandomNeutrallyStable) {
  corpus::Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const LinearSystem sys = corpus::random_system(rng, 8, 3);
    const Mat& a = sys.a();
    const auto s = real_spectral_split(a);
    Mat basis(a.rows(), a.cols());
    basis << s.u, s.w;
    Mat inv(a.rows(), a.cols());
    inv << s.u_dag, s.w_dag;
    EXPECT_LE(spectral_norm(basis * blkdiag(s.f, s.g) * inv - a), 1e-9 * spectral_norm(a));
    EXPECT_LE((s.u_dag * s.u - Mat::Identity(s.n1, s.n1)).norm(), 1e-9);
    EXPECT_LE((s.w_dag * s.w - Mat::Identity(s.n2, s.n2)).norm(), 1e-9);
    EXPECT_LE((s.u_dag * s.w).norm(), 1e-9);
    EXPECT_LE((s.w_dag * s.u).norm(), 1e-9);
    for (Eigen::Index i = 0; i < s.unit_eigenvalues.size(); ++i) {
      EXPECT_NEAR(std::abs(s.unit_eigenvalues(i)), 1.0, 1e-8);
    }
    for (Eigen::Index i = 0; i < s.stable_eigenvalues.size(); ++i) {
      EXPECT_LT(std::abs(s.stable_eigenvalues(i)), 1.0 - 1e-8);
    }
  }
}

TEST(SylvesterTest, ZeroCoupling) {
  const Mat y = sylvester_decouple(rotation(0.4), Mat::Zero(2, 1), Mat::Constant(1, 1, 0.5));
  EXPECT_LE(y.norm(), 1e-15);
}

TEST(SylvesterTest, Scalar) {
  const Mat y = sylvester_decouple(Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, 2.0),
                                   Mat::Constant(1, 1, 0.5));
  EXPECT_NEAR(y(0, 0), -4.0, 1e-14);
}

TEST(SylvesterTest, RandomResidual) {
  corpus::Rng rng(10);
  const Mat t11 = corpus::random_unit_spectrum(rng, 3);
  const Mat t22 = corpus::random_stable_block(rng, 2);
  const Mat t12 = random_matrix(rng, 3, 2);
  const Mat y = sylvester_decouple(t11, t12, t22);
  EXPECT_LE((t11 * y - y * t22 + t12).norm(), 1e-10 * t12.norm());
}

TEST(SylvesterTest, SharedSpectrumIsNearSingular) {
  EXPECT_THROW(sylvester_decouple(Mat::Constant(1, 1, 0.5), Mat::Constant(1, 1, 1.0),
                                  Mat::Constant(1, 1, 0.5)),
               NearSingular);
}

TEST(SymmetricRootsTest, InverseSquareRoot) {
  const Mat spd{{4.0, 1.0}, {1.0, 3.0}};
  const auto roots = symmetric_roots(spd);
  EXPECT_LE((roots.sqrt * roots.sqrt - spd).norm(), 1e-13);
  EXPECT_LE((roots.sqrt * roots.inv_sqrt - Mat::Identity(2, 2)).norm(), 1e-13);
  EXPECT_THROW(symmetric_roots(Mat{{1.0, 0.0}, {0.0, -1.0}}), Error);
}

}  // namespace
}  // namespace syncnet
