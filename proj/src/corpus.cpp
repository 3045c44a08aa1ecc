#include "syncnet/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace syncnet::corpus {

namespace {

Mat gaussian(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  Mat out(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) out(i, j) = g(rng);
  }
  return out;
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

double pbh_margin(const LinearSystem& sys, double unit_tol) {
  const int n = sys.n();
  const CMat a = sys.a().cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<CMat> es(a, false);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const auto lambda = es.eigenvalues()(i);
    if (std::abs(lambda) < 1.0 - unit_tol) continue;
    CMat stacked(n + sys.m(), n);
    stacked.topRows(n) = a - lambda * CMat::Identity(n, n);
    stacked.bottomRows(sys.m()) = sys.c().cast<std::complex<double>>();
    const Vec s = Eigen::JacobiSVD<CMat>(stacked).singularValues();
    margin = std::min(margin, s(n - 1) / s(0));
  }
  return margin;
}

double second_eigenvalue_modulus(const Mat& lambda) {
  if (lambda.rows() < 2) return 0.0;
  Eigen::EigenSolver<Mat> es(lambda, false);
  std::vector<double> mags;
  for (Eigen::Index i = 0; i < lambda.rows(); ++i) mags.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mags.rbegin(), mags.rend());
  return mags[1];
}

Mat random_orthogonal(Rng& rng, int n) {
  Eigen::HouseholderQR<Mat> qr(gaussian(rng, n, n));
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Mat random_well_conditioned(Rng& rng, int n) {
  Vec scales(n);
  for (int i = 0; i < n; ++i) scales(i) = uniform(rng, 0.5, 2.0);
  return random_orthogonal(rng, n) * scales.asDiagonal() * random_orthogonal(rng, n);
}

Mat random_unit_block(Rng& rng, int n) {
  Mat out = Mat::Zero(n, n);
  int at = 0;
  bool plus_one = false, minus_one = false;
  std::vector<double> angles;
  auto draw_angle = [&] {
    for (;;) {
      const double theta = uniform(rng, kMinRotationAngle, kMaxRotationAngle);
      bool separated = true;
      for (double other : angles) separated = separated && std::abs(theta - other) >= kMinAngleGap;
      if (separated) {
        angles.push_back(theta);
        return theta;
      }
    }
  };
  while (at < n) {
    const bool want_rotation = (n - at >= 2) && (uniform(rng, 0.0, 1.0) < 0.75 ||
                                                 (plus_one && minus_one));
    if (want_rotation) {
      out.block(at, at, 2, 2) = rotation(draw_angle());
      at += 2;
    } else if (!plus_one || !minus_one) {
      const bool pick_plus = !plus_one && (minus_one || uniform(rng, 0.0, 1.0) < 0.5);
      out(at, at) = pick_plus ? 1.0 : -1.0;
      (pick_plus ? plus_one : minus_one) = true;
      at += 1;
    } else {
      // Both real unit eigenvalues used and a single slot remains; restart.
      out.setZero();
      at = 0;
      plus_one = minus_one = false;
      angles.clear();
    }
  }
  return out;
}

Mat random_stable_block(Rng& rng, int n) {
  Mat out = Mat::Zero(n, n);
  int at = 0;
  while (at < n) {
    if (n - at >= 2 && uniform(rng, 0.0, 1.0) < 0.5) {
      out.block(at, at, 2, 2) = uniform(rng, 0.1, 0.8) * rotation(uniform(rng, 0.2, 3.0));
      at += 2;
    } else {
      out(at, at) = uniform(rng, -0.8, 0.8);
      at += 1;
    }
  }
  return out;
}

Mat random_unit_spectrum(Rng& rng, int n) {
  const Mat s = random_well_conditioned(rng, n);
  return s * random_unit_block(rng, n) * s.inverse();
}

LinearSystem random_system(Rng& rng, int n, int n1, int m) {
  if (m < 1 || m > n1 || n1 > n) {
    throw std::invalid_argument("random_system needs 1 <= m <= n1 <= n");
  }
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Mat s = random_well_conditioned(rng, n);
    const Mat core = blkdiag(random_unit_block(rng, n1), random_stable_block(rng, n - n1));
    LinearSystem sys(s * core * s.inverse(), gaussian(rng, m, n));
    if (check_neutral_stability(sys.a()).ok && check_detectable(sys).ok &&
        pbh_margin(sys) >= kMinPbhMargin) {
      return sys;
    }
  }
  throw std::runtime_error("random_system: could not draw a valid system");
}

LinearSystem random_system(Rng& rng, int max_n, int max_m) {
  const int n = std::uniform_int_distribution<int>(1, max_n)(rng);
  const int n1 = std::uniform_int_distribution<int>(1, n)(rng);
  const int m = std::uniform_int_distribution<int>(1, std::min(max_m, n1))(rng);
  return random_system(rng, n, n1, m);
}

Mat random_orthonormal_rows(Rng& rng, int m, int n) {
  return random_orthogonal(rng, n).leftCols(m).transpose();
}

OrthogonalPair random_orthogonal_pair(Rng& rng, int n, int m) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Mat o = random_orthogonal(rng, n);
    OrthogonalPair pair{o * random_unit_block(rng, n) * o.transpose(),
                        random_orthonormal_rows(rng, m, n)};
    if (check_b_assumptions(pair.q, pair.h).ok()) return pair;
  }
  throw std::runtime_error("random_orthogonal_pair: could not draw an observable pair");
}

Mat random_connected_lambda(Rng& rng, int p, double arc_prob) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Mat lambda = Mat::Zero(p, p);
    for (int i = 0; i < p; ++i) {
      lambda(i, i) = uniform(rng, 0.1, 1.0);
      for (int j = 0; j < p; ++j) {
        if (j != i && uniform(rng, 0.0, 1.0) < arc_prob) {
          lambda(i, j) = uniform(rng, 0.1, 1.0);
        }
      }
      lambda.row(i) /= lambda.row(i).sum();
    }
    if (validate_connected(lambda).ok() && second_eigenvalue_modulus(lambda) <= kMaxSlem) {
      return lambda;
    }
  }
  throw std::runtime_error("random_connected_lambda: rejection sampling failed");
}

Mat ring_lambda(int p, double w) {
  Mat lambda = Mat::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    lambda(i, i) = 1.0 - w;
    lambda(i, (i + 1) % p) += w;
  }
  return lambda;
}

}  // namespace syncnet::corpus
