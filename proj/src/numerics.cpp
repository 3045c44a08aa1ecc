#include "syncnet/numerics.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/SVD>

#include "syncnet/error.hpp"

namespace syncnet {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double spectral_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

int numerical_rank(const Mat& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const Vec& s = svd.singularValues();
  if (!(s(0) > 0.0)) return 0;
  return static_cast<int>((s.array() > rel_tol * s(0)).count());
}

int numerical_rank(const CMat& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<CMat> svd(a);
  const Vec& s = svd.singularValues();
  if (!(s(0) > 0.0)) return 0;
  return static_cast<int>((s.array() > rel_tol * s(0)).count());
}

OrthoProjector::OrthoProjector(Mat p) : matrix_(std::move(p)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw std::invalid_argument("projector must be square");
  }
  const double sym = (matrix_ - matrix_.transpose()).norm();
  const double idem = (matrix_ * matrix_ - matrix_).norm();
  if (sym > kTolSym || idem > kTolIdem) {
    std::ostringstream msg;
    msg << "not an orthogonal projection: |P - P^T| = " << sym
        << ", |P^2 - P| = " << idem;
    throw std::invalid_argument(msg.str());
  }
}

OrthoProjector OrthoProjector::complement() const {
  return OrthoProjector(Mat::Identity(dim(), dim()) - matrix_);
}

Mat normalize_orthonormal_rows(Mat rows) {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    Eigen::Index at = 0;
    rows.row(i).cwiseAbs().maxCoeff(&at);
    if (rows(i, at) < 0.0) rows.row(i) *= -1.0;
  }
  std::vector<Eigen::RowVectorXd> sorted;
  sorted.reserve(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) sorted.emplace_back(rows.row(i));
  std::sort(sorted.begin(), sorted.end(),
            [](const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& y) {
              return std::lexicographical_compare(x.begin(), x.end(),
                                                  y.begin(), y.end());
            });
  for (Eigen::Index i = 0; i < rows.rows(); ++i) rows.row(i) = sorted[i];
  return rows;
}

RangeProjection projector_from_range(const Mat& basis_source, double rank_tol) {
  // Absolute floor below which the source is treated as the zero matrix.
  constexpr double kZeroFloor = 1e-14;
  const Eigen::Index n = basis_source.rows();
  if (n == 0) throw std::invalid_argument("basis source has no rows");
  Eigen::JacobiSVD<Mat> svd(basis_source, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > kZeroFloor)) {
    throw ZeroRange("basis source is numerically zero");
  }
  const int rank = static_cast<int>((s.array() > rank_tol * s(0)).count());
  Mat h = normalize_orthonormal_rows(svd.matrixU().leftCols(rank).transpose());
  Mat p = h.transpose() * h;
  p = 0.5 * (p + p.transpose());
  return RangeProjection{OrthoProjector(std::move(p)), std::move(h), rank};
}

namespace {

std::string describe_magnitudes(const std::vector<double>& mags) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < mags.size(); ++i) {
    if (i) out << ", ";
    out << mags[i];
  }
  return out.str();
}

}  // namespace

SpectralSplit real_spectral_split(const Mat& a, double unit_tol) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument("spectral split needs a non-empty square matrix");
  }
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Mat t = a;
  Mat z(n, n);
  std::vector<double> wr(n), wi(n);
  lapack_int sdim = 0;
  lapack_int info = LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n,
                                  t.data(), n, &sdim, wr.data(), wi.data(),
                                  z.data(), n);
  if (info != 0) {
    throw SplitFailed("real Schur decomposition failed (info " +
                      std::to_string(info) + ")");
  }

  std::vector<lapack_logical> select(n, 0);
  std::vector<double> offending;
  for (lapack_int i = 0; i < n; ++i) {
    const double mag = std::hypot(wr[i], wi[i]);
    if (mag > 1.0 + unit_tol) offending.push_back(mag);
    select[i] = std::abs(mag - 1.0) <= unit_tol ? 1 : 0;
  }
  if (!offending.empty()) {
    throw SplitFailed("eigenvalue magnitudes outside the unit disk: " +
                      describe_magnitudes(offending));
  }

  lapack_int n1 = 0;
  double s_cond = 0.0, sep = 0.0;
  {
    // Direct call with explicit workspace; the LAPACKE wrapper crashes here.
    const char job = 'N', compq = 'V';
    lapack_int lwork = std::max<lapack_int>(1, n), liwork = 1;
    std::vector<double> work(lwork);
    std::vector<lapack_int> iwork(liwork);
    LAPACK_dtrsen(&job, &compq, select.data(), &n, t.data(), &n, z.data(), &n,
                  wr.data(), wi.data(), &n1, &s_cond, &sep, work.data(), &lwork,
                  iwork.data(), &liwork, &info);
  }
  if (info != 0) {
    throw SplitFailed("Schur reordering failed: eigenvalues too close to swap");
  }

  // The reordering perturbs eigenvalues slightly; each must stay on its side.
  std::vector<double> crossed;
  for (lapack_int i = 0; i < n; ++i) {
    const double mag = std::hypot(wr[i], wi[i]);
    const bool unit = std::abs(mag - 1.0) <= unit_tol;
    const bool stable = mag < 1.0 - unit_tol;
    if ((i < n1 && !unit) || (i >= n1 && !stable)) crossed.push_back(mag);
  }
  if (!crossed.empty()) {
    throw SplitFailed("eigenvalue magnitudes in the ambiguous band after "
                      "reordering: " + describe_magnitudes(crossed));
  }

  const int n2 = static_cast<int>(n - n1);
  SpectralSplit out;
  out.n1 = static_cast<int>(n1);
  out.n2 = n2;
  out.f = t.topLeftCorner(n1, n1);
  out.g = t.bottomRightCorner(n2, n2);
  const Mat y = sylvester_decouple(out.f, t.topRightCorner(n1, n2), out.g);

  const Mat z1 = z.leftCols(n1);
  const Mat z2 = z.rightCols(n2);
  out.u = z1;
  out.w = z1 * y + z2;
  out.u_dag = z1.transpose() - y * z2.transpose();
  out.w_dag = z2.transpose();

  out.unit_eigenvalues.resize(n1);
  out.stable_eigenvalues.resize(n2);
  for (lapack_int i = 0; i < n; ++i) {
    const std::complex<double> ev(wr[i], wi[i]);
    if (i < n1) {
      out.unit_eigenvalues(i) = ev;
    } else {
      out.stable_eigenvalues(i - n1) = ev;
    }
  }
  return out;
}

Mat sylvester_decouple(const Mat& t11, const Mat& t12, const Mat& t22) {
  const Eigen::Index n1 = t11.rows();
  const Eigen::Index n2 = t22.rows();
  if (t11.cols() != n1 || t22.cols() != n2 || t12.rows() != n1 ||
      t12.cols() != n2) {
    throw std::invalid_argument("sylvester_decouple: inconsistent block sizes");
  }
  if (n1 == 0 || n2 == 0) return Mat::Zero(n1, n2);

  // vec(t11 Y - Y t22) = (I (x) t11 - t22^T (x) I) vec(Y), column-major vec.
  const Mat op = kron(Mat::Identity(n2, n2), t11) -
                 kron(t22.transpose(), Mat::Identity(n1, n1));
  Eigen::BDCSVD<Mat> svd(op, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  if (!(s(s.size() - 1) > 1e-12 * s(0))) {
    std::ostringstream msg;
    msg << "Sylvester operator near singular: sigma_min/sigma_max = "
        << s(s.size() - 1) / s(0);
    throw NearSingular(msg.str());
  }
  const Vec rhs = -Eigen::Map<const Vec>(Mat(t12).data(), n1 * n2);
  const Vec y = svd.solve(rhs);
  return Eigen::Map<const Mat>(y.data(), n1, n2);
}

Mat blkdiag(const Mat& a, const Mat& b) {
  Mat out = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Mat rotation(double theta) {
  Mat r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

SymmetricRoots symmetric_roots(const Mat& spd) {
  const Mat sym = 0.5 * (spd + spd.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error("symmetric eigendecomposition failed");
  }
  const Vec& ev = es.eigenvalues();
  if (ev.size() > 0 && !(ev(0) > 0.0)) {
    throw Error("matrix is not positive definite (min eigenvalue " +
                std::to_string(ev(0)) + ")");
  }
  SymmetricRoots out;
  const Mat& v = es.eigenvectors();
  out.sqrt = v * ev.cwiseSqrt().asDiagonal() * v.transpose();
  out.inv_sqrt = v * ev.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  if (ev.size() > 0) {
    out.min_eigenvalue = ev(0);
    out.max_eigenvalue = ev(ev.size() - 1);
  }
  return out;
}

bool all_finite(const Mat& a) { return a.allFinite(); }

}  // namespace syncnet
