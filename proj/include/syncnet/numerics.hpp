#pragma once

#include <Eigen/Dense>

namespace syncnet {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Default relative band for classifying eigenvalue magnitudes as unity.
inline constexpr double kDefaultUnitTol = 1e-8;
/// Default numerical-rank threshold, relative to the largest singular value.
inline constexpr double kDefaultRankTol = 1e-10;

/// Block Kronecker product: entry (i, j) of `a` scales a copy of `b`.
Mat kron(const Mat& a, const Mat& b);

/// Largest singular value (computed by SVD, not power iteration).
double spectral_norm(const Mat& a);

/// Number of singular values above rel_tol * sigma_max. Zero for a zero or
/// empty matrix.
int numerical_rank(const Mat& a, double rel_tol = kDefaultRankTol);

/// Complex overload used by the PBH tests.
int numerical_rank(const CMat& a, double rel_tol);

/// Symmetric idempotent matrix. Construction checks both properties.
class OrthoProjector {
 public:
  static constexpr double kTolSym = 1e-10;
  static constexpr double kTolIdem = 1e-10;

  /// Throws std::invalid_argument when `p` is not an orthogonal projection
  /// within the tolerances above.
  explicit OrthoProjector(Mat p);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Mat& matrix() const { return matrix_; }

  /// I - P, itself an orthogonal projection onto range(P)^perp.
  OrthoProjector complement() const;

 private:
  Mat matrix_;
};

struct RangeProjection {
  OrthoProjector projector;
  // rank x n with orthonormal rows; range(h^T) = range(basis_source).
  // Rows are sign-normalized (largest-magnitude entry positive) and sorted
  // lexicographically so the result is reproducible.
  Mat h;
  int rank = 0;
};

/// Orthogonal projector onto the column space of `basis_source`, together
/// with an orthonormal row basis H such that P = H^T H.
/// Throws ZeroRange if `basis_source` is numerically zero.
RangeProjection projector_from_range(const Mat& basis_source,
                                     double rank_tol = kDefaultRankTol);

/// Applies the reproducible row convention used for H (see RangeProjection).
Mat normalize_orthonormal_rows(Mat rows);

/// Real invariant-subspace decomposition
///   [U W]^{-1} A [U W] = blkdiag(F, G)
/// with spec(F) on the unit circle and spec(G) strictly inside it.
/// u_dag and w_dag are the row blocks of [U W]^{-1}.
struct SpectralSplit {
  Mat u, w, f, g, u_dag, w_dag;
  int n1 = 0;
  int n2 = 0;
  // Eigenvalues of F and G as reported by the reordered Schur form.
  CVec unit_eigenvalues;
  CVec stable_eigenvalues;
};

/// Real Schur form reordered so unit-magnitude eigenvalues lead, followed by
/// Sylvester decoupling of the off-diagonal block. Throws SplitFailed when
/// some eigenvalue magnitude exceeds 1 + unit_tol or the reordering moves an
/// eigenvalue across the classification boundary.
SpectralSplit real_spectral_split(const Mat& a,
                                  double unit_tol = kDefaultUnitTol);

/// Solves t11 * Y - Y * t22 = -t12, so that [I Y; 0 I] block-diagonalizes
/// [t11 t12; 0 t22]. Throws NearSingular when the Sylvester operator's
/// smallest singular value is below 1e-12 of its largest.
Mat sylvester_decouple(const Mat& t11, const Mat& t12, const Mat& t22);

/// Block diagonal matrix with the given (possibly empty) blocks.
Mat blkdiag(const Mat& a, const Mat& b);

/// 2x2 rotation by `theta` radians.
Mat rotation(double theta);

/// Symmetric square root and inverse square root of an SPD matrix.
struct SymmetricRoots {
  Mat sqrt;
  Mat inv_sqrt;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};
SymmetricRoots symmetric_roots(const Mat& spd);

bool all_finite(const Mat& a);

}  // namespace syncnet
