#pragma once

#include <complex>
#include <vector>

#include "syncnet/numerics.hpp"

namespace syncnet {

/// Identical agent dynamics x+ = A x + u, y = C x.
class LinearSystem {
 public:
  /// Throws std::invalid_argument unless A is square, C has n columns and
  /// both are non-empty and finite.
  LinearSystem(Mat a, Mat c);

  const Mat& a() const { return a_; }
  const Mat& c() const { return c_; }
  int n() const { return static_cast<int>(a_.rows()); }
  int m() const { return static_cast<int>(c_.rows()); }

 private:
  Mat a_;
  Mat c_;
};

/// Eigenvalues closer than this are merged before multiplicity counting.
inline constexpr double kDefaultClusterTol = 1e-4;
/// Relative rank threshold for the complex PBH matrices.
inline constexpr double kDefaultPbhRankTol = 1e-9;

struct EigenvalueDiagnostic {
  std::complex<double> value;
  double magnitude = 0.0;
  // Multiplicities of the cluster this eigenvalue belongs to.
  int algebraic = 1;
  int geometric = 1;
  bool on_unit_circle = false;
  bool ok = true;
};

struct NeutralStabilityReport {
  bool ok = false;
  std::vector<EigenvalueDiagnostic> eigenvalues;
  double unit_tol = kDefaultUnitTol;
  double cluster_tol = kDefaultClusterTol;
};

struct DetectabilityReport {
  bool ok = false;
  // Marginal/unstable eigenvalues failing the PBH rank test.
  std::vector<std::complex<double>> undetectable;
  double unit_tol = kDefaultUnitTol;
  double rank_tol = kDefaultPbhRankTol;
};

struct AssumptionReport {
  NeutralStabilityReport neutral_stability;
  DetectabilityReport detectability;
  bool observable = false;
  bool ok() const { return neutral_stability.ok && detectability.ok; }
};

// Eigenvalues in the band |lambda| in [1 - unit_tol, 1 + unit_tol] need a
// trivial Jordan structure; nothing may exceed 1 + unit_tol.
NeutralStabilityReport check_neutral_stability(
    const Mat& a, double unit_tol = kDefaultUnitTol,
    double cluster_tol = kDefaultClusterTol);
inline NeutralStabilityReport check_neutral_stability(
    const LinearSystem& sys, double unit_tol = kDefaultUnitTol) {
  return check_neutral_stability(sys.a(), unit_tol);
}

/// PBH test rank([A - lambda I; C]) = n for every eigenvalue with
/// |lambda| >= 1 - unit_tol.
DetectabilityReport check_detectable(const LinearSystem& sys,
                                     double unit_tol = kDefaultUnitTol,
                                     double rank_tol = kDefaultPbhRankTol);

bool check_observable(const LinearSystem& sys,
                      double rank_tol = kDefaultRankTol);

/// (A, B) is stabilizable iff (B^T, A^T) is detectable.
bool check_stabilizable(const Mat& a, const Mat& b,
                        double unit_tol = kDefaultUnitTol);

struct BAssumptionReport {
  bool orthogonal = false;       // Q^T Q = I
  bool orthonormal_rows = false; // H H^T = I
  bool observable = false;       // (H, Q) observable
  double orthogonality_residual = 0.0;
  double row_residual = 0.0;
  bool ok() const { return orthogonal && orthonormal_rows && observable; }
};

BAssumptionReport check_b_assumptions(const Mat& q, const Mat& h,
                                      double tol = 1e-9);

AssumptionReport check_assumptions(const LinearSystem& sys,
                                   double unit_tol = kDefaultUnitTol);

/// Observability matrix [C; CA; ...; CA^{n-1}].
Mat observability_matrix(const Mat& a, const Mat& c);

}  // namespace syncnet
