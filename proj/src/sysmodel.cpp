#include "syncnet/sysmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace syncnet {

LinearSystem::LinearSystem(Mat a, Mat c) : a_(std::move(a)), c_(std::move(c)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols()) {
    throw std::invalid_argument("A must be a non-empty square matrix");
  }
  if (c_.rows() == 0 || c_.cols() != a_.cols()) {
    throw std::invalid_argument("C must have at least one row and n columns");
  }
  if (!a_.allFinite() || !c_.allFinite()) {
    throw std::invalid_argument("system matrices must be finite");
  }
}

namespace {

struct Cluster {
  std::vector<int> members;
  std::complex<double> center;
  double spread = 0.0;
};

// Single-linkage clustering of eigenvalues within `tol`.
std::vector<Cluster> cluster_eigenvalues(const CVec& ev, double tol) {
  const int n = static_cast<int>(ev.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(ev(i) - ev(j)) <= tol) parent[find(i)] = find(j);
    }
  }
  std::vector<Cluster> clusters;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[slot[root]].members.push_back(i);
  }
  for (Cluster& c : clusters) {
    std::complex<double> sum = 0.0;
    for (int i : c.members) sum += ev(i);
    c.center = sum / static_cast<double>(c.members.size());
    for (int i : c.members) c.spread = std::max(c.spread, std::abs(ev(i) - c.center));
  }
  return clusters;
}

// Singular values of (A - center I) at or below this count as null
// directions of the cluster.
double null_threshold(const Cluster& c, double a_norm, double rel_tol) {
  return std::max(rel_tol, 100.0 * c.spread) * std::max(1.0, a_norm);
}

CVec eigenvalues_of(const Mat& a) {
  Eigen::EigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue computation failed");
  }
  return es.eigenvalues();
}

}  // namespace

NeutralStabilityReport check_neutral_stability(const Mat& a, double unit_tol,
                                               double cluster_tol) {
  NeutralStabilityReport report;
  report.unit_tol = unit_tol;
  report.cluster_tol = cluster_tol;
  const int n = static_cast<int>(a.rows());
  const CVec ev = eigenvalues_of(a);
  const double a_norm = spectral_norm(a);
  report.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& d = report.eigenvalues[i];
    d.value = ev(i);
    d.magnitude = std::abs(ev(i));
    d.on_unit_circle = std::abs(d.magnitude - 1.0) <= unit_tol;
    d.ok = d.magnitude <= 1.0 + unit_tol;
  }

  for (const Cluster& c : cluster_eigenvalues(ev, cluster_tol)) {
    const int algebraic = static_cast<int>(c.members.size());
    int geometric = algebraic;
    const bool marginal = std::any_of(
        c.members.begin(), c.members.end(),
        [&](int i) { return report.eigenvalues[i].magnitude >= 1.0 - unit_tol; });
    if (marginal) {
      const CMat shifted =
          a.cast<std::complex<double>>() - c.center * CMat::Identity(n, n);
      Eigen::JacobiSVD<CMat> svd(shifted);
      const double thr = null_threshold(c, a_norm, kDefaultRankTol);
      geometric = static_cast<int>((svd.singularValues().array() <= thr).count());
    }
    for (int i : c.members) {
      auto& d = report.eigenvalues[i];
      d.algebraic = algebraic;
      d.geometric = geometric;
      if (marginal && geometric < algebraic) d.ok = false;
    }
  }
  report.ok = std::all_of(report.eigenvalues.begin(), report.eigenvalues.end(),
                          [](const EigenvalueDiagnostic& d) { return d.ok; });
  return report;
}

DetectabilityReport check_detectable(const LinearSystem& sys, double unit_tol,
                                     double rank_tol) {
  DetectabilityReport report;
  report.unit_tol = unit_tol;
  report.rank_tol = rank_tol;
  const int n = sys.n();
  const CVec ev = eigenvalues_of(sys.a());
  const double a_norm = spectral_norm(sys.a());
  for (const Cluster& c : cluster_eigenvalues(ev, kDefaultClusterTol)) {
    if (std::abs(c.center) < 1.0 - unit_tol) continue;
    CMat pbh(n + sys.m(), n);
    pbh.topRows(n) =
        sys.a().cast<std::complex<double>>() - c.center * CMat::Identity(n, n);
    pbh.bottomRows(sys.m()) = sys.c().cast<std::complex<double>>();
    Eigen::JacobiSVD<CMat> svd(pbh);
    const Vec& s = svd.singularValues();
    const double thr =
        std::max(rank_tol * s(0), null_threshold(c, a_norm, 0.0));
    const int rank = static_cast<int>((s.array() > thr).count());
    if (rank < n) report.undetectable.push_back(c.center);
  }
  report.ok = report.undetectable.empty();
  return report;
}

Mat observability_matrix(const Mat& a, const Mat& c) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = c.rows();
  Mat obs(n * m, n);
  Mat block = c;
  for (Eigen::Index k = 0; k < n; ++k) {
    obs.middleRows(k * m, m) = block;
    block = block * a;
  }
  return obs;
}

bool check_observable(const LinearSystem& sys, double rank_tol) {
  return numerical_rank(observability_matrix(sys.a(), sys.c()), rank_tol) ==
         sys.n();
}

bool check_stabilizable(const Mat& a, const Mat& b, double unit_tol) {
  return check_detectable(LinearSystem(a.transpose(), b.transpose()), unit_tol)
      .ok;
}

BAssumptionReport check_b_assumptions(const Mat& q, const Mat& h, double tol) {
  BAssumptionReport report;
  if (q.rows() != q.cols() || h.cols() != q.rows() || h.rows() == 0) {
    return report;
  }
  report.orthogonality_residual =
      spectral_norm(q.transpose() * q - Mat::Identity(q.rows(), q.cols()));
  report.row_residual =
      spectral_norm(h * h.transpose() - Mat::Identity(h.rows(), h.rows()));
  report.orthogonal = report.orthogonality_residual <= tol;
  report.orthonormal_rows = report.row_residual <= tol;
  report.observable = check_observable(LinearSystem(q, h));
  return report;
}

AssumptionReport check_assumptions(const LinearSystem& sys, double unit_tol) {
  AssumptionReport report;
  report.neutral_stability = check_neutral_stability(sys.a(), unit_tol);
  report.detectability = check_detectable(sys, unit_tol);
  report.observable = check_observable(sys);
  return report;
}

}  // namespace syncnet
