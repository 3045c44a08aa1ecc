#include "syncnet/synthesis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "syncnet/error.hpp"

namespace syncnet {

namespace {

double invariance_residual(const Mat& f, const Mat& x) {
  const double scale = spectral_norm(x);
  if (!(scale > 0.0)) return std::numeric_limits<double>::infinity();
  return spectral_norm(f.transpose() * x * f - x) / scale;
}

Mat normalize_trace(const Mat& x) {
  Mat sym = 0.5 * (x + x.transpose());
  return sym * (static_cast<double>(sym.rows()) / sym.trace());
}

bool is_positive_definite(const Mat& x) {
  Eigen::SelfAdjointEigenSolver<Mat> es(x, Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();
  return ev(0) > 1e-10 * std::abs(ev(ev.size() - 1));
}

// Frobenius-orthonormal basis element of the symmetric matrices.
Mat symmetric_unit(int n, int i, int j) {
  Mat e = Mat::Zero(n, n);
  if (i == j) {
    e(i, i) = 1.0;
  } else {
    e(i, j) = e(j, i) = 1.0 / std::sqrt(2.0);
  }
  return e;
}

std::string describe_eigenvalues(const NeutralStabilityReport& report) {
  std::ostringstream out;
  out << "A is not neutrally stable; offending eigenvalues:";
  for (const auto& d : report.eigenvalues) {
    if (!d.ok) {
      out << " " << d.value << " (|.|=" << d.magnitude << ", alg "
          << d.algebraic << ", geo " << d.geometric << ")";
    }
  }
  return out.str();
}

}  // namespace

namespace {

// Matrix of X -> F^T X F - X in Frobenius-orthonormal coordinates of the
// symmetric matrices.
struct SymmetricCoordinates {
  int n = 0;
  std::vector<std::pair<int, int>> index;

  explicit SymmetricCoordinates(int dim) : n(dim) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) index.emplace_back(i, j);
    }
  }
  int size() const { return static_cast<int>(index.size()); }
  Vec to_vec(const Mat& x) const {
    Vec v(size());
    for (int k = 0; k < size(); ++k) {
      const auto [i, j] = index[k];
      v(k) = (i == j) ? x(i, i) : std::sqrt(2.0) * 0.5 * (x(i, j) + x(j, i));
    }
    return v;
  }
  Mat to_mat(const Vec& v) const {
    Mat x = Mat::Zero(n, n);
    for (int k = 0; k < size(); ++k) x += v(k) * symmetric_unit(n, index[k].first, index[k].second);
    return x;
  }
  Mat stein_operator(const Mat& f) const {
    Mat op(size(), size());
    for (int col = 0; col < size(); ++col) {
      const Mat e = symmetric_unit(n, index[col].first, index[col].second);
      op.col(col) = to_vec(f.transpose() * e * f - e);
    }
    return op;
  }
};

// Newton-type polish: subtract the minimum-norm symmetric correction that
// cancels the current Stein residual. Keeps the component along the null
// space, so the invariant form selected by averaging is preserved.
void polish(const Mat& f, InvariantForm& form) {
  const SymmetricCoordinates coords(static_cast<int>(f.rows()));
  Eigen::JacobiSVD<Mat> svd(coords.stein_operator(f), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  const double thr = 1e-8 * std::max(1.0, s(0));
  for (int step = 0; step < 3; ++step) {
    const Vec e = coords.to_vec(f.transpose() * form.r * f - form.r);
    const Vec ue = svd.matrixU().transpose() * e;
    Vec coeff = Vec::Zero(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      if (s(k) > thr) coeff(k) = ue(k) / s(k);
    }
    const Mat candidate = normalize_trace(form.r - coords.to_mat(svd.matrixV() * coeff));
    const double res = invariance_residual(f, candidate);
    if (!(res < form.residual)) break;
    form.r = candidate;
    form.residual = res;
  }
}

}  // namespace

std::vector<Mat> invariant_form_basis(const Mat& f, double rel_tol) {
  const SymmetricCoordinates coords(static_cast<int>(f.rows()));
  Eigen::JacobiSVD<Mat> svd(coords.stein_operator(f), Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  const double thr = rel_tol * std::max(1.0, s(0));
  std::vector<Mat> basis;
  for (int k = 0; k < coords.size(); ++k) {
    if (s(k) <= thr) basis.push_back(coords.to_mat(svd.matrixV().col(k)));
  }
  return basis;
}

InvariantForm solve_invariant_r(const Mat& f, const InvariantFormOptions& opts) {
  if (f.rows() != f.cols()) {
    throw std::invalid_argument("solve_invariant_r: F must be square");
  }
  const int n = static_cast<int>(f.rows());
  InvariantForm out;
  out.r = Mat::Identity(n, n);
  if (n == 0) return out;
  out.residual = invariance_residual(f, out.r);
  if (out.residual <= opts.tol) return out;

  const long window = 1L << opts.log2_window;
  Mat x = out.r;
  while (out.iterations < opts.max_iter) {
    // sum_{i=1}^{2^j} F^{iT} X F^i, doubled j times.
    Mat sum = f.transpose() * x * f;
    Mat power = f;
    for (int j = 0; j < opts.log2_window; ++j) {
      sum += power.transpose() * sum * power;
      power = power * power;
    }
    out.iterations += window;
    ++out.passes;
    if (!sum.allFinite()) break;
    x = normalize_trace(sum / static_cast<double>(window));
    out.r = x;
    out.residual = invariance_residual(f, x);
    if (out.residual <= opts.tol) {
      polish(f, out);
      return out;
    }
  }

  if (opts.allow_fallback) {
    const auto basis = invariant_form_basis(f);
    if (!basis.empty() && out.r.allFinite()) {
      Mat projected = Mat::Zero(n, n);
      for (const Mat& b : basis) projected += (b.cwiseProduct(out.r)).sum() * b;
      if (std::abs(projected.trace()) > 0.0) {
        projected = normalize_trace(projected);
        const double res = invariance_residual(f, projected);
        if (is_positive_definite(projected) && res <= 1e-10) {
          out.r = projected;
          out.residual = res;
          out.used_fallback = true;
          polish(f, out);
          return out;
        }
      }
    }
  }
  throw NoConvergence(out.residual, out.iterations);
}

ReducedOutputs reduce_outputs(const LinearSystem& sys, const Mat& u,
                              double rank_tol) {
  const Mat cu = sys.c() * u;
  Eigen::JacobiSVD<Mat> svd(cu, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  const int rank =
      (s.size() == 0 || !(s(0) > 0.0))
          ? 0
          : static_cast<int>((s.array() > rank_tol * s(0)).count());
  if (rank == 0) throw RankDeficientCU(0, sys.m());
  Mat t = normalize_orthonormal_rows(svd.matrixU().leftCols(rank).transpose());
  return ReducedOutputs{LinearSystem(sys.a(), t * sys.c()), std::move(t)};
}

GainSynthesis synthesize(const LinearSystem& sys, const SynthesisOptions& opts) {
  const auto neutral = check_neutral_stability(sys.a(), opts.unit_tol);
  if (!neutral.ok) throw AssumptionViolated(describe_eigenvalues(neutral));
  const auto detect = check_detectable(sys, opts.unit_tol);
  if (!detect.ok) {
    std::ostringstream msg;
    msg << "(C, A) is not detectable; unobserved marginal eigenvalues:";
    for (const auto& ev : detect.undetectable) msg << " " << ev;
    throw AssumptionViolated(msg.str());
  }

  GainSynthesis out;
  out.split = real_spectral_split(sys.a(), opts.unit_tol);
  out.n1 = out.split.n1;
  out.n2 = out.split.n2;
  out.output_map = Mat::Identity(sys.m(), sys.m());
  if (out.n1 == 0) {
    out.l = Mat::Zero(sys.n(), sys.m());
    return out;
  }

  const Mat& u = out.split.u;
  const Mat& f = out.split.f;
  Mat c = sys.c();
  const int rank_cu = numerical_rank(Mat(c * u), opts.rank_tol);
  if (rank_cu < sys.m()) {
    if (!opts.reduce_outputs) throw RankDeficientCU(rank_cu, sys.m());
    ReducedOutputs reduced = reduce_outputs(sys, u, opts.rank_tol);
    c = reduced.system.c();
    out.output_map = std::move(reduced.t);
    out.outputs_reduced = true;
  }

  out.invariant = solve_invariant_r(f, opts.invariant);
  out.r_mat = out.invariant.r;
  const SymmetricRoots roots = symmetric_roots(out.r_mat);
  out.r_sqrt = roots.sqrt;
  out.r_inv_sqrt = roots.inv_sqrt;

  const RangeProjection range =
      projector_from_range(out.r_inv_sqrt * u.transpose() * c.transpose(),
                           opts.rank_tol);
  if (range.rank != c.rows()) {
    throw RankDeficientCU(range.rank, static_cast<int>(c.rows()));
  }
  out.h = range.h;

  const Mat lead = u * f * out.r_inv_sqrt * out.h.transpose();   // n x m'
  const Mat square = c * u * out.r_inv_sqrt * out.h.transpose();  // m' x m'
  // lead * square^{-1}, via the transposed system.
  const Mat l_reduced =
      square.transpose().partialPivLu().solve(lead.transpose()).transpose();
  out.l = l_reduced * out.output_map;
  out.q = out.r_sqrt * f * out.r_inv_sqrt;

  const int n1 = out.n1;
  out.residuals.invariance = invariance_residual(f, out.r_mat);
  out.residuals.orthogonality =
      spectral_norm(out.q.transpose() * out.q - Mat::Identity(n1, n1));
  out.residuals.row_orthonormality = spectral_norm(
      out.h * out.h.transpose() - Mat::Identity(out.h.rows(), out.h.rows()));
  out.residuals.gain_identity =
      spectral_norm(out.l * sys.c() * u * out.r_inv_sqrt -
                    u * f * out.r_inv_sqrt * out.h.transpose() * out.h);
  return out;
}

Mat synthesize_dual(const Mat& a_t, const Mat& c_t, const SynthesisOptions& opts) {
  if (!check_stabilizable(a_t, c_t, opts.unit_tol)) {
    throw AssumptionViolated("(A^T, C^T) is not stabilizable");
  }
  return synthesize(LinearSystem(a_t.transpose(), c_t.transpose()), opts)
      .l.transpose();
}

}  // namespace syncnet
