#pragma once

#include "syncnet/numerics.hpp"
#include "syncnet/sysmodel.hpp"

namespace syncnet {

struct InvariantFormOptions {
  double tol = 1e-12;
  long max_iter = 1'000'000;
  // Number of terms averaged per Cesaro pass (a power of two).
  int log2_window = 16;
  // Permit the vectorized null-space solve when averaging stalls.
  bool allow_fallback = true;
};

struct InvariantForm {
  Mat r;                  // SPD, trace normalized to its dimension
  double residual = 0.0;  // |F^T R F - R| / |R|
  long iterations = 0;    // averaged terms
  int passes = 0;
  bool used_fallback = false;
};

/// Symmetric positive definite R with F^T R F = R for F similar to an
/// orthogonal matrix. Built from Cesaro averages X = k^{-1} sum F^{iT} X0 F^i,
/// each pass restarting from the previous average (X0 = I for the first
/// pass); the window sum is formed by doubling. Throws NoConvergence when
/// the residual stays above tol * |R| after max_iter terms and no SPD
/// fallback solution exists (e.g. F has a nontrivial Jordan block).
InvariantForm solve_invariant_r(const Mat& f, const InvariantFormOptions& opts = {});

/// Null space of X -> F^T X F - X restricted to symmetric matrices, as an
/// orthonormal basis of symmetric matrices (Frobenius inner product).
std::vector<Mat> invariant_form_basis(const Mat& f, double rel_tol = 1e-8);

struct SynthesisOptions {
  double unit_tol = kDefaultUnitTol;
  double rank_tol = kDefaultRankTol;
  InvariantFormOptions invariant;
  // Replace C by an orthonormal compression when rank(CU) < m.
  bool reduce_outputs = false;
};

struct SynthesisResiduals {
  double invariance = 0.0;      // |F^T R F - R| / |R|
  double orthogonality = 0.0;   // |Q^T Q - I|
  double row_orthonormality = 0.0;  // |H H^T - I|
  double gain_identity = 0.0;   // |L C U R^{-1/2} - U F R^{-1/2} H^T H|
};

struct GainSynthesis {
  Mat l;      // n x m
  Mat r_mat;  // n1 x n1
  Mat h;      // m' x n1
  Mat q;      // n1 x n1, R^{1/2} F R^{-1/2}
  Mat r_sqrt, r_inv_sqrt;
  SpectralSplit split;
  int n1 = 0;
  int n2 = 0;
  // Output compression T (m' x m); identity unless outputs were reduced.
  Mat output_map;
  bool outputs_reduced = false;
  InvariantForm invariant;
  SynthesisResiduals residuals;
};

/// Output-feedback gain L = U F R^{-1/2} H^T (C U R^{-1/2} H^T)^{-1}; L = 0
/// when A has no unit-magnitude eigenvalue. Throws AssumptionViolated when
/// A is not neutrally stable or (C, A) is not detectable, RankDeficientCU
/// when rank(CU) < m without output reduction.
GainSynthesis synthesize(const LinearSystem& sys, const SynthesisOptions& opts = {});

struct ReducedOutputs {
  LinearSystem system;  // (A, T C)
  Mat t;                // m' x m, orthonormal rows spanning range(C U)
};

/// Compresses the outputs onto range(CU). A gain for the reduced system
/// lifts to the original outputs as L_reduced * T.
ReducedOutputs reduce_outputs(const LinearSystem& sys, const Mat& u,
                              double rank_tol = kDefaultRankTol);

/// Full-state-coupling gain K = L^T for x+ = A^T x + C^T u, given the dual
/// system matrices A^T (n x n) and C^T (n x m).
Mat synthesize_dual(const Mat& a_t, const Mat& c_t, const SynthesisOptions& opts = {});

}  // namespace syncnet
