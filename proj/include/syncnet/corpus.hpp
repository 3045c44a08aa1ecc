#pragma once

#include <random>

#include "syncnet/numerics.hpp"
#include "syncnet/sysmodel.hpp"
#include "syncnet/topology.hpp"

// Seeded generators for the property and acceptance corpora.
namespace syncnet::corpus {

using Rng = std::mt19937_64;

/// Haar-distributed orthogonal matrix.
Mat random_orthogonal(Rng& rng, int n);

/// S * diag(...) * S^T-style well-conditioned basis, cond <= 4.
Mat random_well_conditioned(Rng& rng, int n);

inline constexpr double kMinRotationAngle = 0.5;
inline constexpr double kMaxRotationAngle = 2.6;
inline constexpr double kMinAngleGap = 0.35;

/// blkdiag of rotations padded with at most one +1 and one -1. Angles lie in
/// [kMinRotationAngle, kMaxRotationAngle] and pairwise differ by at least
/// kMinAngleGap, so the spectrum is simple and well separated.
Mat random_unit_block(Rng& rng, int n);

/// Block diagonal with eigenvalue magnitudes in [0, 0.8].
Mat random_stable_block(Rng& rng, int n);

/// S * random_unit_block * S^{-1}.
Mat random_unit_spectrum(Rng& rng, int n);

/// min over eigenvalues with |lambda| >= 1 - unit_tol of the relative
/// smallest singular value of [A - lambda I; C].
double pbh_margin(const LinearSystem& sys, double unit_tol = kDefaultUnitTol);

/// Second-largest eigenvalue modulus of a square matrix.
double second_eigenvalue_modulus(const Mat& lambda);

inline constexpr double kMinPbhMargin = 0.08;
inline constexpr double kMaxSlem = 0.7;

/// Neutrally stable, detectable (A, C) with exactly n1 unit-magnitude
/// eigenvalues, rank(CU) = m and pbh_margin >= kMinPbhMargin. Requires
/// 1 <= m <= n1 <= n.
LinearSystem random_system(Rng& rng, int n, int n1, int m);

/// Random dimensions with n <= max_n, m <= min(max_m, n1).
LinearSystem random_system(Rng& rng, int max_n = 8, int max_m = 3);

/// Orthonormal-row H (m x n).
Mat random_orthonormal_rows(Rng& rng, int m, int n);

struct OrthogonalPair {
  Mat q;
  Mat h;
};

/// Q orthogonal with simple unit spectrum, H orthonormal rows, (H, Q)
/// observable.
OrthogonalPair random_orthogonal_pair(Rng& rng, int n, int m);

/// Erdos-Renyi arcs plus self-loops, uniform weights, rows normalized,
/// rejection-sampled until connected with second eigenvalue modulus at most
/// kMaxSlem.
Mat random_connected_lambda(Rng& rng, int p, double arc_prob = 0.4);

/// Directed ring with self-loops: lambda_ii = 1 - w, lambda_{i,i+1} = w.
Mat ring_lambda(int p, double w = 0.5);

}  // namespace syncnet::corpus
