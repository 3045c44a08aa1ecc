#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "syncnet/numerics.hpp"
#include "syncnet/sysmodel.hpp"
#include "syncnet/topology.hpp"

namespace syncnet {

/// States of all agents at time k; column i holds agent i.
struct NetworkState {
  long k = 0;
  Mat states;  // n x p

  int n() const { return static_cast<int>(states.rows()); }
  int p() const { return static_cast<int>(states.cols()); }
  /// [x_1; ...; x_p]
  Vec stacked() const;
  static NetworkState from_stacked(const Vec& stacked, int n, long k = 0);
};

// x_i+ = A x_i + L sum_j lambda_ij C (x_j - x_i)
NetworkState step_output_coupled(const LinearSystem& sys, const Mat& gain,
                                 const Topology& topo, const NetworkState& state);

// xi_i+ = Q xi_i + Q H^T H sum_j lambda_ij (xi_j - xi_i)
NetworkState step_orthogonal(const Mat& q, const Mat& h, const Topology& topo,
                             const NetworkState& state);

// x_i+ = A^T x_i + C^T K sum_j lambda_ij (x_j - x_i)
NetworkState step_dual(const Mat& a_t, const Mat& c_t, const Mat& k_gain,
                       const Topology& topo, const NetworkState& state);

/// Stacked closed-loop matrices, I (x) A + (Lambda - I) (x) (L C) and the
/// analogous forms; x(k+1) = M x(k) for the stacked state.
Mat closed_loop_output_coupled(const LinearSystem& sys, const Mat& gain,
                               const Topology& topo);
Mat closed_loop_orthogonal(const Mat& q, const Mat& h, const Topology& topo);
Mat closed_loop_dual(const Mat& a_t, const Mat& c_t, const Mat& k_gain,
                     const Topology& topo);

/// (r^T (x) A^k) x(0), by k incremental multiplications of the r-weighted
/// average of the initial states.
Vec predicted_trajectory(const Mat& a, const Topology& topo,
                         const NetworkState& initial, long k);

enum class CouplingMode { kOutputCoupled, kOrthogonal, kDual };

const char* to_string(CouplingMode mode);
std::optional<CouplingMode> parse_mode(const std::string& text);

inline constexpr double kDefaultOverflowBound = 1e12;

/// A fully validated simulation setup.
///   kOutputCoupled: system = (A, C), gain = L (n x m)
///   kOrthogonal:    system = (Q, H), gain unused
///   kDual:          system = (A, C) of the primal; the network runs
///                   A^T, C^T with gain = K (m x n)
struct Scenario {
  CouplingMode mode = CouplingMode::kOutputCoupled;
  LinearSystem system{Mat::Identity(1, 1), Mat::Identity(1, 1)};
  Topology topology = Topology::create(Mat::Identity(1, 1));
  Mat gain;
  NetworkState initial;
  long horizon = 0;
  long snapshot_stride = 1;
  double overflow_bound = kDefaultOverflowBound;
  // First step with e(k) <= threshold is reported.
  double threshold = 1e-6;
  std::uint64_t seed = 0;
};

/// Uniform on [-1, 1]^n per agent, seeded.
NetworkState random_initial_state(int n, int p, std::uint64_t seed);

struct SimulationTrace {
  std::string digest;
  std::vector<NetworkState> snapshots;
  std::vector<double> sync_error;     // max_i |x_i(k) - xbar(k)|
  std::vector<double> disagreement;   // max_{i,j} |x_i(k) - x_j(k)|
  std::optional<long> first_below_threshold;
  // Orthogonal mode only: max_k |m(k) - m(0)| for the rotated r-average
  // m(k) = (r^T (x) I)(I (x) Q^{-k}) xi(k).
  std::optional<double> conservation_residual;
};

/// Runs the scenario for `horizon` steps. Throws DivergenceDetected when a
/// state entry leaves [-overflow_bound, overflow_bound] or becomes non-finite.
SimulationTrace run(const Scenario& scenario);

/// Stable 64-bit FNV-1a digest of the scenario configuration, hex encoded.
std::string scenario_digest(const Scenario& scenario);

}  // namespace syncnet
