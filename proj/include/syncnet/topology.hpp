#pragma once

#include <optional>
#include <string>
#include <vector>

#include "syncnet/numerics.hpp"

namespace syncnet {

inline constexpr double kRowSumTol = 1e-12;

/// Outcome of the three connectedness conditions on a coupling matrix:
/// (i) positive diagonal and nonnegative entries, (ii) unit row sums,
/// (iii) some node reachable from every other node along arcs i -> j with
/// lambda_ij > 0.
struct ConnectivityReport {
  bool entries_ok = false;
  bool rows_ok = false;
  bool graph_ok = false;
  std::vector<std::string> violations;
  // Nodes reachable from every other node.
  std::vector<int> roots;
  bool ok() const { return entries_ok && rows_ok && graph_ok; }
};

ConnectivityReport validate_connected(const Mat& lambda);

/// Row-stochastic coupling matrix with its stationary vector r
/// (r^T Lambda = r^T, r^T 1 = 1, r >= 0).
class Topology {
 public:
  /// Validates `lambda`; throws InputError unless it is connected. With
  /// allow_disconnected the entry/row conditions are still enforced but the
  /// graph condition is waived and r is taken from the rows of Lambda^512.
  static Topology create(Mat lambda, bool allow_disconnected = false);

  const Mat& lambda() const { return lambda_; }
  int p() const { return static_cast<int>(lambda_.rows()); }
  const Vec& r() const { return r_; }
  bool connected() const { return connected_; }
  const ConnectivityReport& report() const { return report_; }

 private:
  Topology(Mat lambda, Vec r, bool connected, ConnectivityReport report)
      : lambda_(std::move(lambda)),
        r_(std::move(r)),
        connected_(connected),
        report_(std::move(report)) {}

  Mat lambda_;
  Vec r_;
  bool connected_;
  ConnectivityReport report_;
};

inline constexpr int kStationaryPowerCheck = 512;

/// Stationary vector from the null space of (Lambda^T - I), cross-validated
/// against the rows of Lambda^512. Throws ConvergenceFailure if they differ
/// by more than 1e-8.
Vec stationary_vector(const Mat& lambda);

/// Constants of the geometric bound |Lambda^k - 1 r^T| <= c sigma^k.
struct DecayConstants {
  double c = 1.0;
  double sigma = 0.0;
};

/// sigma is the second-largest eigenvalue modulus (plus 1e-12 slack) and c
/// the smallest constant >= 1 satisfying the bound for k <= horizon. Powers
/// whose deviation is at rounding level (below kDecayNoiseFloor) are treated
/// as converged and do not constrain c.
inline constexpr double kDecayNoiseFloor = 1e-13;
DecayConstants decay_constants(const Topology& topo, int horizon);

/// |Lambda^k - 1 r^T| for k = 0..horizon.
std::vector<double> deviation_from_limit(const Topology& topo, int horizon);

}  // namespace syncnet
