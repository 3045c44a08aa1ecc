#include "syncnet/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "syncnet/error.hpp"

namespace syncnet {

Vec NetworkState::stacked() const {
  return Eigen::Map<const Vec>(states.data(), states.size());
}

NetworkState NetworkState::from_stacked(const Vec& stacked, int n, long k) {
  NetworkState s;
  s.k = k;
  s.states = Eigen::Map<const Mat>(stacked.data(), n, stacked.size() / n);
  return s;
}

namespace {

// Column i: sum_j lambda_ij (v_j - v_i).
Mat diffusive_sum(const Mat& lambda, const Mat& values) {
  const Eigen::Index p = values.cols();
  Mat z = Mat::Zero(values.rows(), p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (j == i || lambda(i, j) == 0.0) continue;
      z.col(i) += lambda(i, j) * (values.col(j) - values.col(i));
    }
  }
  return z;
}

Mat coupling_kron(const Topology& topo, const Mat& block) {
  const int p = topo.p();
  return kron(topo.lambda() - Mat::Identity(p, p), block);
}

double max_disagreement(const Mat& x) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < x.cols(); ++j) {
      worst = std::max(worst, (x.col(i) - x.col(j)).norm());
    }
  }
  return worst;
}

double max_deviation(const Mat& x, const Vec& target) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    worst = std::max(worst, (x.col(i) - target).norm());
  }
  return worst;
}

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  template <typename T>
  void value(const T& v) {
    bytes(&v, sizeof(T));
  }
  void matrix(const Mat& m) {
    value(static_cast<std::int64_t>(m.rows()));
    value(static_cast<std::int64_t>(m.cols()));
    bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace

NetworkState step_output_coupled(const LinearSystem& sys, const Mat& gain,
                                 const Topology& topo, const NetworkState& state) {
  NetworkState next;
  next.k = state.k + 1;
  next.states = sys.a() * state.states +
                gain * diffusive_sum(topo.lambda(), sys.c() * state.states);
  return next;
}

NetworkState step_orthogonal(const Mat& q, const Mat& h, const Topology& topo,
                             const NetworkState& state) {
  NetworkState next;
  next.k = state.k + 1;
  const Mat qhth = q * h.transpose() * h;
  next.states = q * state.states + qhth * diffusive_sum(topo.lambda(), state.states);
  return next;
}

NetworkState step_dual(const Mat& a_t, const Mat& c_t, const Mat& k_gain,
                       const Topology& topo, const NetworkState& state) {
  NetworkState next;
  next.k = state.k + 1;
  next.states = a_t * state.states +
                c_t * (k_gain * diffusive_sum(topo.lambda(), state.states));
  return next;
}

Mat closed_loop_output_coupled(const LinearSystem& sys, const Mat& gain,
                               const Topology& topo) {
  return kron(Mat::Identity(topo.p(), topo.p()), sys.a()) +
         coupling_kron(topo, gain * sys.c());
}

Mat closed_loop_orthogonal(const Mat& q, const Mat& h, const Topology& topo) {
  return kron(Mat::Identity(topo.p(), topo.p()), q) +
         coupling_kron(topo, q * h.transpose() * h);
}

Mat closed_loop_dual(const Mat& a_t, const Mat& c_t, const Mat& k_gain,
                     const Topology& topo) {
  return kron(Mat::Identity(topo.p(), topo.p()), a_t) +
         coupling_kron(topo, c_t * k_gain);
}

Vec predicted_trajectory(const Mat& a, const Topology& topo,
                         const NetworkState& initial, long k) {
  Vec xbar = initial.states * topo.r();
  for (long t = 0; t < k; ++t) xbar = a * xbar;
  return xbar;
}

const char* to_string(CouplingMode mode) {
  switch (mode) {
    case CouplingMode::kOutputCoupled:
      return "output_coupled";
    case CouplingMode::kOrthogonal:
      return "orthogonal";
    case CouplingMode::kDual:
      return "dual";
  }
  return "unknown";
}

std::optional<CouplingMode> parse_mode(const std::string& text) {
  if (text == "output_coupled") return CouplingMode::kOutputCoupled;
  if (text == "orthogonal") return CouplingMode::kOrthogonal;
  if (text == "dual") return CouplingMode::kDual;
  return std::nullopt;
}

NetworkState random_initial_state(int n, int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  NetworkState s;
  s.states.resize(n, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < n; ++j) s.states(j, i) = unit(rng);
  }
  return s;
}

std::string scenario_digest(const Scenario& scenario) {
  Fnv1a h;
  h.value(static_cast<int>(scenario.mode));
  h.matrix(scenario.system.a());
  h.matrix(scenario.system.c());
  h.matrix(scenario.topology.lambda());
  h.matrix(scenario.gain);
  h.matrix(scenario.initial.states);
  h.value(scenario.seed);
  h.value(scenario.horizon);
  h.value(scenario.snapshot_stride);
  return h.hex();
}

SimulationTrace run(const Scenario& sc) {
  const Topology& topo = sc.topology;
  const Mat& a = sc.system.a();
  const Mat& c = sc.system.c();
  const Mat a_t = a.transpose();
  const Mat c_t = c.transpose();
  const long stride = std::max<long>(1, sc.snapshot_stride);

  // Dynamics of the predicted synchronization trajectory.
  const Mat& drift = sc.mode == CouplingMode::kDual ? a_t : a;

  SimulationTrace trace;
  trace.digest = scenario_digest(sc);
  trace.sync_error.reserve(sc.horizon + 1);
  trace.disagreement.reserve(sc.horizon + 1);

  NetworkState state = sc.initial;
  state.k = 0;
  Vec xbar = state.states * topo.r();

  Mat q_inv_power;
  Vec rotated_average0;
  if (sc.mode == CouplingMode::kOrthogonal) {
    q_inv_power = Mat::Identity(a.rows(), a.cols());
    rotated_average0 = xbar;
    trace.conservation_residual = 0.0;
  }
  const Mat q_inv = sc.mode == CouplingMode::kOrthogonal ? Mat(a.inverse()) : Mat();

  for (long k = 0;; ++k) {
    const double peak = state.states.size() ? state.states.cwiseAbs().maxCoeff() : 0.0;
    if (!std::isfinite(peak) || peak > sc.overflow_bound) {
      throw DivergenceDetected(k, peak);
    }
    const double e = max_deviation(state.states, xbar);
    trace.sync_error.push_back(e);
    trace.disagreement.push_back(max_disagreement(state.states));
    if (!trace.first_below_threshold && e <= sc.threshold) {
      trace.first_below_threshold = k;
    }
    if (sc.mode == CouplingMode::kOrthogonal) {
      const Vec rotated = q_inv_power * (state.states * topo.r());
      *trace.conservation_residual = std::max(
          *trace.conservation_residual, (rotated - rotated_average0).norm());
      q_inv_power = q_inv * q_inv_power;
    }
    if (k % stride == 0 || k == sc.horizon) trace.snapshots.push_back(state);
    if (k == sc.horizon) break;

    switch (sc.mode) {
      case CouplingMode::kOutputCoupled:
        state = step_output_coupled(sc.system, sc.gain, topo, state);
        break;
      case CouplingMode::kOrthogonal:
        state = step_orthogonal(a, c, topo, state);
        break;
      case CouplingMode::kDual:
        state = step_dual(a_t, c_t, sc.gain, topo, state);
        break;
    }
    xbar = drift * xbar;
  }
  return trace;
}

}  // namespace syncnet
