#include "syncnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "syncnet/error.hpp"

namespace syncnet {

namespace {

// Nodes from which `target` is reachable (target included).
std::vector<bool> reaches(const Mat& lambda, int target) {
  const int p = static_cast<int>(lambda.rows());
  std::vector<bool> seen(p, false);
  std::deque<int> frontier{target};
  seen[target] = true;
  while (!frontier.empty()) {
    const int j = frontier.front();
    frontier.pop_front();
    for (int i = 0; i < p; ++i) {
      if (!seen[i] && lambda(i, j) > 0.0) {
        seen[i] = true;
        frontier.push_back(i);
      }
    }
  }
  return seen;
}

Mat power_by_squaring(const Mat& base, int exponent) {
  Mat result = Mat::Identity(base.rows(), base.cols());
  Mat square = base;
  while (exponent > 0) {
    if (exponent & 1) result = result * square;
    exponent >>= 1;
    if (exponent > 0) square = square * square;
  }
  return result;
}

}  // namespace

ConnectivityReport validate_connected(const Mat& lambda) {
  ConnectivityReport report;
  if (lambda.rows() != lambda.cols() || lambda.rows() == 0) {
    report.violations.push_back("coupling matrix must be non-empty and square");
    return report;
  }
  const int p = static_cast<int>(lambda.rows());

  report.entries_ok = true;
  for (int i = 0; i < p; ++i) {
    if (!(lambda(i, i) > 0.0)) {
      report.entries_ok = false;
      report.violations.push_back("diagonal entry (" + std::to_string(i) + "," +
                                  std::to_string(i) + ") is not positive");
    }
    for (int j = 0; j < p; ++j) {
      if (!std::isfinite(lambda(i, j)) || lambda(i, j) < 0.0) {
        report.entries_ok = false;
        report.violations.push_back("entry (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") is negative or not finite");
      }
    }
  }

  report.rows_ok = true;
  for (int i = 0; i < p; ++i) {
    const double sum = lambda.row(i).sum();
    if (!(std::abs(sum - 1.0) <= kRowSumTol)) {
      report.rows_ok = false;
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << i << " sums to " << sum;
      report.violations.push_back(msg.str());
    }
  }

  for (int t = 0; t < p; ++t) {
    const auto seen = reaches(lambda, t);
    if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
      report.roots.push_back(t);
    }
  }
  report.graph_ok = !report.roots.empty();
  if (!report.graph_ok) {
    report.violations.push_back("no node is reachable from every other node");
  }
  return report;
}

Vec stationary_vector(const Mat& lambda) {
  const Eigen::Index p = lambda.rows();
  const Mat shifted = lambda.transpose() - Mat::Identity(p, p);
  Eigen::JacobiSVD<Mat> svd(shifted, Eigen::ComputeFullV);
  Vec r = svd.matrixV().col(p - 1);
  const double total = r.sum();
  if (!(std::abs(total) > 1e-300)) {
    throw ConvergenceFailure("stationary null vector sums to zero");
  }
  r /= total;
  for (Eigen::Index i = 0; i < p; ++i) {
    if (r(i) < -1e-12) {
      throw ConvergenceFailure("stationary vector has a negative entry " +
                               std::to_string(r(i)));
    }
    if (r(i) < 0.0) r(i) = 0.0;
  }
  r /= r.sum();

  const Mat limit = power_by_squaring(lambda, kStationaryPowerCheck);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    worst = std::max(worst, (limit.row(i).transpose() - r).cwiseAbs().maxCoeff());
  }
  if (!(worst <= 1e-8)) {
    throw ConvergenceFailure(
        "null-space and power-iteration stationary vectors disagree by " +
        std::to_string(worst));
  }
  return r;
}

Topology Topology::create(Mat lambda, bool allow_disconnected) {
  ConnectivityReport report = validate_connected(lambda);
  if (!report.entries_ok || !report.rows_ok ||
      (!report.graph_ok && !allow_disconnected)) {
    std::string msg = "coupling matrix is not connected:";
    for (const auto& v : report.violations) msg += " " + v + ";";
    throw InputError(msg);
  }
  Vec r;
  if (report.graph_ok) {
    r = stationary_vector(lambda);
  } else {
    const Mat limit = power_by_squaring(lambda, kStationaryPowerCheck);
    r = limit.colwise().mean().transpose();
    r /= r.sum();
  }
  const bool connected = report.graph_ok;
  return Topology(std::move(lambda), std::move(r), connected, std::move(report));
}

std::vector<double> deviation_from_limit(const Topology& topo, int horizon) {
  const int p = topo.p();
  const Mat limit = Vec::Ones(p) * topo.r().transpose();
  std::vector<double> dev;
  dev.reserve(horizon + 1);
  Mat power = Mat::Identity(p, p);
  for (int k = 0; k <= horizon; ++k) {
    dev.push_back(spectral_norm(power - limit));
    power = power * topo.lambda();
  }
  return dev;
}

DecayConstants decay_constants(const Topology& topo, int horizon) {
  Eigen::EigenSolver<Mat> es(topo.lambda(), false);
  std::vector<double> mags;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    mags.push_back(std::abs(es.eigenvalues()(i)));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  DecayConstants out;
  out.sigma = (mags.size() > 1 ? mags[1] : 0.0) + 1e-12;
  const double log_sigma = std::log(out.sigma);
  const auto dev = deviation_from_limit(topo, horizon);
  for (int k = 0; k <= horizon; ++k) {
    if (dev[k] <= kDecayNoiseFloor) continue;
    out.c = std::max(out.c, std::exp(std::log(dev[k]) - k * log_sigma));
  }
  return out;
}

}  // namespace syncnet
