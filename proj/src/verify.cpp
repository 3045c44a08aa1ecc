#include "syncnet/verify.hpp"

#include <bit>
#include <random>

#include "syncnet/error.hpp"
#include "syncnet/sysmodel.hpp"

namespace syncnet {

ProjectionSequence make_projection_sequence(const Mat& q, const Mat& h, int horizon) {
  ProjectionSequence seq;
  seq.q = q;
  seq.h = h;
  seq.horizon = horizon;
  const Eigen::Index n = q.rows();
  Mat power = Mat::Identity(n, n);
  for (int i = 0; i < horizon; ++i) {
    const Mat hq = h * power;
    seq.p.push_back(hq.transpose() * hq);
    seq.v.push_back(Mat::Identity(n, n) - seq.p.back());
    power = power * q;
  }
  return seq;
}

double projection_product_norm(const Mat& q, const Mat& h, int count) {
  const auto seq = make_projection_sequence(q, h, count);
  Mat prod = Mat::Identity(q.rows(), q.cols());
  for (int i = 0; i < count; ++i) prod = seq.v[i] * prod;
  return spectral_norm(prod);
}

double lemma2_alpha(const Mat& q, const Mat& h) {
  const auto report = check_b_assumptions(q, h);
  if (!report.ok()) {
    throw AssumptionViolated(
        std::string("(Q, H) violates:") + (report.orthogonal ? "" : " Q orthogonal;") +
        (report.orthonormal_rows ? "" : " H H^T = I;") +
        (report.observable ? "" : " (H, Q) observable;"));
  }
  return projection_product_norm(q, h, static_cast<int>(q.rows()));
}

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

namespace {

void require_enumerable(const ProjectionSequence& seq, int k) {
  if (k > kMaxEnumerationHorizon) {
    throw TooLarge("enumeration horizon " + std::to_string(k) + " exceeds " +
                   std::to_string(kMaxEnumerationHorizon));
  }
  if (k < 0 || k > seq.horizon) {
    throw std::invalid_argument("enumeration horizon outside the sequence");
  }
}

// L_{k-1} ... L_0 with L_i = P_i where bit i of mask is set.
Mat ordered_product(const ProjectionSequence& seq, unsigned mask, int k) {
  Mat prod = Mat::Identity(seq.q.rows(), seq.q.cols());
  for (int i = 0; i < k; ++i) {
    prod = ((mask >> i) & 1U ? seq.p[i] : seq.v[i]) * prod;
  }
  return prod;
}

}  // namespace

EnumeratedProducts enumerate_m(const ProjectionSequence& seq, int ell, int k) {
  require_enumerable(seq, k);
  const Eigen::Index n = seq.q.rows();
  EnumeratedProducts out{Mat::Zero(n, n), 0};
  for (unsigned mask = 0; mask < (1U << k); ++mask) {
    if (std::popcount(mask) != ell) continue;
    out.sum += ordered_product(seq, mask, k);
    ++out.count;
  }
  return out;
}

EnumeratedProducts enumerate_m(const Mat& q, const Mat& h, int ell, int k) {
  if (k > kMaxEnumerationHorizon) {
    throw TooLarge("enumeration horizon " + std::to_string(k) + " exceeds " +
                   std::to_string(kMaxEnumerationHorizon));
  }
  return enumerate_m(make_projection_sequence(q, h, k), ell, k);
}

std::vector<EnumeratedProducts> enumerate_m_family(const ProjectionSequence& seq, int k) {
  require_enumerable(seq, k);
  const Eigen::Index n = seq.q.rows();
  std::vector<EnumeratedProducts> out(k + 1, EnumeratedProducts{Mat::Zero(n, n), 0});
  for (unsigned mask = 0; mask < (1U << k); ++mask) {
    auto& slot = out[std::popcount(mask)];
    slot.sum += ordered_product(seq, mask, k);
    ++slot.count;
  }
  return out;
}

Mat omega_2_4_listed_sum(const ProjectionSequence& seq) {
  if (seq.horizon < 4) throw std::invalid_argument("omega_2_4_listed_sum needs horizon >= 4");
  const auto& p = seq.p;
  const auto& v = seq.v;
  return v[3] * v[2] * p[1] * p[0] + v[3] * p[2] * v[1] * p[0] + p[3] * v[2] * v[1] * p[0] +
         v[3] * p[2] * p[1] * v[0] + p[3] * v[2] * p[1] * v[0] + p[3] * p[2] * v[1] * v[0];
}

std::vector<Mat> m_family(const ProjectionSequence& seq, int k) {
  if (k < 0 || k > seq.horizon) {
    throw std::invalid_argument("recurrence horizon outside the sequence");
  }
  const Eigen::Index n = seq.q.rows();
  std::vector<Mat> m{Mat::Identity(n, n)};
  for (int t = 0; t < k; ++t) {
    std::vector<Mat> next(t + 2);
    next[0] = seq.v[t] * m[0];
    for (int l = 1; l <= t; ++l) next[l] = seq.v[t] * m[l] + seq.p[t] * m[l - 1];
    next[t + 1] = seq.p[t] * m[t];
    m = std::move(next);
  }
  return m;
}

PartitionReport check_partition_identities(const Mat& q, const Mat& h, int k,
                                           std::uint64_t seed, int unit_vectors,
                                           double tol) {
  if (k > kMaxEnumerationHorizon) {
    throw TooLarge("enumeration horizon " + std::to_string(k) + " exceeds " +
                   std::to_string(kMaxEnumerationHorizon));
  }
  const Eigen::Index n = q.rows();
  const auto seq = make_projection_sequence(q, h, k);
  const auto enumerated = enumerate_m_family(seq, k);
  const auto recursive = m_family(seq, k);

  PartitionReport report;
  report.k = k;
  report.cardinality_ok = true;
  Mat total = Mat::Zero(n, n);
  for (int l = 0; l <= k; ++l) {
    total += recursive[l];
    report.max_norm = std::max(report.max_norm, spectral_norm(recursive[l]));
    report.recurrence_deviation = std::max(
        report.recurrence_deviation, spectral_norm(recursive[l] - enumerated[l].sum));
    if (enumerated[l].count != binomial(k, l)) report.cardinality_ok = false;
  }
  report.sum_deviation = spectral_norm(total - Mat::Identity(n, n));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int t = 0; t < unit_vectors; ++t) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
    v.normalize();
    double energy = 0.0;
    for (int l = 0; l <= k; ++l) energy += (recursive[l] * v).squaredNorm();
    report.energy_deviation = std::max(report.energy_deviation, std::abs(energy - 1.0));
  }

  report.pass = report.sum_deviation <= tol && report.max_norm <= 1.0 + 1e-12 &&
                report.energy_deviation <= tol &&
                report.recurrence_deviation <= 1e-12 && report.cardinality_ok;
  return report;
}

PhiReport check_phi_limit(const Mat& q, const Mat& h, const Topology& topo,
                          int k_max, double tol) {
  const int p = topo.p();
  const Eigen::Index n = q.rows();
  const Mat identity_p = Mat::Identity(p, p);
  const Mat target = kron(Vec::Ones(p) * topo.r().transpose(), Mat::Identity(n, n));

  PhiReport report;
  report.k_max = k_max;
  Mat phi = Mat::Identity(p * n, p * n);
  Mat power = Mat::Identity(n, n);
  int next_checkpoint = 1;
  for (int tau = 0; tau < k_max; ++tau) {
    const Mat hq = h * power;
    const Mat proj = hq.transpose() * hq;
    const Mat comp = Mat::Identity(n, n) - proj;
    phi = (kron(identity_p, comp) + kron(topo.lambda(), proj)) * phi;
    power = power * q;
    const int k = tau + 1;
    if (k == next_checkpoint || k == k_max) {
      report.checkpoints.emplace_back(k, spectral_norm(phi - target));
      if (k == next_checkpoint) next_checkpoint *= 2;
    }
  }
  report.final_deviation = spectral_norm(phi - target);
  report.pass = report.final_deviation <= tol;
  return report;
}

}  // namespace syncnet
