#pragma once

#include <cstdint>
#include <vector>

#include "syncnet/numerics.hpp"
#include "syncnet/topology.hpp"

namespace syncnet {

/// P_i = Q^{iT} H^T H Q^i and V_i = I - P_i for i < horizon.
struct ProjectionSequence {
  Mat q, h;
  int horizon = 0;
  std::vector<Mat> p, v;
};

ProjectionSequence make_projection_sequence(const Mat& q, const Mat& h, int horizon);

/// |V_{count-1} ... V_0| without checking any assumption on (Q, H).
double projection_product_norm(const Mat& q, const Mat& h, int count);

/// alpha = |V_{n-1} ... V_0| with n = dim Q. Throws AssumptionViolated unless
/// Q is orthogonal, H H^T = I and (H, Q) is observable.
double lemma2_alpha(const Mat& q, const Mat& h);

inline constexpr int kMaxEnumerationHorizon = 14;

struct EnumeratedProducts {
  Mat sum;         // M_{l,k}
  long count = 0;  // number of products summed
};

/// M_{l,k} as the explicit sum over every product L_{k-1} ... L_0 with
/// exactly l factors equal to P_i. Throws TooLarge for k > 14.
EnumeratedProducts enumerate_m(const ProjectionSequence& seq, int ell, int k);
EnumeratedProducts enumerate_m(const Mat& q, const Mat& h, int ell, int k);

/// All M_{l,k}, l = 0..k, by one pass over the 2^k products.
std::vector<EnumeratedProducts> enumerate_m_family(const ProjectionSequence& seq, int k);

/// V3V2P1P0 + V3P2V1P0 + P3V2V1P0 + V3P2P1V0 + P3V2P1V0 + P3P2V1V0, written
/// out term by term. Needs horizon >= 4.
Mat omega_2_4_listed_sum(const ProjectionSequence& seq);

/// All M_{l,k}, l = 0..k, via M_{l,k+1} = V_k M_{l,k} + P_k M_{l-1,k}.
std::vector<Mat> m_family(const ProjectionSequence& seq, int k);

struct PartitionReport {
  int k = 0;
  double sum_deviation = 0.0;      // |sum_l M_{l,k} - I|
  double max_norm = 0.0;           // max_l |M_{l,k}|
  double energy_deviation = 0.0;   // max_v |sum_l |M_{l,k} v|^2 - 1|
  double recurrence_deviation = 0.0;  // recurrence vs enumeration
  bool cardinality_ok = false;     // #Omega_{l,k} = C(k, l)
  bool pass = false;
};

/// Checks the partition identities of the M family at horizon k, drawing
/// `unit_vectors` random unit vectors from `seed`. Throws TooLarge for k > 14.
PartitionReport check_partition_identities(const Mat& q, const Mat& h, int k,
                                           std::uint64_t seed = 1,
                                           int unit_vectors = 20,
                                           double tol = 1e-10);

struct PhiReport {
  int k_max = 0;
  double final_deviation = 0.0;  // |Phi(k_max, 0) - 1 r^T (x) I|
  // (k, deviation) at powers of two and k_max.
  std::vector<std::pair<int, double>> checkpoints;
  bool pass = false;
};

/// Iterates Phi(k, 0) = prod (I_p (x) V_tau + Lambda (x) P_tau) and compares
/// against 1 r^T (x) I_n.
PhiReport check_phi_limit(const Mat& q, const Mat& h, const Topology& topo,
                          int k_max, double tol = 1e-6);

long binomial(int n, int k);

}  // namespace syncnet
