#pragma once

#include <vector>

#include "rsirs/scenario.hpp"

namespace rsirs {

/// Common-message decoding sets and successive-decoding orders.
///
/// For user k:
///   decoders[k]          M_k, users that decode user k's common message
///   decoded_by_me[k]     Phi_k, users whose common messages k decodes
///   not_decoded_by_me[k] Psi_k = K \ Phi_k
///   decode_sequence[k]   Phi_k in decoding order (first entry decoded first)
/// after(i, k) returns Omega_{i,k}: users whose common messages decoder i
/// handles after user k's (still uncancelled while decoding k's message).
struct DecodingStructure {
  std::vector<std::vector<int>> decoders;
  std::vector<std::vector<int>> decoded_by_me;
  std::vector<std::vector<int>> not_decoded_by_me;
  std::vector<std::vector<int>> decode_sequence;
  std::vector<std::vector<std::vector<int>>> after_sets;  // indexed like decode_sequence

  int n_users() const { return static_cast<int>(decoders.size()); }
  bool decodes(int i, int k) const;  // i in M_k?
  const std::vector<int>& after(int i, int k) const;

  /// Structural invariants (disjointness, self-decoding, cardinality bound,
  /// order bijection). Throws std::logic_error on violation.
  void validate(int decode_group_max) const;
};

/// Aggregate private/common beamformers, one length-N*L vector per user, plus
/// the per-BS serving clusters. A BS outside a user's cluster has its L-block
/// pinned to zero.
struct BeamformerSet {
  std::vector<VectorXcd> private_bf;            // omega_k^p
  std::vector<VectorXcd> common_bf;             // omega_k^c
  std::vector<std::vector<int>> cluster_private;  // per BS n: users it serves privately
  std::vector<std::vector<int>> cluster_common;

  static BeamformerSet zeros(int n_users, int n_bs, int antennas_per_bs);
  int n_users() const { return static_cast<int>(private_bf.size()); }

  /// Zero-block and finiteness invariants. Throws std::logic_error.
  void validate(int n_bs, int antennas_per_bs) const;
};

/// Per-user rates and SINR targets carried between the two subproblems.
struct RateAllocation {
  VectorXd rate_private;  // bps
  VectorXd rate_common;   // bps
  VectorXd t_private;     // SINR targets
  VectorXd t_common;

  static RateAllocation zeros(int n_users);
};

struct QosReport {
  std::vector<bool> rate_ok;        // achieved_rate >= qos - tolerance
  VectorXd rate_slack_bps;          // achieved - qos
  std::vector<bool> sinr_ok;        // gamma^p >= t^p and gamma^c >= t^c for all decoders
  VectorXd sinr_slack;              // min over the user's SINR rows of gamma - t
  bool all_rates_ok() const;
  bool all_sinr_ok() const;
};

/// Strongest-channel decoding groups: Phi_k holds k plus the D-1 interferers
/// with the largest effective-channel norm; decoding order is by descending
/// norm, ties broken by ascending user index.
DecodingStructure build_decoding_structure(const ChannelSet& channels, const PhaseShift& v,
                                           int decode_group_max);

/// SINR of user k decoding its private message.
double sinr_private(const BeamformerSet& w, const PhaseShift& v, const ChannelSet& channels,
                    const DecodingStructure& structure, int k);

/// SINR of user i decoding user k's common message. Requires i in M_k.
double sinr_common(const BeamformerSet& w, const PhaseShift& v, const ChannelSet& channels,
                   const DecodingStructure& structure, int i, int k);

/// Weighted total transmit power sum_k alpha_k (|w_k^p|^2 + |w_k^c|^2).
double total_power(const BeamformerSet& w, const std::vector<double>& weights);

/// B * [log2(1 + gamma_k^p) + min_{i in M_k} log2(1 + gamma_{i,k}^c)].
double achieved_rate(const BeamformerSet& w, const PhaseShift& v, const ChannelSet& channels,
                     const DecodingStructure& structure, int k, double bandwidth_hz);

/// QoS pass/fail per user plus the raw SINR-vs-target screening.
QosReport check_qos(const BeamformerSet& w, const PhaseShift& v, const ChannelSet& channels,
                    const DecodingStructure& structure, const SystemConfig& config,
                    const RateAllocation& targets);

double sum_rate(const BeamformerSet& w, const PhaseShift& v, const ChannelSet& channels,
                const DecodingStructure& structure, double bandwidth_hz);

/// Relative slack used when screening SINRs against targets.
inline constexpr double kSinrScreenTolerance = 1e-6;

/// Rate slack for QoS pass/fail: 1e-6 * r_min + 1 bps.
inline double qos_rate_tolerance(double qos_min_bps) { return 1e-6 * qos_min_bps + 1.0; }

}  // namespace rsirs
