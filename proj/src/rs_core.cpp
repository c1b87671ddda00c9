#include "rsirs/rs_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rsirs {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check(bool cond, const char* msg) {
  if (!cond) throw std::logic_error(msg);
}

double abs2(std::complex<double> z) { return std::norm(z); }

/// |h^H w|^2 with h, w complex vectors.
double gain(const VectorXcd& h, const VectorXcd& w) { return abs2(h.dot(w)); }

}  // namespace

bool DecodingStructure::decodes(int i, int k) const {
  const auto& m = decoders[k];
  return std::binary_search(m.begin(), m.end(), i);
}

const std::vector<int>& DecodingStructure::after(int i, int k) const {
  const auto& seq = decode_sequence[i];
  for (std::size_t t = 0; t < seq.size(); ++t) {
    if (seq[t] == k) return after_sets[i][t];
  }
  throw std::invalid_argument("after(i,k): user i does not decode user k's common message");
}

void DecodingStructure::validate(int decode_group_max) const {
  const int k_users = n_users();
  for (int k = 0; k < k_users; ++k) {
    const auto& phi = decoded_by_me[k];
    const auto& psi = not_decoded_by_me[k];
    check(static_cast<int>(phi.size()) <= decode_group_max, "|Phi_k| exceeds D");
    check(std::binary_search(phi.begin(), phi.end(), k), "user must decode its own common message");
    check(static_cast<int>(phi.size() + psi.size()) == k_users, "Phi and Psi must partition users");
    for (int j : phi) {
      check(!std::binary_search(psi.begin(), psi.end(), j), "Phi and Psi must be disjoint");
      check(std::binary_search(decoders[j].begin(), decoders[j].end(), k),
            "Phi_k = {j : k in M_j} violated");
    }
    // decode_sequence is a bijection onto Phi_k.
    std::vector<int> sorted = decode_sequence[k];
    std::sort(sorted.begin(), sorted.end());
    check(sorted == phi, "decode order must be a bijection onto Phi_k");
    check(after_sets[k].size() == decode_sequence[k].size(), "after_sets shape mismatch");
  }
  for (int k = 0; k < k_users; ++k) {
    for (int i : decoders[k]) {
      const auto& omega = after(i, k);
      for (int m : omega) {
        check(std::binary_search(decoded_by_me[i].begin(), decoded_by_me[i].end(), m),
              "Omega_{i,k} must be a subset of Phi_i");
      }
    }
  }
}

BeamformerSet BeamformerSet::zeros(int n_users, int n_bs, int antennas_per_bs) {
  BeamformerSet w;
  const int nl = n_bs * antennas_per_bs;
  w.private_bf.assign(n_users, VectorXcd::Zero(nl));
  w.common_bf.assign(n_users, VectorXcd::Zero(nl));
  std::vector<int> all(n_users);
  std::iota(all.begin(), all.end(), 0);
  w.cluster_private.assign(n_bs, all);
  w.cluster_common.assign(n_bs, all);
  return w;
}

void BeamformerSet::validate(int n_bs, int antennas_per_bs) const {
  const int l = antennas_per_bs;
  for (int k = 0; k < n_users(); ++k) {
    check(private_bf[k].allFinite() && common_bf[k].allFinite(), "beamformer entries must be finite");
    for (int n = 0; n < n_bs; ++n) {
      const bool in_p = std::find(cluster_private[n].begin(), cluster_private[n].end(), k) !=
                        cluster_private[n].end();
      const bool in_c = std::find(cluster_common[n].begin(), cluster_common[n].end(), k) !=
                        cluster_common[n].end();
      if (!in_p) {
        check(private_bf[k].segment(n * l, l).isZero(0.0), "masked private block must be zero");
      }
      if (!in_c) {
        check(common_bf[k].segment(n * l, l).isZero(0.0), "masked common block must be zero");
      }
    }
  }
}

RateAllocation RateAllocation::zeros(int n_users) {
  RateAllocation r;
  r.rate_private = VectorXd::Zero(n_users);
  r.rate_common = VectorXd::Zero(n_users);
  r.t_private = VectorXd::Zero(n_users);
  r.t_common = VectorXd::Zero(n_users);
  return r;
}

bool QosReport::all_rates_ok() const {
  return std::all_of(rate_ok.begin(), rate_ok.end(), [](bool b) { return b; });
}

bool QosReport::all_sinr_ok() const {
  return std::all_of(sinr_ok.begin(), sinr_ok.end(), [](bool b) { return b; });
}

DecodingStructure build_decoding_structure(const ChannelSet& channels, const PhaseShift& v,
                                           int decode_group_max) {
  require(decode_group_max >= 1, "decode_group_max must be >= 1");
  const int k_users = channels.n_users();

  std::vector<double> norms(k_users);
  for (int k = 0; k < k_users; ++k) norms[k] = effective_channel(channels, k, v).norm();

  // Users by descending effective-channel norm, ties by ascending index.
  std::vector<int> by_strength(k_users);
  std::iota(by_strength.begin(), by_strength.end(), 0);
  std::stable_sort(by_strength.begin(), by_strength.end(),
                   [&](int a, int b) { return norms[a] > norms[b]; });

  DecodingStructure s;
  s.decoded_by_me.assign(k_users, {});
  s.decoders.assign(k_users, {});
  s.not_decoded_by_me.assign(k_users, {});
  s.decode_sequence.assign(k_users, {});
  s.after_sets.assign(k_users, {});

  for (int k = 0; k < k_users; ++k) {
    std::vector<int> phi = {k};
    for (int j : by_strength) {
      if (static_cast<int>(phi.size()) >= decode_group_max) break;
      if (j != k) phi.push_back(j);
    }
    std::vector<int> seq = phi;
    std::stable_sort(seq.begin(), seq.end(), [&](int a, int b) {
      if (norms[a] != norms[b]) return norms[a] > norms[b];
      return a < b;
    });
    std::sort(phi.begin(), phi.end());
    s.decoded_by_me[k] = phi;
    s.decode_sequence[k] = seq;
    for (int j = 0; j < k_users; ++j) {
      if (!std::binary_search(phi.begin(), phi.end(), j)) s.not_decoded_by_me[k].push_back(j);
    }
  }
  for (int k = 0; k < k_users; ++k) {
    for (int j : s.decoded_by_me[k]) s.decoders[j].push_back(k);
  }
  for (int k = 0; k < k_users; ++k) std::sort(s.decoders[k].begin(), s.decoders[k].end());

  for (int k = 0; k < k_users; ++k) {
    const auto& seq = s.decode_sequence[k];
    s.after_sets[k].resize(seq.size());
    for (std::size_t t = 0; t < seq.size(); ++t) {
      s.after_sets[k][t].assign(seq.begin() + t + 1, seq.end());
      std::sort(s.after_sets[k][t].begin(), s.after_sets[k][t].end());
    }
  }
  return s;
}

double sinr_private(const BeamformerSet& w, const PhaseShift& v, const ChannelSet& channels,
                    const DecodingStructure& structure, int k) {
  const VectorXcd h = effective_channel(channels, k, v);
  const double signal = gain(h, w.private_bf[k]);
  double interference = 0.0;
  for (int m = 0; m < w.n_users(); ++m) {
    if (m != k) interference += gain(h, w.private_bf[m]);
  }
  for (int l : structure.not_decoded_by_me[k]) interference += gain(h, w.common_bf[l]);
  return signal / (interference + channels.noise_power_w);
}

double sinr_common(const BeamformerSet& w, const PhaseShift& v, const ChannelSet& channels,
                   const DecodingStructure& structure, int i, int k) {
  require(structure.decodes(i, k), "sinr_common requires i in M_k");
  const VectorXcd h = effective_channel(channels, i, v);
  const double signal = gain(h, w.common_bf[k]);
  double denom = channels.noise_power_w;
  for (int j = 0; j < w.n_users(); ++j) denom += gain(h, w.private_bf[j]);
  for (int l : structure.not_decoded_by_me[i]) denom += gain(h, w.common_bf[l]);
  for (int m : structure.after(i, k)) denom += gain(h, w.common_bf[m]);
  return signal / denom;
}

double total_power(const BeamformerSet& w, const std::vector<double>& weights) {
  require(weights.size() == w.private_bf.size(), "one weight per user required");
  double p = 0.0;
  for (int k = 0; k < w.n_users(); ++k) {
    require(weights[k] > 0.0, "weights must be positive");
    p += weights[k] * (w.private_bf[k].squaredNorm() + w.common_bf[k].squaredNorm());
  }
  return p;
}

double achieved_rate(const BeamformerSet& w, const PhaseShift& v, const ChannelSet& channels,
                     const DecodingStructure& structure, int k, double bandwidth_hz) {
  const double gp = sinr_private(w, v, channels, structure, k);
  double common_term = std::numeric_limits<double>::infinity();
  for (int i : structure.decoders[k]) {
    common_term = std::min(common_term, std::log2(1.0 + sinr_common(w, v, channels, structure, i, k)));
  }
  if (!std::isfinite(common_term)) common_term = 0.0;  // M_k is never empty in valid structures
  return bandwidth_hz * (std::log2(1.0 + gp) + common_term);
}

QosReport check_qos(const BeamformerSet& w, const PhaseShift& v, const ChannelSet& channels,
                    const DecodingStructure& structure, const SystemConfig& config,
                    const RateAllocation& targets) {
  const int k_users = channels.n_users();
  QosReport report;
  report.rate_ok.assign(k_users, false);
  report.sinr_ok.assign(k_users, false);
  report.rate_slack_bps = VectorXd::Zero(k_users);
  report.sinr_slack = VectorXd::Zero(k_users);

  for (int k = 0; k < k_users; ++k) {
    const double rate = achieved_rate(w, v, channels, structure, k, config.bandwidth_hz);
    const double qos = config.qos_min_bps[k];
    report.rate_slack_bps[k] = rate - qos;
    report.rate_ok[k] = rate >= qos - qos_rate_tolerance(qos);

    const double tp = targets.t_private.size() > k ? targets.t_private[k] : 0.0;
    const double tc = targets.t_common.size() > k ? targets.t_common[k] : 0.0;
    double slack = sinr_private(w, v, channels, structure, k) - tp;
    bool ok = sinr_private(w, v, channels, structure, k) >=
              tp * (1.0 - kSinrScreenTolerance) - 1e-12;
    for (int i : structure.decoders[k]) {
      const double gc = sinr_common(w, v, channels, structure, i, k);
      slack = std::min(slack, gc - tc);
      ok = ok && gc >= tc * (1.0 - kSinrScreenTolerance) - 1e-12;
    }
    report.sinr_slack[k] = slack;
    report.sinr_ok[k] = ok;
  }
  return report;
}

double sum_rate(const BeamformerSet& w, const PhaseShift& v, const ChannelSet& channels,
                const DecodingStructure& structure, double bandwidth_hz) {
  double total = 0.0;
  for (int k = 0; k < channels.n_users(); ++k) {
    total += achieved_rate(w, v, channels, structure, k, bandwidth_hz);
  }
  return total;
}

}  // namespace rsirs
