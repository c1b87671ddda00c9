#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rsirs/rng.hpp"

namespace rsirs {

using Eigen::MatrixXcd;
using Eigen::Vector2d;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Static parameters of one network instance plus the solver knobs that the
/// alternating optimization consumes.
struct SystemConfig {
  int n_bs = 4;               // N
  int antennas_per_bs = 4;    // L
  int n_users = 6;            // K
  int n_reflect = 15;         // R
  double bandwidth_hz = 10e6;
  double noise_dbm_per_hz = -169.0;
  std::vector<double> qos_min_bps;    // per user, size K
  std::vector<double> power_weights;  // per user, size K, all > 0
  int decode_group_max = 2;           // D
  int n_randomizations = 25;          // G
  double penalty_tradeoff = 0.9;      // rho in (0,1]
  double sca_step = 1.0;              // step size in (0,1]
  double stop_epsilon = 1e-3;         // relative decrease threshold
  int max_outer_iters = 10;
  double area_halfwidth_m = 500.0;
  std::uint64_t rng_seed = 1;

  int total_antennas() const { return n_bs * antennas_per_bs; }
  double noise_power_w() const;

  /// Throws std::invalid_argument when any invariant is violated.
  void validate() const;
};

struct Topology {
  std::vector<Vector2d> bs_positions;
  std::vector<Vector2d> user_positions;
  Vector2d irs_position = Vector2d::Zero();
};

/// All channel coefficients of one realization. Aggregate vectors stack the
/// per-BS blocks, so direct[k] has length N*L and cascade[k] is N*L x R.
struct ChannelSet {
  std::vector<VectorXcd> direct;       // K vectors of length N*L
  MatrixXcd bs_to_irs;                 // N*L x R
  std::vector<VectorXcd> irs_to_user;  // K vectors of length R
  std::vector<MatrixXcd> cascade;      // K matrices N*L x R, derived
  double noise_power_w = 0.0;

  int n_users() const { return static_cast<int>(direct.size()); }
  int n_antennas() const { return direct.empty() ? 0 : static_cast<int>(direct[0].size()); }
  int n_reflect() const { return static_cast<int>(bs_to_irs.cols()); }

  /// Copy with the reflected path removed (cascade and IRS links zeroed).
  ChannelSet without_irs() const;
};

/// Unit-modulus reflection coefficients, one per reflect element.
struct PhaseShift {
  VectorXcd v;

  static PhaseShift all_ones(int n_reflect);
  /// Throws if any |v_r| deviates from 1 by more than 1e-9.
  void validate() const;
};

/// Knobs of the statistical channel model. Defaults follow the standard
/// urban macro model; tests override them to get deterministic channels.
struct ChannelModelOptions {
  double shadowing_std_db = 8.0;
  bool rayleigh_fading = true;  // false replaces every fading draw by 1
};

/// Uniform i.i.d. BS and user placement over the square, IRS at the center.
Topology sample_topology(const SystemConfig& config, Rng& rng);

/// 148.1 + 37.6 log10(d_km), with d clamped below at 1 m.
/// Throws std::invalid_argument for non-positive distance.
double path_loss_db(double distance_km);

/// Draws one full channel realization: per-link path loss + log-normal
/// shadowing, per-coefficient Rayleigh fading, cascade composition, and the
/// noise power sigma^2 = 10^((noise_dbm_per_hz - 30)/10) * bandwidth.
ChannelSet sample_channels(const SystemConfig& config, const Topology& topology, Rng& rng,
                           const ChannelModelOptions& model = {});

/// h_k + H_k v. Throws on dimension mismatch.
VectorXcd effective_channel(const ChannelSet& channels, int k, const PhaseShift& v);

}  // namespace rsirs
