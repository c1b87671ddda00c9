#include "rsirs/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace rsirs {

namespace {

constexpr double kMinDistanceKm = 1e-3;  // 1 m clamp against the log singularity

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

/// Linear amplitude gain of one link: sqrt(path loss * shadowing) in linear
/// scale. One shadowing draw per (transmitter, receiver) link.
double link_amplitude(double distance_m, Rng& rng, const ChannelModelOptions& model) {
  const double pl_db = path_loss_db(distance_m / 1000.0);
  const double shadow_db = model.shadowing_std_db > 0.0 ? model.shadowing_std_db * rng.normal() : 0.0;
  const double attenuation_db = pl_db + shadow_db;
  return std::pow(10.0, -attenuation_db / 20.0);
}

std::complex<double> fading_draw(Rng& rng, const ChannelModelOptions& model) {
  if (!model.rayleigh_fading) return {1.0, 0.0};
  return rng.cnormal();
}

}  // namespace

double SystemConfig::noise_power_w() const {
  return std::pow(10.0, (noise_dbm_per_hz - 30.0) / 10.0) * bandwidth_hz;
}

void SystemConfig::validate() const {
  require(n_bs >= 1 && antennas_per_bs >= 1 && n_users >= 1 && n_reflect >= 1,
          "N, L, K, R must all be >= 1");
  require(decode_group_max >= 1, "decode_group_max must be >= 1");
  require(n_randomizations >= 1, "n_randomizations must be >= 1");
  require(penalty_tradeoff > 0.0 && penalty_tradeoff <= 1.0, "penalty_tradeoff must be in (0,1]");
  require(sca_step > 0.0 && sca_step <= 1.0, "sca_step must be in (0,1]");
  require(stop_epsilon > 0.0, "stop_epsilon must be > 0");
  require(max_outer_iters >= 1, "max_outer_iters must be >= 1");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
  require(area_halfwidth_m >= 0.0, "area_halfwidth_m must be >= 0");
  require(static_cast<int>(qos_min_bps.size()) == n_users, "qos_min_bps must have one entry per user");
  require(static_cast<int>(power_weights.size()) == n_users,
          "power_weights must have one entry per user");
  for (double q : qos_min_bps) require(q >= 0.0, "qos_min_bps entries must be >= 0");
  for (double w : power_weights) require(w > 0.0, "power_weights entries must be > 0");
}

PhaseShift PhaseShift::all_ones(int n_reflect) {
  PhaseShift p;
  p.v = VectorXcd::Ones(n_reflect);
  return p;
}

void PhaseShift::validate() const {
  for (Eigen::Index r = 0; r < v.size(); ++r) {
    if (std::abs(std::abs(v[r]) - 1.0) > 1e-9) {
      throw std::invalid_argument("phase shift entries must have unit modulus");
    }
  }
}

ChannelSet ChannelSet::without_irs() const {
  ChannelSet out = *this;
  out.bs_to_irs.setZero();
  for (auto& h : out.irs_to_user) h.setZero();
  for (auto& c : out.cascade) c.setZero();
  return out;
}

Topology sample_topology(const SystemConfig& config, Rng& rng) {
  config.validate();
  const double a = config.area_halfwidth_m;
  Topology topo;
  topo.bs_positions.reserve(config.n_bs);
  topo.user_positions.reserve(config.n_users);
  for (int n = 0; n < config.n_bs; ++n) {
    topo.bs_positions.emplace_back(rng.uniform(-a, a), rng.uniform(-a, a));
  }
  for (int k = 0; k < config.n_users; ++k) {
    topo.user_positions.emplace_back(rng.uniform(-a, a), rng.uniform(-a, a));
  }
  topo.irs_position = Vector2d::Zero();
  return topo;
}

double path_loss_db(double distance_km) {
  require(distance_km > 0.0, "distance must be positive");
  const double d = std::max(distance_km, kMinDistanceKm);
  return 148.1 + 37.6 * std::log10(d);
}

ChannelSet sample_channels(const SystemConfig& config, const Topology& topology, Rng& rng,
                           const ChannelModelOptions& model) {
  config.validate();
  require(static_cast<int>(topology.bs_positions.size()) == config.n_bs, "topology has wrong BS count");
  require(static_cast<int>(topology.user_positions.size()) == config.n_users,
          "topology has wrong user count");

  const int n_bs = config.n_bs;
  const int l = config.antennas_per_bs;
  const int k_users = config.n_users;
  const int n_reflect = config.n_reflect;
  const int nl = config.total_antennas();

  ChannelSet ch;
  ch.noise_power_w = config.noise_power_w();
  ch.direct.assign(k_users, VectorXcd::Zero(nl));
  ch.bs_to_irs = MatrixXcd::Zero(nl, n_reflect);
  ch.irs_to_user.assign(k_users, VectorXcd::Zero(n_reflect));

  // Direct BS-to-user links.
  for (int n = 0; n < n_bs; ++n) {
    for (int k = 0; k < k_users; ++k) {
      const double d = (topology.bs_positions[n] - topology.user_positions[k]).norm();
      const double amp = link_amplitude(d, rng, model);
      for (int a = 0; a < l; ++a) {
        ch.direct[k][n * l + a] = amp * fading_draw(rng, model);
      }
    }
  }

  // BS-to-IRS links.
  for (int n = 0; n < n_bs; ++n) {
    const double d = (topology.bs_positions[n] - topology.irs_position).norm();
    const double amp = link_amplitude(d, rng, model);
    for (int a = 0; a < l; ++a) {
      for (int r = 0; r < n_reflect; ++r) {
        ch.bs_to_irs(n * l + a, r) = amp * fading_draw(rng, model);
      }
    }
  }

  // IRS-to-user links.
  for (int k = 0; k < k_users; ++k) {
    const double d = (topology.irs_position - topology.user_positions[k]).norm();
    const double amp = link_amplitude(d, rng, model);
    for (int r = 0; r < n_reflect; ++r) {
      ch.irs_to_user[k][r] = amp * fading_draw(rng, model);
    }
  }

  // Cascade composition H_k = H^BI diag(h_k^IU).
  ch.cascade.assign(k_users, MatrixXcd::Zero(nl, n_reflect));
  for (int k = 0; k < k_users; ++k) {
    ch.cascade[k] = ch.bs_to_irs * ch.irs_to_user[k].asDiagonal();
  }
  return ch;
}

VectorXcd effective_channel(const ChannelSet& channels, int k, const PhaseShift& v) {
  require(k >= 0 && k < channels.n_users(), "user index out of range");
  require(v.v.size() == channels.cascade[k].cols(), "phase shift length mismatch");
  return channels.direct[k] + channels.cascade[k] * v.v;
}

}  // namespace rsirs
