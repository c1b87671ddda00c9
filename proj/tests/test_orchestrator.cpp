#include "rsirs/orchestrator.hpp"

#include <cmath>

#include "doctest.h"

using namespace rsirs;

namespace {

SystemConfig config_for(int n_users, int n_bs, int l, int n_reflect, double qos = 4e6) {
  SystemConfig config;
  config.n_bs = n_bs;
  config.antennas_per_bs = l;
  config.n_users = n_users;
  config.n_reflect = n_reflect;
  config.qos_min_bps.assign(n_users, qos);
  config.power_weights.assign(n_users, 1.0);
  config.max_outer_iters = 6;
  return config;
}

ChannelSet sampled_channels(const SystemConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  const Topology topo = sample_topology(config, rng);
  return sample_channels(config, topo, rng);
}

double single_user_power(double r, double b, double sigma2, double h_norm2) {
  return sigma2 * (std::exp2(r / b) - 1.0) / h_norm2;
}

}  // namespace

TEST_CASE("single user without reflection matches the closed-form power") {
  SystemConfig config = config_for(1, 1, 2, 1);
  const ChannelSet ch = sampled_channels(config, 71);
  const double expected = single_user_power(4e6, 10e6, ch.noise_power_w, ch.direct[0].squaredNorm());

  Rng rng1(1), rng2(2);
  const OptResult rs = run_no_irs_rs(ch, config, rng1);
  const OptResult tin = run_tin(ch, config, false, rng2);
  REQUIRE(rs.feasible);
  REQUIRE(tin.feasible);
  const double rs_power = total_power(rs.omega, config.power_weights);
  const double tin_power = total_power(tin.omega, config.power_weights);
  CHECK(rs_power == doctest::Approx(expected).epsilon(0.01));
  CHECK(tin_power == doctest::Approx(expected).epsilon(0.01));
  // With a single user there is no interference to split against.
  CHECK(rs_power == doctest::Approx(tin_power).epsilon(0.01));
}

TEST_CASE("zero QoS yields zero power") {
  SystemConfig config = config_for(2, 1, 2, 2, 0.0);
  const ChannelSet ch = sampled_channels(config, 73);
  Rng rng(3);
  const OptResult res = alternating_optimize(ch, config, rng);
  CHECK(res.feasible);
  CHECK(total_power(res.omega, config.power_weights) == 0.0);
}

TEST_CASE("trajectories are non-increasing and feasibility is rechecked") {
  SystemConfig config = config_for(3, 2, 2, 4);
  const ChannelSet ch = sampled_channels(config, 79);
  Rng rng(5);
  const OptResult res = alternating_optimize(ch, config, rng);
  REQUIRE(!res.power_trajectory_w.empty());

  double prev = std::numeric_limits<double>::infinity();
  for (double p : res.power_trajectory_w) {
    CHECK(p <= prev * (1.0 + 1e-6) + 1e-300);
    prev = p;
  }
  for (const auto& trace : res.inner_traces) {
    double inner_prev = std::numeric_limits<double>::infinity();
    for (double p : trace.objective_w) {
      CHECK(p <= inner_prev * (1.0 + 1e-6) + 1e-300);
      inner_prev = p;
    }
  }

  if (res.feasible) {
    const DecodingStructure s = build_decoding_structure(ch, res.v, config.decode_group_max);
    const QosReport report = check_qos(res.omega, res.v, ch, s, config, res.rates);
    CHECK(report.all_rates_ok());
  }
}

TEST_CASE("deterministic results for identical inputs") {
  SystemConfig config = config_for(2, 1, 2, 3);
  const ChannelSet ch = sampled_channels(config, 83);
  Rng rng1(7), rng2(7);
  const OptResult a = alternating_optimize(ch, config, rng1);
  const OptResult b = alternating_optimize(ch, config, rng2);
  CHECK(total_power(a.omega, config.power_weights) == total_power(b.omega, config.power_weights));
  CHECK(a.v.v == b.v.v);
  CHECK(a.outer_iterations == b.outer_iterations);
  CHECK(a.power_trajectory_w == b.power_trajectory_w);
}

TEST_CASE("TIN runs carry exactly zero common power") {
  SystemConfig config = config_for(3, 1, 3, 3);
  const ChannelSet ch = sampled_channels(config, 89);
  Rng rng(9);
  const OptResult res = run_tin(ch, config, true, rng);
  for (int k = 0; k < 3; ++k) {
    CHECK(res.omega.common_bf[k].norm() == 0.0);
    CHECK(res.rates.rate_common[k] == 0.0);
  }
  CHECK(res.scheme_label == "tin_irs");
}

TEST_CASE("no-IRS run equals the run on zero-cascade channels") {
  SystemConfig config = config_for(2, 1, 2, 3);
  const ChannelSet ch = sampled_channels(config, 97);
  Rng rng1(11), rng2(11);
  const OptResult via_scheme = run_no_irs_rs(ch, config, rng1);

  const ChannelSet zeroed = ch.without_irs();
  SchemeOptions scheme;
  scheme.use_common = true;
  scheme.use_irs = false;
  const OptResult direct = alternating_optimize(zeroed, config, rng2, scheme, "rs_noirs");
  CHECK(total_power(via_scheme.omega, config.power_weights) ==
        total_power(direct.omega, config.power_weights));
  CHECK(via_scheme.feasible == direct.feasible);
}

TEST_CASE("orthogonal channels decouple TIN into single-user problems") {
  SystemConfig config = config_for(2, 1, 2, 1);
  std::vector<VectorXcd> h(2, VectorXcd(2));
  h[0] << std::complex<double>(2e-6, 0.0), std::complex<double>(0.0, 0.0);
  h[1] << std::complex<double>(0.0, 0.0), std::complex<double>(1e-6, 0.0);
  ChannelSet ch;
  ch.direct = h;
  ch.bs_to_irs = MatrixXcd::Zero(2, 1);
  ch.irs_to_user.assign(2, VectorXcd::Zero(1));
  ch.cascade.assign(2, MatrixXcd::Zero(2, 1));
  ch.noise_power_w = 1.2589254117941662e-13;

  Rng rng(13);
  const OptResult res = run_tin(ch, config, false, rng);
  REQUIRE(res.feasible);
  const double expected =
      single_user_power(4e6, 10e6, ch.noise_power_w, h[0].squaredNorm()) +
      single_user_power(4e6, 10e6, ch.noise_power_w, h[1].squaredNorm());
  CHECK(total_power(res.omega, config.power_weights) == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("per-user rates meet the QoS floor on a feasible run") {
  SystemConfig config = config_for(2, 2, 2, 4);
  const ChannelSet ch = sampled_channels(config, 101);
  Rng rng(17);
  const OptResult res = alternating_optimize(ch, config, rng);
  if (res.feasible) {
    for (int k = 0; k < 2; ++k) {
      CHECK(res.per_user_rate_bps[k] >=
            config.qos_min_bps[k] - qos_rate_tolerance(config.qos_min_bps[k]));
    }
  }
}

TEST_CASE("phase updates only ever improve or hold the sum rate gate") {
  // With reflect elements present and a feasible run, the phase stage should
  // typically accept at least one update; the incumbent stays valid when it
  // does not.
  SystemConfig config = config_for(3, 2, 2, 6);
  const ChannelSet ch = sampled_channels(config, 103);
  Rng rng(19);
  const OptResult res = alternating_optimize(ch, config, rng);
  CHECK_NOTHROW(res.v.validate());
  CHECK(res.phase_updates >= 0);
  CHECK(res.phase_updates <= res.outer_iterations);
}
