#include "rsirs/beamform_sca.hpp"

#include <cmath>

#include "doctest.h"
#include "rsirs/cones.hpp"

using namespace rsirs;

namespace {

SystemConfig config_for(int n_users, int n_bs, int l, double qos = 4e6) {
  SystemConfig config;
  config.n_bs = n_bs;
  config.antennas_per_bs = l;
  config.n_users = n_users;
  config.n_reflect = 2;
  config.qos_min_bps.assign(n_users, qos);
  config.power_weights.assign(n_users, 1.0);
  return config;
}

ChannelSet manual_channels(const std::vector<VectorXcd>& direct, double noise_w) {
  ChannelSet ch;
  ch.direct = direct;
  const int nl = static_cast<int>(direct[0].size());
  ch.bs_to_irs = MatrixXcd::Zero(nl, 2);
  ch.irs_to_user.assign(direct.size(), VectorXcd::Zero(2));
  ch.cascade.assign(direct.size(), MatrixXcd::Zero(nl, 2));
  ch.noise_power_w = noise_w;
  return ch;
}

ChannelSet random_channels(int n_users, int nl, Rng& rng, double scale = 1.0, double noise = 1.0) {
  std::vector<VectorXcd> h(n_users, VectorXcd(nl));
  for (auto& hk : h) {
    for (int i = 0; i < nl; ++i) hk[i] = scale * rng.cnormal();
  }
  return manual_channels(h, noise);
}

ExpansionPoint random_point(int n_users, int n_bs, int l, Rng& rng) {
  ExpansionPoint point;
  point.omega = BeamformerSet::zeros(n_users, n_bs, l);
  for (int k = 0; k < n_users; ++k) {
    for (int i = 0; i < n_bs * l; ++i) {
      point.omega.private_bf[k][i] = rng.cnormal();
      point.omega.common_bf[k][i] = rng.cnormal();
    }
  }
  point.t_private = VectorXd::Zero(n_users);
  point.t_common = VectorXd::Zero(n_users);
  for (int k = 0; k < n_users; ++k) {
    point.t_private[k] = 0.2 + rng.uniform();
    point.t_common[k] = 0.2 + rng.uniform();
  }
  return point;
}

/// True single-user minimum transmit power: the private and common SINRs
/// telescope, so the optimum is sigma^2 (2^{r/B} - 1) / |h|^2.
double single_user_power(double r, double b, double sigma2, double h_norm2) {
  return sigma2 * (std::exp2(r / b) - 1.0) / h_norm2;
}

}  // namespace

TEST_CASE("taylor bounds: tight at the expansion point, dominated elsewhere") {
  Rng rng(3);
  const int n_users = 2, nl = 3;
  ChannelSet ch = random_channels(n_users, nl, rng);
  ExpansionPoint point = random_point(n_users, 1, nl, rng);
  const VectorXcd h = ch.direct[0];

  SUBCASE("equality at the expansion point") {
    const double exact =
        std::norm(h.dot(point.omega.private_bf[0])) / point.t_private[0];
    const double bound = taylor_bound_private(h, point.omega.private_bf[0], point.t_private[0],
                                              point, 0);
    CHECK(bound == doctest::Approx(exact).epsilon(1e-10));

    const double exact_c = std::norm(h.dot(point.omega.common_bf[1])) / point.t_common[1];
    const double bound_c =
        taylor_bound_common(h, point.omega.common_bf[1], point.t_common[1], point, 0, 1);
    CHECK(bound_c == doctest::Approx(exact_c).epsilon(1e-10));
  }

  SUBCASE("zero expansion beamformer gives the zero bound") {
    ExpansionPoint zero_point = point;
    zero_point.omega.private_bf[0].setZero();
    VectorXcd w(nl);
    for (int i = 0; i < nl; ++i) w[i] = rng.cnormal();
    CHECK(taylor_bound_private(h, w, 1.3, zero_point, 0) == 0.0);
  }

  SUBCASE("bound never exceeds the exact quotient") {
    for (int trial = 0; trial < 200; ++trial) {
      VectorXcd w(nl);
      for (int i = 0; i < nl; ++i) {
        w[i] = point.omega.private_bf[0][i] + 0.5 * rng.cnormal();
      }
      const double t = point.t_private[0] * (0.25 + 2.0 * rng.uniform());
      const double exact = std::norm(h.dot(w)) / t;
      const double bound = taylor_bound_private(h, w, t, point, 0);
      CHECK(bound <= exact + 1e-9 * std::max(1.0, exact));
    }
    for (int trial = 0; trial < 200; ++trial) {
      VectorXcd w(nl);
      for (int i = 0; i < nl; ++i) {
        w[i] = point.omega.common_bf[1][i] + 0.5 * rng.cnormal();
      }
      const double t = point.t_common[1] * (0.25 + 2.0 * rng.uniform());
      const double exact = std::norm(h.dot(w)) / t;
      const double bound = taylor_bound_common(h, w, t, point, 0, 1);
      CHECK(bound <= exact + 1e-9 * std::max(1.0, exact));
    }
  }

  SUBCASE("bound is affine decreasing in t") {
    VectorXcd w = point.omega.common_bf[0];
    const double t1 = point.t_common[0];
    const double b1 = taylor_bound_common(h, w, t1, point, 0, 0);
    const double b2 = taylor_bound_common(h, w, 2.0 * t1, point, 0, 0);
    const double b3 = taylor_bound_common(h, w, 3.0 * t1, point, 0, 0);
    CHECK(b2 - b1 == doctest::Approx(b3 - b2).epsilon(1e-9));
    CHECK(b2 < b1);
  }
}

TEST_CASE("init_mrc zero QoS returns the zero point with floored targets") {
  SystemConfig config = config_for(2, 1, 2, 0.0);
  Rng rng(5);
  const ChannelSet ch = random_channels(2, 2, rng);
  const PhaseShift v = PhaseShift::all_ones(2);
  const DecodingStructure s = build_decoding_structure(ch, v, config.decode_group_max);
  const ExpansionPoint point = init_mrc(ch, v, s, config);
  CHECK(point.feasible);
  CHECK(!point.qos_scaled);
  for (int k = 0; k < 2; ++k) {
    CHECK(point.omega.private_bf[k].norm() == 0.0);
    CHECK(point.t_private[k] == kTargetFloor);
  }
}

TEST_CASE("init_mrc single user: MRC direction and target satisfaction") {
  SystemConfig config = config_for(1, 1, 2);
  std::vector<VectorXcd> h(1, VectorXcd(2));
  h[0] << std::complex<double>(2e-6, 1e-6), std::complex<double>(-1e-6, 0.5e-6);
  const double sigma2 = 1.2589254117941662e-13;
  const ChannelSet ch = manual_channels(h, sigma2);
  const PhaseShift v = PhaseShift::all_ones(2);
  const DecodingStructure s = build_decoding_structure(ch, v, 1);
  const ExpansionPoint point = init_mrc(ch, v, s, config);
  REQUIRE(point.feasible);
  CHECK(!point.qos_scaled);

  // Direction matches h / |h| up to the power scaling.
  const VectorXcd dir = point.omega.private_bf[0] / point.omega.private_bf[0].norm();
  const VectorXcd expected = h[0] / h[0].norm();
  CHECK((dir - expected).norm() <= 1e-9);

  // Both per-stream targets of the even split are met.
  const double g_star = std::exp2(config.qos_min_bps[0] / (2.0 * config.bandwidth_hz)) - 1.0;
  CHECK(point.t_private[0] >= g_star);
  CHECK(point.t_common[0] >= g_star);
  CHECK(sinr_private(point.omega, v, ch, s, 0) == doctest::Approx(point.t_private[0]));

  // Private base power matches the interference-free closed form within the
  // bisection margin.
  const double p_base = sigma2 * g_star / h[0].squaredNorm();
  CHECK(point.omega.private_bf[0].squaredNorm() >= p_base);
  CHECK(point.omega.private_bf[0].squaredNorm() <= 1.3 * p_base);
}

TEST_CASE("init_mrc power scales linearly with the noise power") {
  SystemConfig config = config_for(1, 1, 2);
  std::vector<VectorXcd> h(1, VectorXcd(2));
  h[0] << std::complex<double>(1e-6, 0.0), std::complex<double>(0.0, 2e-6);
  const PhaseShift v = PhaseShift::all_ones(2);

  const ChannelSet ch1 = manual_channels(h, 1e-13);
  const ChannelSet ch2 = manual_channels(h, 2e-13);
  const DecodingStructure s = build_decoding_structure(ch1, v, 1);
  const ExpansionPoint p1 = init_mrc(ch1, v, s, config);
  const ExpansionPoint p2 = init_mrc(ch2, v, s, config);
  REQUIRE(p1.feasible);
  REQUIRE(p2.feasible);
  const double pow1 = total_power(p1.omega, config.power_weights);
  const double pow2 = total_power(p2.omega, config.power_weights);
  CHECK(pow2 == doctest::Approx(2.0 * pow1).epsilon(1e-6));
}

TEST_CASE("subproblem: expansion point is feasible for the emitted program") {
  Rng rng(11);
  SystemConfig config = config_for(3, 2, 2);
  ChannelSet ch = random_channels(3, 4, rng, 1e-6, 1e-13);
  const PhaseShift v = PhaseShift::all_ones(2);
  const DecodingStructure s = build_decoding_structure(ch, v, 2);
  const ExpansionPoint point = init_mrc(ch, v, s, config);
  REQUIRE(point.feasible);

  const Subproblem sub = build_subproblem(ch, v, s, point, config);
  // Rates of the even split are consistent with the achieved targets at the
  // initialization, so the embedded point must satisfy every row.
  VectorXd rate_p(3), rate_c(3);
  for (int k = 0; k < 3; ++k) {
    rate_p[k] = config.bandwidth_hz * std::log2(1.0 + point.t_private[k]);
    rate_c[k] = config.bandwidth_hz * std::log2(1.0 + point.t_common[k]);
  }
  const VectorXd x = sub.embed_point(point.omega, point.t_private, point.t_common, rate_p, rate_c);
  CHECK(conic::max_constraint_violation(sub.program(), x) <= 1e-8);
}

TEST_CASE("subproblem: zero QoS solves to zero power") {
  Rng rng(13);
  SystemConfig config = config_for(2, 1, 2, 0.0);
  ChannelSet ch = random_channels(2, 2, rng, 1e-6, 1e-13);
  const PhaseShift v = PhaseShift::all_ones(2);
  const DecodingStructure s = build_decoding_structure(ch, v, 2);
  const ExpansionPoint point = init_mrc(ch, v, s, config);
  const Subproblem sub = build_subproblem(ch, v, s, point, config);
  const conic::ConicSolution sol = conic::solve(sub.program(), 1e-9);
  REQUIRE(sol.status == conic::SolveStatus::Optimal);
  const auto extracted = sub.extract(sol);
  CHECK(total_power(extracted.omega, config.power_weights) <= 1e-10);
}

TEST_CASE("sca single user converges to the closed-form power") {
  SystemConfig config = config_for(1, 1, 2);
  config.stop_epsilon = 1e-5;
  std::vector<VectorXcd> h(1, VectorXcd(2));
  h[0] << std::complex<double>(1.5e-6, -0.4e-6), std::complex<double>(0.3e-6, 0.9e-6);
  const double sigma2 = 1.2589254117941662e-13;
  const ChannelSet ch = manual_channels(h, sigma2);
  const PhaseShift v = PhaseShift::all_ones(2);
  const DecodingStructure s = build_decoding_structure(ch, v, 1);
  const ExpansionPoint start = init_mrc(ch, v, s, config);
  REQUIRE(start.feasible);

  const ScaResult result = sca_iterate(ch, v, s, config, start);
  CHECK(!result.trace.degraded);
  CHECK(result.trace.iterations <= 10);
  const double expected =
      single_user_power(config.qos_min_bps[0], config.bandwidth_hz, sigma2, h[0].squaredNorm());
  const double got = total_power(result.omega, config.power_weights);
  CHECK(got == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("sca from a converged point is a fixed point under unit step") {
  SystemConfig config = config_for(1, 1, 2);
  config.sca_step = 1.0;
  config.stop_epsilon = 1e-6;
  std::vector<VectorXcd> h(1, VectorXcd(2));
  h[0] << std::complex<double>(1e-6, 0.0), std::complex<double>(0.0, 1e-6);
  const ChannelSet ch = manual_channels(h, 1e-13);
  const PhaseShift v = PhaseShift::all_ones(2);
  const DecodingStructure s = build_decoding_structure(ch, v, 1);
  const ExpansionPoint start = init_mrc(ch, v, s, config);
  REQUIRE(start.feasible);

  const ScaResult first = sca_iterate(ch, v, s, config, start);
  REQUIRE(!first.trace.degraded);
  const double obj1 = total_power(first.omega, config.power_weights);
  const ScaResult second = sca_iterate(ch, v, s, config, first.final_point);
  const double obj2 = total_power(second.omega, config.power_weights);
  CHECK(std::abs(obj2 - obj1) <= 1e-8 * std::max(obj1, 1.0) + 1e-300);
}

TEST_CASE("sca trace is non-increasing and the result passes the QoS recheck") {
  Rng rng(17);
  SystemConfig config = config_for(3, 2, 2);
  ChannelSet ch = random_channels(3, 4, rng, 2e-6, 1.2589254117941662e-13);
  const PhaseShift v = PhaseShift::all_ones(2);
  const DecodingStructure s = build_decoding_structure(ch, v, 2);
  const ExpansionPoint start = init_mrc(ch, v, s, config);
  REQUIRE(start.feasible);

  const ScaResult result = sca_iterate(ch, v, s, config, start);
  REQUIRE(!result.trace.degraded);
  REQUIRE(!result.trace.objective_w.empty());

  double prev = total_power(start.omega, config.power_weights);
  for (double obj : result.trace.objective_w) {
    CHECK(obj <= prev * (1.0 + 1e-6) + 1e-300);
    prev = obj;
  }

  const QosReport report = check_qos(result.omega, v, ch, s, config, result.rates);
  CHECK(report.all_rates_ok());
  CHECK(report.all_sinr_ok());

  // Every returned target is achieved exactly (clamped).
  for (int k = 0; k < 3; ++k) {
    CHECK(sinr_private(result.omega, v, ch, s, k) >= result.rates.t_private[k]);
  }
}

TEST_CASE("intermediate iterates stay feasible for the next subproblem") {
  Rng rng(19);
  SystemConfig config = config_for(2, 1, 3);
  ChannelSet ch = random_channels(2, 3, rng, 1e-6, 1e-13);
  const PhaseShift v = PhaseShift::all_ones(2);
  const DecodingStructure s = build_decoding_structure(ch, v, 2);
  const ExpansionPoint start = init_mrc(ch, v, s, config);
  REQUIRE(start.feasible);
  const ScaResult result = sca_iterate(ch, v, s, config, start);
  REQUIRE(!result.trace.degraded);

  // The final point embeds feasibly into a fresh subproblem built around it.
  const Subproblem next = build_subproblem(ch, v, s, result.final_point, config);
  VectorXd rate_p(2), rate_c(2);
  for (int k = 0; k < 2; ++k) {
    rate_p[k] = config.bandwidth_hz * std::log2(1.0 + result.final_point.t_private[k]);
    rate_c[k] = config.bandwidth_hz * std::log2(1.0 + result.final_point.t_common[k]);
  }
  const VectorXd x = next.embed_point(result.final_point.omega, result.final_point.t_private,
                                      result.final_point.t_common, rate_p, rate_c);
  CHECK(conic::max_constraint_violation(next.program(), x) <= 1e-6);
}

TEST_CASE("TIN subproblem has no common variables and meets QoS privately") {
  Rng rng(23);
  SystemConfig config = config_for(2, 1, 3);
  ChannelSet ch = random_channels(2, 3, rng, 2e-6, 1e-13);
  const PhaseShift v = PhaseShift::all_ones(2);
  const DecodingStructure s = build_decoding_structure(ch, v, 1);
  SchemeOptions scheme;
  scheme.use_common = false;
  const ExpansionPoint start = init_mrc(ch, v, s, config, scheme);
  REQUIRE(start.feasible);
  const ScaResult result = sca_iterate(ch, v, s, config, start, scheme);
  REQUIRE(!result.trace.degraded);
  for (int k = 0; k < 2; ++k) {
    CHECK(result.omega.common_bf[k].norm() == 0.0);
    CHECK(result.rates.rate_common[k] == 0.0);
  }
  const QosReport report = check_qos(result.omega, v, ch, s, config, result.rates);
  CHECK(report.all_rates_ok());
}
