#include "rsirs/orchestrator.hpp"

#include <cmath>

namespace rsirs {

namespace {

bool any_nonzero(const BeamformerSet& omega) {
  for (int k = 0; k < omega.n_users(); ++k) {
    if (omega.private_bf[k].squaredNorm() > 0.0 || omega.common_bf[k].squaredNorm() > 0.0) {
      return true;
    }
  }
  return false;
}

}  // namespace

OptResult alternating_optimize(const ChannelSet& channels, const SystemConfig& config, Rng& rng,
                               const SchemeOptions& scheme, const std::string& label) {
  config.validate();
  const int k_users = channels.n_users();

  OptResult result;
  result.scheme_label = label;
  result.v = PhaseShift::all_ones(channels.n_reflect());
  result.omega = BeamformerSet::zeros(k_users, config.n_bs, config.antennas_per_bs);
  result.rates = RateAllocation::zeros(k_users);
  result.per_user_rate_bps = VectorXd::Zero(k_users);

  // The decoding structure is fixed for the whole run, built from the
  // initial phase shifts; changing it mid-run would invalidate the targets
  // the alternation carries between stages.
  const DecodingStructure structure =
      build_decoding_structure(channels, result.v, scheme.use_common ? config.decode_group_max : 1);

  ExpansionPoint point = init_mrc(channels, result.v, structure, config, scheme);
  result.init_qos_scaled = point.qos_scaled;
  if (!point.feasible) {
    result.feasible = false;
    return result;
  }

  conic::SolverSettings solver_settings;

  double prev_power = std::numeric_limits<double>::infinity();
  for (int z = 0; z < config.max_outer_iters; ++z) {
    ScaResult sca = sca_iterate(channels, result.v, structure, config, point, scheme,
                                solver_settings);
    if (sca.trace.degraded && sca.trace.objective_w.empty() && z == 0) {
      // Not even one subproblem solved; report the initialization point.
      result.degraded = true;
      result.omega = sca.omega;
      result.rates = sca.rates;
      result.outer_iterations = 0;
      break;
    }
    result.omega = sca.omega;
    result.rates = sca.rates;
    result.inner_traces.push_back(sca.trace);
    result.outer_iterations = z + 1;
    const double power = total_power(result.omega, config.power_weights);
    result.power_trajectory_w.push_back(power);
    if (sca.trace.degraded) {
      result.degraded = true;
      break;
    }

    const double decrease = prev_power - power;
    if (z >= 1 && decrease < config.stop_epsilon * std::max(prev_power, 1e-300)) break;
    prev_power = power;
    point = sca.final_point;
    if (power <= 0.0) break;

    // Phase-shift stage; on any failure the incumbent phase shifts survive
    // and the next outer iteration runs beamforming only.
    if (scheme.use_irs && channels.n_reflect() >= 1 && any_nonzero(result.omega) &&
        z + 1 < config.max_outer_iters) {
      const LiftingData lifting = build_lifting(channels, result.omega);
      const auto [eta_p, eta_c] = eta_weights(result.omega);
      VectorXcd v_tilde(channels.n_reflect() + 1);
      v_tilde << result.v.v, std::complex<double>(1.0, 0.0);
      const MatrixXcd v0 = v_tilde * v_tilde.adjoint();
      const PhaseSdp sdp = build_sdp(lifting, result.rates, structure, eta_p, eta_c, v0,
                                     config.penalty_tradeoff, channels.noise_power_w, scheme);
      const conic::ConicSolution sol = conic::solve(sdp.program(), solver_settings);
      if (sol.status == conic::SolveStatus::Optimal ||
          sol.status == conic::SolveStatus::Inaccurate) {
        const LiftedSolution lifted = sdp.extract(sol);
        const std::vector<PhaseShift> candidates =
            gaussian_randomize(lifted, config.n_randomizations, rng);
        const auto selected = select_phase_shift(candidates, result.omega, result.rates, channels,
                                                 structure, config);
        if (selected.has_value()) {
          result.v = *selected;
          ++result.phase_updates;
        }
      }
    }
  }

  for (int k = 0; k < k_users; ++k) {
    result.per_user_rate_bps[k] =
        achieved_rate(result.omega, result.v, channels, structure, k, config.bandwidth_hz);
  }
  const QosReport report =
      check_qos(result.omega, result.v, channels, structure, config, result.rates);
  result.feasible = report.all_rates_ok();
  return result;
}

OptResult run_tin(const ChannelSet& channels, const SystemConfig& config, bool with_irs, Rng& rng) {
  SchemeOptions scheme;
  scheme.use_common = false;
  scheme.use_irs = with_irs;
  if (with_irs) {
    return alternating_optimize(channels, config, rng, scheme, "tin_irs");
  }
  const ChannelSet direct_only = channels.without_irs();
  return alternating_optimize(direct_only, config, rng, scheme, "tin_noirs");
}

OptResult run_no_irs_rs(const ChannelSet& channels, const SystemConfig& config, Rng& rng) {
  SchemeOptions scheme;
  scheme.use_common = true;
  scheme.use_irs = false;
  const ChannelSet direct_only = channels.without_irs();
  return alternating_optimize(direct_only, config, rng, scheme, "rs_noirs");
}

}  // namespace rsirs
