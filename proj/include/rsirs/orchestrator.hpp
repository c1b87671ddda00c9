#pragma once

#include <string>
#include <vector>

#include "rsirs/beamform_sca.hpp"
#include "rsirs/phase_sdp.hpp"
#include "rsirs/rng.hpp"
#include "rsirs/rs_core.hpp"

namespace rsirs {

struct OptResult {
  BeamformerSet omega;
  PhaseShift v;
  std::vector<double> power_trajectory_w;  // weighted power per outer iteration
  std::vector<ScaTrace> inner_traces;      // one SCA trace per outer iteration
  int outer_iterations = 0;
  VectorXd per_user_rate_bps;
  RateAllocation rates;
  std::string scheme_label;
  bool feasible = false;
  bool degraded = false;         // a solver failure cut a run short
  bool init_qos_scaled = false;  // initialization could not meet the full QoS
  int phase_updates = 0;         // accepted phase-shift improvements
};

/// The full alternation: beamforming descent, then lifted phase-shift design
/// with randomization, repeated until the power decrease stalls. The rng is
/// consumed only by the randomization stage.
OptResult alternating_optimize(const ChannelSet& channels, const SystemConfig& config, Rng& rng,
                               const SchemeOptions& scheme = {},
                               const std::string& label = "rs_irs");

/// Baseline without common streams; with_irs=false also zeroes the reflected
/// path and skips the phase stage.
OptResult run_tin(const ChannelSet& channels, const SystemConfig& config, bool with_irs, Rng& rng);

/// Rate splitting on the direct channels only.
OptResult run_no_irs_rs(const ChannelSet& channels, const SystemConfig& config, Rng& rng);

}  // namespace rsirs
