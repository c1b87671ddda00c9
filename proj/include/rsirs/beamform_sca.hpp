#pragma once

#include <optional>

#include "rsirs/conic.hpp"
#include "rsirs/rs_core.hpp"
#include "rsirs/solver.hpp"

namespace rsirs {

/// Stream selection of a scheme. Rate splitting uses both streams; treating
/// interference as noise drops the common ones. use_irs only tells the outer
/// loop whether a phase-shift stage exists; the subproblem sees whatever
/// channels it is given.
struct SchemeOptions {
  bool use_common = true;
  bool use_irs = true;
};

/// Point around which the difference-of-convex constraints are linearized.
/// Targets must stay strictly positive (they sit in denominators).
struct ExpansionPoint {
  BeamformerSet omega;
  VectorXd t_private;
  VectorXd t_common;
  bool feasible = true;
  bool qos_scaled = false;  // initialization had to shrink the QoS to find a start
};

struct ScaTrace {
  std::vector<double> objective_w;  // weighted power after each accepted iterate
  int iterations = 0;
  bool converged = false;
  bool degraded = false;  // a solve failed; last good iterate was returned
};

inline constexpr double kTargetFloor = 1e-8;
inline constexpr int kMaxScaIterations = 40;

/// Lower bound on the SINR targets of active users inside the subproblem.
/// The difference-of-convex surrogate divides by the expansion targets, so
/// letting them reach zero makes successive subproblems unboundedly
/// ill-conditioned; a -40 dB floor costs a vanishing amount of power and
/// keeps every coefficient finite.
inline constexpr double kSinrTargetFloor = 1e-4;

/// Affine lower bound of |h^H w|^2 / t around the expansion point; exact at
/// the point itself.
double taylor_bound_private(const VectorXcd& h_eff, const VectorXcd& omega_kp, double t_kp,
                            const ExpansionPoint& point, int k);
double taylor_bound_common(const VectorXcd& h_i_eff, const VectorXcd& omega_kc, double t_kc,
                           const ExpansionPoint& point, int i, int k);

/// Feasible starting point from maximum-ratio directions: private beams along
/// the user's own effective channel, common beams along the weakest decoder's,
/// powers scaled by bisection until the per-stream SINR targets of the even
/// rate split hold with margin. Falls back to scaled-down QoS, then to the
/// zero point.
ExpansionPoint init_mrc(const ChannelSet& channels, const PhaseShift& v,
                        const DecodingStructure& structure, const SystemConfig& config,
                        const SchemeOptions& scheme = {});

/// The convex inner-approximation subproblem in scaled variables, plus the
/// bookkeeping to move between solver vectors and beamformer sets.
class Subproblem {
 public:
  Subproblem(const ChannelSet& channels, const PhaseShift& v, const DecodingStructure& structure,
             const ExpansionPoint& point, const SystemConfig& config, const SchemeOptions& scheme);

  const conic::ConicProgram& program() const { return program_; }

  /// True weighted power = power_scale * (solver objective value).
  double power_scale() const { return omega_scale_ * omega_scale_; }

  struct Extracted {
    BeamformerSet omega;
    RateAllocation rates;
  };
  Extracted extract(const conic::ConicSolution& solution) const;

  /// Embeds a (beamformers, targets, rates) triple as a solver vector; used
  /// to check a point against the emitted program.
  VectorXd embed_point(const BeamformerSet& omega, const VectorXd& t_private,
                       const VectorXd& t_common, const VectorXd& rate_private,
                       const VectorXd& rate_common) const;

 private:
  int n_users_ = 0;
  int nl_ = 0;
  bool common_ = true;
  double omega_scale_ = 1.0;  // true beamformer = omega_scale * solver value
  double bandwidth_hz_ = 0.0;
  std::vector<int> wp_, wc_, tp_, tc_, rp_, rc_, pk_;
  VectorXd t_scale_p_, t_scale_c_;  // true target = scale * solver value
  BeamformerSet shape_;             // zero set carrying the cluster definitions
  conic::ConicProgram program_;
};

Subproblem build_subproblem(const ChannelSet& channels, const PhaseShift& v,
                            const DecodingStructure& structure, const ExpansionPoint& point,
                            const SystemConfig& config, const SchemeOptions& scheme = {});

struct ScaResult {
  BeamformerSet omega;
  RateAllocation rates;
  ScaTrace trace;
  ExpansionPoint final_point;
};

/// Iterates subproblem builds and solves with the convex-combination update
/// until the relative power decrease falls below stop_epsilon (or the
/// iterate is stationary, or the iteration cap is hit).
ScaResult sca_iterate(const ChannelSet& channels, const PhaseShift& v,
                      const DecodingStructure& structure, const SystemConfig& config,
                      const ExpansionPoint& start, const SchemeOptions& scheme = {},
                      const conic::SolverSettings& solver_settings = {});

}  // namespace rsirs
