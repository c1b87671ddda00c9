#pragma once

#include <optional>
#include <utility>

#include "rsirs/beamform_sca.hpp"
#include "rsirs/conic.hpp"
#include "rsirs/parallel.hpp"
#include "rsirs/rng.hpp"
#include "rsirs/rs_core.hpp"
#include "rsirs/solver.hpp"

namespace rsirs {

/// Data of the lifted quadratic forms: for receiver k and beamformer owner i,
///   b[k][i] = h_k^H w_i,   a[k][i] = H_k^H w_i,
///   m[k][i] = [[a a^H, a b^*], [b a^H, 0]]  (order R+1, Hermitian),
/// so that |(h_k + H_k v)^H w_i|^2 = |b|^2 + vt^H m vt with vt = [v; 1].
struct LiftingData {
  std::vector<std::vector<std::complex<double>>> b_private, b_common;
  std::vector<std::vector<VectorXcd>> a_private, a_common;
  std::vector<std::vector<MatrixXcd>> m_private, m_common;

  int n_users() const { return static_cast<int>(b_private.size()); }
  int order() const {
    return m_private.empty() || m_private[0].empty() ? 0
                                                     : static_cast<int>(m_private[0][0].rows());
  }
};

LiftingData build_lifting(const ChannelSet& channels, const BeamformerSet& omega);

/// Per-user priority weights: transmit power of the stream normalized by the
/// largest per-stream power in the network. Throws when all beamformers are
/// zero.
std::pair<VectorXd, VectorXd> eta_weights(const BeamformerSet& omega);

/// Subgradient of the spectral norm at a Hermitian PSD matrix: e1 e1^H for a
/// unit leading eigenvector e1 (sign-normalized deterministically).
MatrixXcd spectral_subgradient(const MatrixXcd& v0);

/// trace - spectral norm; zero exactly on rank-one PSD matrices.
double trace_minus_spectral(const MatrixXcd& v);

struct LiftedSolution {
  MatrixXcd v_matrix;      // order R+1, Hermitian PSD with unit diagonal
  VectorXd zeta_private;   // SINR residuals in watts
  VectorXd zeta_common;
  double objective = 0.0;
  conic::SolveStatus status = conic::SolveStatus::Failed;
};

/// The penalized lifted program: maximize rho * sum(eta . zeta) minus
/// (1 - rho) * (trace V - <e1 e1^H, V>) subject to the lifted SINR rows,
/// unit diagonal, zeta >= 0 and V PSD (real-embedded, order 2(R+1)).
class PhaseSdp {
 public:
  PhaseSdp(const LiftingData& lifting, const RateAllocation& targets,
           const DecodingStructure& structure, const VectorXd& eta_private,
           const VectorXd& eta_common, const MatrixXcd& v0, double rho, double noise_power_w,
           const SchemeOptions& scheme);

  const conic::ConicProgram& program() const { return program_; }
  LiftedSolution extract(const conic::ConicSolution& solution) const;

  /// Embeds a lifted matrix and residuals (in watts) as a solver vector; used
  /// to check points against the emitted program.
  VectorXd embed(const MatrixXcd& v_matrix, const VectorXd& zeta_private,
                 const VectorXd& zeta_common) const;

 private:
  int order_ = 0;  // R+1
  int n_users_ = 0;
  bool common_ = true;
  double noise_power_w_ = 0.0;
  std::vector<std::vector<int>> re_idx_, im_idx_;
  std::vector<int> zeta_p_, zeta_c_;
  conic::ConicProgram program_;
};

PhaseSdp build_sdp(const LiftingData& lifting, const RateAllocation& targets,
                   const DecodingStructure& structure, const VectorXd& eta_private,
                   const VectorXd& eta_common, const MatrixXcd& v0, double rho,
                   double noise_power_w, const SchemeOptions& scheme = {});

/// Gaussian randomization: candidates U sqrt(Sigma) z projected to unit
/// modulus after normalizing by the auxiliary entry.
std::vector<PhaseShift> gaussian_randomize(const MatrixXcd& v_lifted, int n_candidates, Rng& rng);
std::vector<PhaseShift> gaussian_randomize(const LiftedSolution& solution, int n_candidates,
                                           Rng& rng);

/// Screens candidates against the SINR targets and returns the feasible one
/// with the highest sum rate (ties: first). nullopt when none pass.
std::optional<PhaseShift> select_phase_shift(const std::vector<PhaseShift>& candidates,
                                             const BeamformerSet& omega,
                                             const RateAllocation& targets,
                                             const ChannelSet& channels,
                                             const DecodingStructure& structure,
                                             const SystemConfig& config,
                                             par::Exec exec = par::Exec::Serial);

}  // namespace rsirs
