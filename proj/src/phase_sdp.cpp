#include "rsirs/phase_sdp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsirs {

using conic::ConeType;
using conic::LinExpr;

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

MatrixXcd lifting_matrix(const VectorXcd& a, std::complex<double> b) {
  const int r = static_cast<int>(a.size());
  MatrixXcd m = MatrixXcd::Zero(r + 1, r + 1);
  m.topLeftCorner(r, r) = a * a.adjoint();
  m.topRightCorner(r, 1) = a * std::conj(b);
  m.bottomLeftCorner(1, r) = b * a.adjoint();
  // bottom-right corner stays exactly zero
  return m;
}

}  // namespace

LiftingData build_lifting(const ChannelSet& channels, const BeamformerSet& omega) {
  const int k_users = channels.n_users();
  require(omega.n_users() == k_users, "beamformer set size mismatch");

  LiftingData data;
  data.b_private.assign(k_users, std::vector<std::complex<double>>(k_users));
  data.b_common.assign(k_users, std::vector<std::complex<double>>(k_users));
  data.a_private.assign(k_users, std::vector<VectorXcd>(k_users));
  data.a_common.assign(k_users, std::vector<VectorXcd>(k_users));
  data.m_private.assign(k_users, std::vector<MatrixXcd>(k_users));
  data.m_common.assign(k_users, std::vector<MatrixXcd>(k_users));

  for (int k = 0; k < k_users; ++k) {
    const VectorXcd& h = channels.direct[k];
    const MatrixXcd& cascade = channels.cascade[k];
    for (int i = 0; i < k_users; ++i) {
      data.b_private[k][i] = h.dot(omega.private_bf[i]);
      data.b_common[k][i] = h.dot(omega.common_bf[i]);
      data.a_private[k][i] = cascade.adjoint() * omega.private_bf[i];
      data.a_common[k][i] = cascade.adjoint() * omega.common_bf[i];
      data.m_private[k][i] = lifting_matrix(data.a_private[k][i], data.b_private[k][i]);
      data.m_common[k][i] = lifting_matrix(data.a_common[k][i], data.b_common[k][i]);
    }
  }
  return data;
}

std::pair<VectorXd, VectorXd> eta_weights(const BeamformerSet& omega) {
  const int k_users = omega.n_users();
  VectorXd pow_p(k_users), pow_c(k_users);
  double max_power = 0.0;
  for (int k = 0; k < k_users; ++k) {
    pow_p[k] = omega.private_bf[k].squaredNorm();
    pow_c[k] = omega.common_bf[k].squaredNorm();
    max_power = std::max({max_power, pow_p[k], pow_c[k]});
  }
  if (max_power <= 0.0) throw std::invalid_argument("eta_weights: all beamformers are zero");
  return {pow_p / max_power, pow_c / max_power};
}

MatrixXcd spectral_subgradient(const MatrixXcd& v0) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(v0);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  VectorXcd e1 = eig.eigenvectors().col(v0.rows() - 1);  // largest eigenvalue is last
  for (Eigen::Index i = 0; i < e1.size(); ++i) {
    if (std::abs(e1[i]) > 1e-12) {
      e1 *= std::conj(e1[i]) / std::abs(e1[i]);
      break;
    }
  }
  return e1 * e1.adjoint();
}

double trace_minus_spectral(const MatrixXcd& v) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(v);
  return v.trace().real() - eig.eigenvalues().maxCoeff();
}

PhaseSdp::PhaseSdp(const LiftingData& lifting, const RateAllocation& targets,
                   const DecodingStructure& structure, const VectorXd& eta_private,
                   const VectorXd& eta_common, const MatrixXcd& v0, double rho,
                   double noise_power_w, const SchemeOptions& scheme)
    : order_(lifting.order()),
      n_users_(lifting.n_users()),
      common_(scheme.use_common),
      noise_power_w_(noise_power_w),
      program_(1) {
  require(order_ >= 2, "lifting data is empty");
  require(rho > 0.0 && rho <= 1.0, "rho must be in (0,1]");
  require(v0.rows() == order_ && v0.cols() == order_, "v0 order mismatch");
  require(noise_power_w > 0.0, "noise power must be positive");

  const int n = order_;
  const int k_users = n_users_;

  // Variables: Re V_ij (i <= j), Im V_ij (i < j), then the residuals.
  re_idx_.assign(n, std::vector<int>(n, -1));
  im_idx_.assign(n, std::vector<int>(n, -1));
  int next = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) re_idx_[i][j] = next++;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) im_idx_[i][j] = next++;
  }
  zeta_p_.resize(k_users);
  zeta_c_.assign(k_users, -1);
  for (int k = 0; k < k_users; ++k) zeta_p_[k] = next++;
  if (common_) {
    for (int k = 0; k < k_users; ++k) zeta_c_[k] = next++;
  }
  program_ = conic::ConicProgram(next);

  // Re tr(M V) as a linear expression over the Hermitian parametrization.
  auto tr_expr = [&](const MatrixXcd& m) {
    LinExpr e;
    for (int i = 0; i < n; ++i) {
      e.add(re_idx_[i][i], m(i, i).real());
      for (int j = i + 1; j < n; ++j) {
        e.add(re_idx_[i][j], 2.0 * m(i, j).real());
        e.add(im_idx_[i][j], 2.0 * m(i, j).imag());
      }
    }
    return e;
  };

  const double inv_sigma2 = 1.0 / noise_power_w;

  // Lifted SINR rows, normalized by the noise power so coefficients are O(1):
  //   |b_kk|^2 + tr(M_kk V) - t * (interference + sigma^2) - zeta >= 0.
  program_.begin_block(ConeType::NonNeg);
  for (int k = 0; k < k_users; ++k) {
    const double t = targets.t_private[k];
    LinExpr row = tr_expr(lifting.m_private[k][k]).scaled(inv_sigma2);
    row.add_constant(std::norm(lifting.b_private[k][k]) * inv_sigma2);
    for (int j = 0; j < k_users; ++j) {
      if (j == k) continue;
      row.add_scaled(tr_expr(lifting.m_private[k][j]), -t * inv_sigma2);
      row.add_constant(-t * std::norm(lifting.b_private[k][j]) * inv_sigma2);
    }
    if (common_) {
      for (int l : structure.not_decoded_by_me[k]) {
        row.add_scaled(tr_expr(lifting.m_common[k][l]), -t * inv_sigma2);
        row.add_constant(-t * std::norm(lifting.b_common[k][l]) * inv_sigma2);
      }
    }
    row.add_constant(-t);  // noise term
    row.add(zeta_p_[k], -1.0);
    program_.add_row(row);
  }
  if (common_) {
    for (int k = 0; k < k_users; ++k) {
      const double t = targets.t_common[k];
      for (int i : structure.decoders[k]) {
        LinExpr row = tr_expr(lifting.m_common[i][k]).scaled(inv_sigma2);
        row.add_constant(std::norm(lifting.b_common[i][k]) * inv_sigma2);
        for (int j = 0; j < k_users; ++j) {
          row.add_scaled(tr_expr(lifting.m_private[i][j]), -t * inv_sigma2);
          row.add_constant(-t * std::norm(lifting.b_private[i][j]) * inv_sigma2);
        }
        for (int l : structure.not_decoded_by_me[i]) {
          row.add_scaled(tr_expr(lifting.m_common[i][l]), -t * inv_sigma2);
          row.add_constant(-t * std::norm(lifting.b_common[i][l]) * inv_sigma2);
        }
        for (int m : structure.after(i, k)) {
          row.add_scaled(tr_expr(lifting.m_common[i][m]), -t * inv_sigma2);
          row.add_constant(-t * std::norm(lifting.b_common[i][m]) * inv_sigma2);
        }
        row.add_constant(-t);
        row.add(zeta_c_[k], -1.0);
        program_.add_row(row);
      }
    }
  }
  // Residuals are nonnegative, so infeasibility of the program is meaningful.
  for (int k = 0; k < k_users; ++k) {
    program_.add_row(LinExpr::of_var(zeta_p_[k], 1.0));
    if (common_) program_.add_row(LinExpr::of_var(zeta_c_[k], 1.0));
  }

  // Unit diagonal.
  program_.begin_block(ConeType::Zero);
  for (int r = 0; r < n; ++r) {
    program_.add_row(LinExpr::of_var(re_idx_[r][r], 1.0).add_constant(-1.0));
  }

  // PSD cone on the real-symmetric embedding [[X, -Y], [Y, X]] of V = X + iY,
  // svec-packed (lower triangle, column-major, off-diagonals times sqrt(2)).
  const int m_order = 2 * n;
  program_.begin_block(ConeType::Psd, m_order);
  auto embedded_entry = [&](int i, int j) {
    // Entry (i, j), i >= j, of the embedding as a linear expression.
    LinExpr e;
    if (i < n && j < n) {
      e.add(re_idx_[std::min(i, j)][std::max(i, j)], 1.0);
    } else if (i >= n && j >= n) {
      const int ii = i - n, jj = j - n;
      e.add(re_idx_[std::min(ii, jj)][std::max(ii, jj)], 1.0);
    } else {
      const int ii = i - n;  // bottom-left block: Y_{ii,j} = Im V_{ii,j}
      const int jj = j;
      if (ii < jj) {
        e.add(im_idx_[ii][jj], 1.0);
      } else if (ii > jj) {
        e.add(im_idx_[jj][ii], -1.0);
      }
      // ii == jj: zero expression
    }
    return e;
  };
  for (int j = 0; j < m_order; ++j) {
    for (int i = j; i < m_order; ++i) {
      LinExpr e = embedded_entry(i, j);
      program_.add_row(i == j ? e : e.scaled(M_SQRT2));
    }
  }

  // Objective: rho * sum(eta . zeta) - (1 - rho) * (tr V - <e1 e1^H, V>).
  // The linearization constant tr(E1 V0) - ||V0||_2 vanishes because E1 is
  // built from V0's own leading eigenvector.
  const MatrixXcd e1 = spectral_subgradient(v0);
  VectorXd c = VectorXd::Zero(program_.n_vars());
  for (int k = 0; k < k_users; ++k) {
    c[zeta_p_[k]] = rho * eta_private[k];
    if (common_) c[zeta_c_[k]] = rho * eta_common[k];
  }
  for (int i = 0; i < n; ++i) c[re_idx_[i][i]] -= (1.0 - rho);
  const LinExpr penalty_gain = tr_expr(e1);
  for (const auto& [var, coeff] : penalty_gain.terms) c[var] += (1.0 - rho) * coeff;
  program_.set_objective(c, 0.0, /*maximize=*/true);
  program_.finalize();
}

LiftedSolution PhaseSdp::extract(const conic::ConicSolution& solution) const {
  LiftedSolution out;
  out.status = solution.status;
  out.objective = solution.objective;
  out.v_matrix = MatrixXcd::Zero(order_, order_);
  out.zeta_private = VectorXd::Zero(n_users_);
  out.zeta_common = VectorXd::Zero(n_users_);
  if (solution.x.size() != program_.n_vars()) return out;
  for (int i = 0; i < order_; ++i) {
    for (int j = i; j < order_; ++j) {
      const double re = solution.x[re_idx_[i][j]];
      const double im = i == j ? 0.0 : solution.x[im_idx_[i][j]];
      out.v_matrix(i, j) = {re, im};
      if (i != j) out.v_matrix(j, i) = {re, -im};
    }
  }
  for (int k = 0; k < n_users_; ++k) {
    out.zeta_private[k] = solution.x[zeta_p_[k]] * noise_power_w_;
    if (common_) out.zeta_common[k] = solution.x[zeta_c_[k]] * noise_power_w_;
  }
  return out;
}

VectorXd PhaseSdp::embed(const MatrixXcd& v_matrix, const VectorXd& zeta_private,
                         const VectorXd& zeta_common) const {
  VectorXd x = VectorXd::Zero(program_.n_vars());
  for (int i = 0; i < order_; ++i) {
    for (int j = i; j < order_; ++j) {
      x[re_idx_[i][j]] = v_matrix(i, j).real();
      if (i != j) x[im_idx_[i][j]] = v_matrix(i, j).imag();
    }
  }
  for (int k = 0; k < n_users_; ++k) {
    x[zeta_p_[k]] = zeta_private[k] / noise_power_w_;
    if (common_) x[zeta_c_[k]] = zeta_common[k] / noise_power_w_;
  }
  return x;
}

PhaseSdp build_sdp(const LiftingData& lifting, const RateAllocation& targets,
                   const DecodingStructure& structure, const VectorXd& eta_private,
                   const VectorXd& eta_common, const MatrixXcd& v0, double rho,
                   double noise_power_w, const SchemeOptions& scheme) {
  return PhaseSdp(lifting, targets, structure, eta_private, eta_common, v0, rho, noise_power_w,
                  scheme);
}

std::vector<PhaseShift> gaussian_randomize(const MatrixXcd& v_lifted, int n_candidates, Rng& rng) {
  require(n_candidates >= 1, "need at least one candidate");
  const int n = static_cast<int>(v_lifted.rows());
  require(n >= 2, "lifted matrix must have order R+1 >= 2");

  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(v_lifted);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  // Eigenvalues below numerical noise are dropped so that a rank-one input
  // reproduces its phase vector exactly instead of noise-contaminated copies.
  const double floor = eig.eigenvalues().maxCoeff() * 1e-13;
  const VectorXd sqrt_lambda =
      (eig.eigenvalues().array() < floor).select(0.0, eig.eigenvalues().cwiseMax(0.0)).cwiseSqrt();
  const MatrixXcd u_scaled = eig.eigenvectors() * sqrt_lambda.asDiagonal();

  std::vector<PhaseShift> candidates;
  candidates.reserve(n_candidates);
  VectorXcd z(n);
  for (int g = 0; g < n_candidates; ++g) {
    for (int i = 0; i < n; ++i) z[i] = rng.cnormal();
    const VectorXcd v_hat = u_scaled * z;
    PhaseShift cand;
    cand.v = VectorXcd(n - 1);
    const std::complex<double> pivot = v_hat[n - 1];
    for (int r = 0; r < n - 1; ++r) {
      const std::complex<double> w = pivot != std::complex<double>(0.0, 0.0)
                                         ? v_hat[r] / pivot
                                         : v_hat[r];
      cand.v[r] = std::polar(1.0, std::arg(w));
    }
    candidates.push_back(std::move(cand));
  }
  return candidates;
}

std::vector<PhaseShift> gaussian_randomize(const LiftedSolution& solution, int n_candidates,
                                           Rng& rng) {
  return gaussian_randomize(solution.v_matrix, n_candidates, rng);
}

std::optional<PhaseShift> select_phase_shift(const std::vector<PhaseShift>& candidates,
                                             const BeamformerSet& omega,
                                             const RateAllocation& targets,
                                             const ChannelSet& channels,
                                             const DecodingStructure& structure,
                                             const SystemConfig& config, par::Exec exec) {
  const std::size_t n = candidates.size();
  std::vector<char> feasible(n, 0);
  std::vector<double> rate(n, 0.0);
  par::for_each_dynamic(n, exec, [&](std::size_t i) {
    candidates[i].validate();
    const QosReport report =
        check_qos(omega, candidates[i], channels, structure, config, targets);
    if (report.all_sinr_ok()) {
      feasible[i] = 1;
      rate[i] = sum_rate(omega, candidates[i], channels, structure, config.bandwidth_hz);
    }
  });
  int best = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (feasible[i] && (best < 0 || rate[i] > rate[best])) best = static_cast<int>(i);
  }
  if (best < 0) return std::nullopt;
  return candidates[best];
}

}  // namespace rsirs
