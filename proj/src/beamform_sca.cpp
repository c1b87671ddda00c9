#include "rsirs/beamform_sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsirs {

using conic::ConeType;
using conic::LinExpr;

namespace {

std::complex<double> inner(const VectorXcd& g, const VectorXcd& w) { return g.dot(w); }

/// Re(g^H w) over the interleaved [Re, Im] layout of the complex block at
/// the given variable offset.
LinExpr re_inner_expr(const VectorXcd& g, int offset) {
  LinExpr e;
  for (int i = 0; i < g.size(); ++i) {
    e.add(offset + 2 * i, g[i].real());
    e.add(offset + 2 * i + 1, g[i].imag());
  }
  return e;
}

LinExpr im_inner_expr(const VectorXcd& g, int offset) {
  LinExpr e;
  for (int i = 0; i < g.size(); ++i) {
    e.add(offset + 2 * i, -g[i].imag());
    e.add(offset + 2 * i + 1, g[i].real());
  }
  return e;
}

double bound_term(std::complex<double> u_tilde, std::complex<double> u, double t, double t_tilde) {
  return 2.0 * (u_tilde.real() * u.real() + u_tilde.imag() * u.imag()) / t_tilde -
         std::norm(u_tilde) / (t_tilde * t_tilde) * t;
}

double rms_channel_magnitude(const std::vector<VectorXcd>& h) {
  double sum = 0.0;
  Eigen::Index count = 0;
  for (const auto& hk : h) {
    sum += hk.squaredNorm();
    count += hk.size();
  }
  const double rms = count > 0 ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
  return rms > 0.0 ? rms : 1.0;
}

}  // namespace

double taylor_bound_private(const VectorXcd& h_eff, const VectorXcd& omega_kp, double t_kp,
                            const ExpansionPoint& point, int k) {
  const double t_tilde = point.t_private[k];
  if (!(t_tilde > 0.0)) throw std::invalid_argument("expansion target must be positive");
  return bound_term(inner(h_eff, point.omega.private_bf[k]), inner(h_eff, omega_kp), t_kp, t_tilde);
}

double taylor_bound_common(const VectorXcd& h_i_eff, const VectorXcd& omega_kc, double t_kc,
                           const ExpansionPoint& point, int /*i*/, int k) {
  const double t_tilde = point.t_common[k];
  if (!(t_tilde > 0.0)) throw std::invalid_argument("expansion target must be positive");
  return bound_term(inner(h_i_eff, point.omega.common_bf[k]), inner(h_i_eff, omega_kc), t_kc,
                    t_tilde);
}

ExpansionPoint init_mrc(const ChannelSet& channels, const PhaseShift& v,
                        const DecodingStructure& structure, const SystemConfig& config,
                        const SchemeOptions& scheme) {
  const int k_users = channels.n_users();
  const double sigma2 = channels.noise_power_w;
  const double b = config.bandwidth_hz;

  std::vector<VectorXcd> h(k_users);
  VectorXd norms(k_users);
  for (int k = 0; k < k_users; ++k) {
    h[k] = effective_channel(channels, k, v);
    norms[k] = h[k].norm();
  }

  // Beam directions: private along the own channel, common along the weakest
  // decoder's channel in M_k.
  std::vector<VectorXcd> dir_p(k_users), dir_c(k_users);
  for (int k = 0; k < k_users; ++k) {
    dir_p[k] = norms[k] > 0.0 ? VectorXcd(h[k] / norms[k]) : VectorXcd(VectorXcd::Zero(h[k].size()));
    int weakest = structure.decoders[k].front();
    for (int i : structure.decoders[k]) {
      if (norms[i] < norms[weakest]) weakest = i;
    }
    dir_c[k] = norms[weakest] > 0.0 ? VectorXcd(h[weakest] / norms[weakest])
                                    : VectorXcd(VectorXcd::Zero(h[k].size()));
  }

  ExpansionPoint point;
  point.omega = BeamformerSet::zeros(k_users, config.n_bs, config.antennas_per_bs);
  point.t_private = VectorXd::Constant(k_users, kTargetFloor);
  point.t_common = VectorXd::Constant(k_users, kTargetFloor);

  const double max_qos = *std::max_element(config.qos_min_bps.begin(), config.qos_min_bps.end());
  if (max_qos <= 0.0) {
    point.feasible = true;  // zero power meets zero QoS
    return point;
  }

  constexpr double kMargin = 1.02;
  constexpr double kTauCap = 1e9;

  auto try_scale = [&](double qos_scale, ExpansionPoint& out) -> bool {
    VectorXd gp(k_users), gc(k_users), p0(k_users), q0(k_users);
    for (int k = 0; k < k_users; ++k) {
      const double r = qos_scale * config.qos_min_bps[k];
      if (scheme.use_common) {
        gp[k] = std::exp2(r / (2.0 * b)) - 1.0;
        gc[k] = gp[k];
      } else {
        gp[k] = std::exp2(r / b) - 1.0;
        gc[k] = 0.0;
      }
      if (gp[k] > 0.0 && norms[k] == 0.0) return false;  // no channel, positive QoS
      p0[k] = norms[k] > 0.0 ? sigma2 * gp[k] / (norms[k] * norms[k]) : 0.0;
      double recv = 1.0;
      if (gc[k] > 0.0) {
        recv = std::numeric_limits<double>::infinity();
        for (int i : structure.decoders[k]) recv = std::min(recv, std::norm(inner(h[i], dir_c[k])));
        if (!(recv > 0.0) || !std::isfinite(recv)) return false;
      }
      q0[k] = gc[k] > 0.0 ? sigma2 * gc[k] / recv : 0.0;
    }

    auto assemble = [&](double tau, BeamformerSet& w) {
      for (int k = 0; k < k_users; ++k) {
        w.private_bf[k] = std::sqrt(tau * p0[k]) * dir_p[k];
        w.common_bf[k] = scheme.use_common ? VectorXcd(std::sqrt(tau * q0[k]) * dir_c[k])
                                           : VectorXcd(VectorXcd::Zero(h[k].size()));
      }
    };
    auto feasible_at = [&](double tau) -> bool {
      BeamformerSet w = BeamformerSet::zeros(k_users, config.n_bs, config.antennas_per_bs);
      assemble(tau, w);
      for (int k = 0; k < k_users; ++k) {
        if (gp[k] <= 0.0) continue;
        if (sinr_private(w, v, channels, structure, k) < gp[k] * kMargin) return false;
        if (!scheme.use_common) continue;
        for (int i : structure.decoders[k]) {
          if (sinr_common(w, v, channels, structure, i, k) < gc[k] * kMargin) return false;
        }
      }
      return true;
    };

    double tau_hi = 1.0;
    while (!feasible_at(tau_hi)) {
      tau_hi *= 2.0;
      if (tau_hi > kTauCap) return false;
    }
    // Tighten toward the smallest feasible scaling; SINRs are monotone in tau.
    double tau_lo = 0.0;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (tau_lo + tau_hi);
      if (mid <= 0.0) break;
      if (feasible_at(mid)) {
        tau_hi = mid;
      } else {
        tau_lo = mid;
      }
    }

    assemble(tau_hi, out.omega);
    for (int k = 0; k < k_users; ++k) {
      out.t_private[k] = std::max(sinr_private(out.omega, v, channels, structure, k), kTargetFloor);
      double tc = std::numeric_limits<double>::infinity();
      for (int i : structure.decoders[k]) {
        tc = std::min(tc, sinr_common(out.omega, v, channels, structure, i, k));
      }
      out.t_common[k] = std::max(std::isfinite(tc) ? tc : 0.0, kTargetFloor);
    }
    return true;
  };

  double scale = 1.0;
  for (int attempt = 0; attempt < 24; ++attempt) {
    ExpansionPoint candidate = point;
    if (try_scale(scale, candidate)) {
      candidate.feasible = true;
      candidate.qos_scaled = scale < 1.0;
      return candidate;
    }
    scale *= 0.5;
    if (scale * max_qos < 1.0) break;  // below 1 bps: no usable positive start
  }

  point.feasible = false;
  return point;
}

Subproblem::Subproblem(const ChannelSet& channels, const PhaseShift& v,
                       const DecodingStructure& structure, const ExpansionPoint& point,
                       const SystemConfig& config, const SchemeOptions& scheme)
    : n_users_(channels.n_users()),
      nl_(channels.n_antennas()),
      common_(scheme.use_common),
      bandwidth_hz_(config.bandwidth_hz),
      shape_(point.omega),
      program_(1) {
  const int k_users = n_users_;
  const int wdim = 2 * nl_;
  const int l = config.antennas_per_bs;

  for (auto& w : shape_.private_bf) w.setZero();
  for (auto& w : shape_.common_bf) w.setZero();

  // Variable layout: interleaved Re/Im beamformers, then SINR targets, rates
  // in bandwidth units, and per-user power epigraphs.
  int next = 0;
  wp_.resize(k_users);
  wc_.assign(k_users, -1);
  tp_.resize(k_users);
  tc_.assign(k_users, -1);
  rp_.resize(k_users);
  rc_.assign(k_users, -1);
  pk_.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    wp_[k] = next;
    next += wdim;
  }
  if (common_) {
    for (int k = 0; k < k_users; ++k) {
      wc_[k] = next;
      next += wdim;
    }
  }
  for (int k = 0; k < k_users; ++k) tp_[k] = next++;
  if (common_) {
    for (int k = 0; k < k_users; ++k) tc_[k] = next++;
  }
  for (int k = 0; k < k_users; ++k) rp_[k] = next++;
  if (common_) {
    for (int k = 0; k < k_users; ++k) rc_[k] = next++;
  }
  for (int k = 0; k < k_users; ++k) pk_[k] = next++;

  program_ = conic::ConicProgram(next);

  // Scaled channels: g_k = h_k / h_rms and beamformer unit sigma / h_rms make
  // the noise term exactly 1 in every SINR row and keep coefficients O(1).
  std::vector<VectorXcd> h(k_users);
  for (int k = 0; k < k_users; ++k) h[k] = effective_channel(channels, k, v);
  const double h_rms = rms_channel_magnitude(h);
  const double sigma = std::sqrt(channels.noise_power_w);
  omega_scale_ = sigma / h_rms;
  std::vector<VectorXcd> g(k_users);
  for (int k = 0; k < k_users; ++k) g[k] = h[k] / h_rms;

  std::vector<VectorXcd> wp_tilde(k_users), wc_tilde(k_users);
  for (int k = 0; k < k_users; ++k) {
    wp_tilde[k] = point.omega.private_bf[k] / omega_scale_;
    wc_tilde[k] = point.omega.common_bf[k] / omega_scale_;
  }

  // Targets are normalized by their expansion values, which keeps every
  // column of the constraint matrix near unit scale even when a stream's
  // target approaches the floor.
  t_scale_p_ = point.t_private.cwiseMax(kTargetFloor);
  t_scale_c_ = point.t_common.cwiseMax(kTargetFloor);

  const double b = config.bandwidth_hz;

  // Cluster masks pin the blocks of non-serving base stations to zero.
  {
    std::vector<int> masked;
    for (int k = 0; k < k_users; ++k) {
      for (int n = 0; n < config.n_bs; ++n) {
        const auto& cp = point.omega.cluster_private[n];
        const auto& cc = point.omega.cluster_common[n];
        const bool in_p = std::find(cp.begin(), cp.end(), k) != cp.end();
        const bool in_c = std::find(cc.begin(), cc.end(), k) != cc.end();
        if (!in_p) {
          for (int a = 0; a < 2 * l; ++a) masked.push_back(wp_[k] + 2 * n * l + a);
        }
        if (common_ && !in_c) {
          for (int a = 0; a < 2 * l; ++a) masked.push_back(wc_[k] + 2 * n * l + a);
        }
      }
    }
    if (!masked.empty()) {
      program_.begin_block(ConeType::Zero);
      for (int var : masked) program_.add_row(LinExpr::of_var(var, 1.0));
    }
  }

  // QoS floor and sign constraints. Active users carry the SINR-target floor.
  program_.begin_block(ConeType::NonNeg);
  for (int k = 0; k < k_users; ++k) {
    const double t_floor = config.qos_min_bps[k] > 0.0 ? kSinrTargetFloor : 0.0;
    LinExpr qos = LinExpr::of_var(rp_[k], 1.0);
    if (common_) qos.add(rc_[k], 1.0);
    qos.add_constant(-config.qos_min_bps[k] / b);
    program_.add_row(qos);
    program_.add_row(LinExpr::of_var(tp_[k], t_scale_p_[k]).add_constant(-t_floor));
    program_.add_row(LinExpr::of_var(rp_[k], 1.0));
    if (common_) {
      program_.add_row(LinExpr::of_var(tc_[k], t_scale_c_[k]).add_constant(-t_floor));
      program_.add_row(LinExpr::of_var(rc_[k], 1.0));
    }
  }

  // Rate rows R <= log2(1+t) in bandwidth units; skipped for users without a
  // QoS, whose DC rows would be degenerate at the zero expansion point.
  for (int k = 0; k < k_users; ++k) {
    if (config.qos_min_bps[k] <= 0.0) continue;
    conic::rate_log_constraint(program_, rp_[k], tp_[k], 1.0, 1.0, t_scale_p_[k]);
    if (common_) conic::rate_log_constraint(program_, rc_[k], tc_[k], 1.0, 1.0, t_scale_c_[k]);
  }

  // Per-user power epigraphs |w_k|^2 <= p_k.
  for (int k = 0; k < k_users; ++k) {
    program_.begin_block(ConeType::Soc);
    program_.add_row(LinExpr::of_var(pk_[k], 0.5).add_constant(0.5));
    for (int i = 0; i < wdim; ++i) program_.add_row(LinExpr::of_var(wp_[k] + i, 1.0));
    if (common_) {
      for (int i = 0; i < wdim; ++i) program_.add_row(LinExpr::of_var(wc_[k] + i, 1.0));
    }
    program_.add_row(LinExpr::of_var(pk_[k], 0.5).add_constant(-0.5));
  }

  // Private SINR rows, inner-convex form: interference + noise <= Taylor
  // bound of |g_k^H w_k^p|^2 / t_k^p around the expansion point.
  for (int k = 0; k < k_users; ++k) {
    if (config.qos_min_bps[k] <= 0.0) continue;
    const std::complex<double> u_tilde = inner(g[k], wp_tilde[k]);
    const double t_tilde = point.t_private[k];
    if (!(t_tilde > 0.0)) throw std::invalid_argument("expansion t_private must be positive");

    LinExpr bound;
    bound.add_scaled(re_inner_expr(g[k], wp_[k]), 2.0 * u_tilde.real() / t_tilde);
    bound.add_scaled(im_inner_expr(g[k], wp_[k]), 2.0 * u_tilde.imag() / t_tilde);
    bound.add(tp_[k], -std::norm(u_tilde) / (t_tilde * t_tilde) * t_scale_p_[k]);

    program_.begin_block(ConeType::Soc);
    program_.add_row(bound.scaled(0.5).add_constant(0.5));
    for (int m = 0; m < k_users; ++m) {
      if (m == k) continue;
      program_.add_row(re_inner_expr(g[k], wp_[m]));
      program_.add_row(im_inner_expr(g[k], wp_[m]));
    }
    if (common_) {
      for (int lu : structure.not_decoded_by_me[k]) {
        program_.add_row(re_inner_expr(g[k], wc_[lu]));
        program_.add_row(im_inner_expr(g[k], wc_[lu]));
      }
    }
    program_.add_row(LinExpr::of_constant(1.0));  // scaled noise
    program_.add_row(bound.scaled(0.5).add_constant(-0.5));
  }

  // Common SINR rows per (k, decoder i in M_k).
  if (common_) {
    for (int k = 0; k < k_users; ++k) {
      if (config.qos_min_bps[k] <= 0.0) continue;
      const double t_tilde = point.t_common[k];
      if (!(t_tilde > 0.0)) throw std::invalid_argument("expansion t_common must be positive");
      for (int i : structure.decoders[k]) {
        const std::complex<double> u_tilde = inner(g[i], wc_tilde[k]);

        LinExpr bound;
        bound.add_scaled(re_inner_expr(g[i], wc_[k]), 2.0 * u_tilde.real() / t_tilde);
        bound.add_scaled(im_inner_expr(g[i], wc_[k]), 2.0 * u_tilde.imag() / t_tilde);
        bound.add(tc_[k], -std::norm(u_tilde) / (t_tilde * t_tilde) * t_scale_c_[k]);

        program_.begin_block(ConeType::Soc);
        program_.add_row(bound.scaled(0.5).add_constant(0.5));
        for (int j = 0; j < k_users; ++j) {
          program_.add_row(re_inner_expr(g[i], wp_[j]));
          program_.add_row(im_inner_expr(g[i], wp_[j]));
        }
        for (int lu : structure.not_decoded_by_me[i]) {
          program_.add_row(re_inner_expr(g[i], wc_[lu]));
          program_.add_row(im_inner_expr(g[i], wc_[lu]));
        }
        for (int mu : structure.after(i, k)) {
          program_.add_row(re_inner_expr(g[i], wc_[mu]));
          program_.add_row(im_inner_expr(g[i], wc_[mu]));
        }
        program_.add_row(LinExpr::of_constant(1.0));
        program_.add_row(bound.scaled(0.5).add_constant(-0.5));
      }
    }
  }

  VectorXd c = VectorXd::Zero(program_.n_vars());
  for (int k = 0; k < k_users; ++k) c[pk_[k]] = config.power_weights[k];
  program_.set_objective(c, 0.0, /*maximize=*/false);
  program_.finalize();
}

Subproblem::Extracted Subproblem::extract(const conic::ConicSolution& solution) const {
  Extracted out;
  out.omega = shape_;
  out.rates = RateAllocation::zeros(n_users_);
  const VectorXd& x = solution.x;
  for (int k = 0; k < n_users_; ++k) {
    for (int i = 0; i < nl_; ++i) {
      out.omega.private_bf[k][i] =
          omega_scale_ * std::complex<double>(x[wp_[k] + 2 * i], x[wp_[k] + 2 * i + 1]);
      if (common_) {
        out.omega.common_bf[k][i] =
            omega_scale_ * std::complex<double>(x[wc_[k] + 2 * i], x[wc_[k] + 2 * i + 1]);
      }
    }
    out.rates.t_private[k] = std::max(x[tp_[k]] * t_scale_p_[k], 0.0);
    out.rates.rate_private[k] = std::max(x[rp_[k]], 0.0) * bandwidth_hz_;
    if (common_) {
      out.rates.t_common[k] = std::max(x[tc_[k]] * t_scale_c_[k], 0.0);
      out.rates.rate_common[k] = std::max(x[rc_[k]], 0.0) * bandwidth_hz_;
    }
  }
  return out;
}

VectorXd Subproblem::embed_point(const BeamformerSet& omega, const VectorXd& t_private,
                                 const VectorXd& t_common, const VectorXd& rate_private,
                                 const VectorXd& rate_common) const {
  VectorXd x = VectorXd::Zero(program_.n_vars());
  for (int k = 0; k < n_users_; ++k) {
    double norm2 = 0.0;
    for (int i = 0; i < nl_; ++i) {
      const std::complex<double> wp = omega.private_bf[k][i] / omega_scale_;
      x[wp_[k] + 2 * i] = wp.real();
      x[wp_[k] + 2 * i + 1] = wp.imag();
      norm2 += std::norm(wp);
      if (common_) {
        const std::complex<double> wc = omega.common_bf[k][i] / omega_scale_;
        x[wc_[k] + 2 * i] = wc.real();
        x[wc_[k] + 2 * i + 1] = wc.imag();
        norm2 += std::norm(wc);
      }
    }
    x[tp_[k]] = t_private[k] / t_scale_p_[k];
    x[rp_[k]] = rate_private[k] / bandwidth_hz_;
    if (common_) {
      x[tc_[k]] = t_common[k] / t_scale_c_[k];
      x[rc_[k]] = rate_common[k] / bandwidth_hz_;
    }
    x[pk_[k]] = norm2;
  }
  return x;
}

Subproblem build_subproblem(const ChannelSet& channels, const PhaseShift& v,
                            const DecodingStructure& structure, const ExpansionPoint& point,
                            const SystemConfig& config, const SchemeOptions& scheme) {
  return Subproblem(channels, v, structure, point, config, scheme);
}

ScaResult sca_iterate(const ChannelSet& channels, const PhaseShift& v,
                      const DecodingStructure& structure, const SystemConfig& config,
                      const ExpansionPoint& start, const SchemeOptions& scheme,
                      const conic::SolverSettings& solver_settings) {
  const int k_users = channels.n_users();
  ScaResult result;
  result.omega = start.omega;
  result.rates = RateAllocation::zeros(k_users);
  result.rates.t_private = start.t_private;
  result.rates.t_common = start.t_common;

  ExpansionPoint point = start;
  for (int k = 0; k < k_users; ++k) {
    point.t_private[k] = std::max(point.t_private[k], kTargetFloor);
    point.t_common[k] = std::max(point.t_common[k], kTargetFloor);
  }

  double prev_obj = total_power(point.omega, config.power_weights);
  std::optional<conic::WarmStart> warm;

  for (int z = 0; z < kMaxScaIterations; ++z) {
    Subproblem sub(channels, v, structure, point, config, scheme);
    const conic::ConicSolution sol = conic::solve(sub.program(), solver_settings, warm);
    if (!conic::usable_solution(sol)) {
      result.trace.degraded = true;
      break;
    }
    warm = conic::WarmStart{sol.x, sol.y, sol.s};
    const Subproblem::Extracted hat = sub.extract(sol);

    // Convex-combination update keeps the next expansion point feasible.
    const double rho = config.sca_step;
    double step_sq = 0.0;
    double point_sq = 0.0;
    for (int k = 0; k < k_users; ++k) {
      step_sq += (hat.omega.private_bf[k] - point.omega.private_bf[k]).squaredNorm();
      step_sq += (hat.omega.common_bf[k] - point.omega.common_bf[k]).squaredNorm();
      point_sq += point.omega.private_bf[k].squaredNorm() + point.omega.common_bf[k].squaredNorm();
      point.omega.private_bf[k] += rho * (hat.omega.private_bf[k] - point.omega.private_bf[k]);
      point.omega.common_bf[k] += rho * (hat.omega.common_bf[k] - point.omega.common_bf[k]);
      const double dt_p = hat.rates.t_private[k] - point.t_private[k];
      const double dt_c = hat.rates.t_common[k] - point.t_common[k];
      step_sq += dt_p * dt_p + dt_c * dt_c;
      point_sq += point.t_private[k] * point.t_private[k] + point.t_common[k] * point.t_common[k];
      point.t_private[k] = std::max(point.t_private[k] + rho * dt_p, kTargetFloor);
      point.t_common[k] = std::max(point.t_common[k] + rho * dt_c, kTargetFloor);
      result.rates.rate_private[k] += rho * (hat.rates.rate_private[k] - result.rates.rate_private[k]);
      result.rates.rate_common[k] += rho * (hat.rates.rate_common[k] - result.rates.rate_common[k]);
    }

    const double obj = total_power(point.omega, config.power_weights);
    result.trace.objective_w.push_back(obj);
    result.trace.iterations = z + 1;
    result.omega = point.omega;
    result.rates.t_private = point.t_private;
    result.rates.t_common = point.t_common;

    const double rel_decrease = (prev_obj - obj) / std::max(prev_obj, 1e-300);
    const bool stationary = step_sq <= 1e-12 * std::max(point_sq, 1e-12);
    if ((z >= 1 && std::abs(rel_decrease) < config.stop_epsilon) || stationary) {
      result.trace.converged = true;
      break;
    }
    prev_obj = obj;
  }

  // Clamp the targets to the SINRs the final beamformers actually achieve, so
  // downstream consumers (phase stage, screening, next expansion point) hold
  // t <= gamma exactly rather than within solver tolerance. The expansion
  // floor must also never exceed the achieved SINR, or the next subproblem
  // would start from an infeasible linearization point.
  result.final_point = point;
  auto expansion_target = [](double t_clamped, double gamma) {
    if (gamma <= 0.0) return kTargetFloor;
    return std::max(t_clamped, std::min(gamma, kTargetFloor));
  };
  for (int k = 0; k < k_users; ++k) {
    const double gp = sinr_private(result.omega, v, channels, structure, k);
    result.rates.t_private[k] = std::max(std::min(result.rates.t_private[k], gp), 0.0);
    result.final_point.t_private[k] = expansion_target(result.rates.t_private[k], gp);
    if (scheme.use_common) {
      double gc = std::numeric_limits<double>::infinity();
      for (int i : structure.decoders[k]) {
        gc = std::min(gc, sinr_common(result.omega, v, channels, structure, i, k));
      }
      if (std::isfinite(gc)) {
        result.rates.t_common[k] = std::max(std::min(result.rates.t_common[k], gc), 0.0);
        result.final_point.t_common[k] = expansion_target(result.rates.t_common[k], gc);
      }
    } else {
      result.rates.t_common[k] = 0.0;
      result.final_point.t_common[k] = kTargetFloor;
    }
  }
  return result;
}

}  // namespace rsirs
