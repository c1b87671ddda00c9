#include "rsirs/cones.hpp"

#include <algorithm>
#include <cmath>

namespace rsirs::conic {

using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

ConeLayout ConeLayout::from_blocks(const std::vector<ConeBlock>& blocks) {
  ConeLayout layout;
  layout.blocks = blocks;
  layout.offsets.reserve(blocks.size());
  int off = 0;
  for (const auto& b : blocks) {
    layout.offsets.push_back(off);
    off += b.dim;
  }
  layout.dim = off;
  return layout;
}

namespace {

double safe_exp(double x) { return std::exp(std::min(x, 700.0)); }

/// Root function for the smooth-boundary case of the exponential-cone
/// projection. The projected point is x = (rho*x2, x2, x2*e^rho) with
/// multiplier mu = (a - rho*b) e^{-rho} / (rho^2 - rho + 1); rho solves F = 0.
double exp_proj_f(double rho, double a, double b, double c) {
  const double den = rho * rho - rho + 1.0;
  return (-safe_exp(rho) * (a * (rho - 1.0) + b) + safe_exp(-rho) * (a - b * rho)) / den + c;
}

struct ExpCandidate {
  Vector3d x;
  bool valid = false;
};

ExpCandidate exp_candidate_from_rho(double rho, const Vector3d& v) {
  const double a = v[0], b = v[1], c = v[2];
  ExpCandidate cand;
  // x2 from the x2/x3 stationarity rows; this form avoids the catastrophic
  // cancellation of the direct multiplier formula at large |rho|.
  double x2;
  if (rho <= 0.0) {
    const double e = std::exp(rho);
    x2 = (b + c * e * (1.0 - rho)) / (1.0 + e * e * (1.0 - rho));
  } else {
    const double e = std::exp(-std::min(rho, 700.0));
    const double den = e * e + (1.0 - rho);
    if (std::abs(den) < 1e-12) return cand;
    x2 = (b * e * e + c * e * (1.0 - rho)) / den;
  }
  if (!(x2 > 0.0) || !std::isfinite(x2)) return cand;
  const double erho = safe_exp(rho);
  const double x1 = rho * x2;
  const double x3 = x2 * erho;
  const double mu = x3 - c;
  if (!(mu > 0.0) || !std::isfinite(x1) || !std::isfinite(x3)) return cand;
  // Residual of the unused stationarity row validates the root.
  const double res = x1 - a + mu * erho;
  const double scale = std::max({1.0, std::abs(a), std::abs(x1), std::abs(mu * erho)});
  if (std::abs(res) > 1e-6 * scale) return cand;
  cand.x = Vector3d(x1, x2, x3);
  cand.valid = true;
  return cand;
}

}  // namespace

bool in_exp_cone(const Vector3d& v, double tol) {
  if (v[1] > 0.0) {
    // log form avoids overflow: x/y <= log(z) - log(y)
    if (v[2] > 0.0 && v[0] / v[1] <= std::log(v[2] / v[1]) + tol) return true;
    if (v[1] * safe_exp(v[0] / v[1]) <= v[2] + tol) return true;
  }
  return v[1] >= -tol && v[0] <= tol && v[2] >= -tol;
}

bool in_exp_dual_cone(const Vector3d& v, double tol) {
  // K* = {(u,v,w) : u < 0, -u e^{v/u} <= e w} union {(0,v,w) : v,w >= 0}
  if (v[0] < 0.0 && -v[0] * safe_exp(v[1] / v[0]) <= M_E * v[2] + tol) return true;
  return v[0] <= tol && v[1] >= -tol && v[2] >= -tol;
}

Vector3d project_exp_cone(const Vector3d& v) {
  constexpr double kEdgeTol = 0.0;
  // Already a member.
  if (in_exp_cone(v, kEdgeTol)) return v;
  // Polar cone (= -dual): projection is the origin.
  if (in_exp_dual_cone(-v, kEdgeTol)) return Vector3d::Zero();
  // South-west region: nearest point lies on the edge {(x,0,z): x<=0, z>=0}.
  if (v[0] <= 0.0 && v[1] <= 0.0) return {v[0], 0.0, std::max(v[2], 0.0)};

  // Smooth boundary: find roots of F over rho and keep the valid candidate
  // closest to v.
  const double a = v[0], b = v[1], c = v[2];
  ExpCandidate best;
  double best_dist = std::numeric_limits<double>::infinity();

  auto bisect_into = [&](double lo, double hi, double flo) {
    for (int it = 0; it < 140; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fmid = exp_proj_f(mid, a, b, c);
      if (fmid == 0.0) {
        lo = hi = mid;
        break;
      }
      if (flo * fmid < 0.0) {
        hi = mid;
      } else {
        lo = mid;
        flo = fmid;
      }
      if (hi - lo < 1e-16 * std::max(1.0, std::abs(lo))) break;
    }
    const ExpCandidate cand = exp_candidate_from_rho(0.5 * (lo + hi), v);
    if (cand.valid) {
      const double dist = (cand.x - v).norm();
      if (dist < best_dist) {
        best = cand;
        best_dist = dist;
      }
    }
  };

  // Quick pass: symmetric expansion around the origin.
  {
    double lo = -1.0, hi = 1.0;
    double flo = exp_proj_f(lo, a, b, c);
    double fhi = exp_proj_f(hi, a, b, c);
    for (int expand = 0; expand < 64 && flo * fhi > 0.0; ++expand) {
      lo *= 1.75;
      hi *= 1.75;
      flo = exp_proj_f(lo, a, b, c);
      fhi = exp_proj_f(hi, a, b, c);
    }
    if (flo * fhi <= 0.0) bisect_into(lo, hi, flo);
  }

  // Fallback: dense scans catch roots the expansion straddles.
  if (!best.valid) {
    for (const auto& [span, step] : {std::pair{30.0, 0.125}, std::pair{300.0, 2.0}}) {
      double prev_rho = -span;
      double prev_f = exp_proj_f(prev_rho, a, b, c);
      for (double rho = -span + step; rho <= span; rho += step) {
        const double f = exp_proj_f(rho, a, b, c);
        if (prev_f * f <= 0.0 && std::isfinite(prev_f) && std::isfinite(f)) {
          bisect_into(prev_rho, rho, prev_f);
        }
        prev_rho = rho;
        prev_f = f;
      }
      if (best.valid) break;
    }
  }

  // Edge of the cone; covers the remaining boundary cases.
  const Vector3d edge(std::min(a, 0.0), 0.0, std::max(c, 0.0));
  if (!best.valid || (edge - v).norm() < best_dist) return edge;
  return best.x;
}

Vector3d project_exp_dual_cone(const Vector3d& v) {
  // Moreau: Pi_{K*}(v) = v + Pi_K(-v).
  return v + project_exp_cone(-v);
}

void project_soc(double* x, int dim) {
  const Eigen::Map<VectorXd> tail(x + 1, dim - 1);
  const double t = x[0];
  const double nw = tail.norm();
  if (nw <= t) return;
  if (nw <= -t) {
    std::fill(x, x + dim, 0.0);
    return;
  }
  const double beta = 0.5 * (t + nw);
  x[0] = beta;
  Eigen::Map<VectorXd>(x + 1, dim - 1) *= beta / nw;
}

void project_psd_svec(double* x, int order) {
  Eigen::Map<VectorXd> packed(x, svec_dim(order));
  MatrixXd m = unsvec(packed, order);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m);
  const VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  m.noalias() = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  packed = svec(m);
}

double max_constraint_violation(const ConicProgram& program, const VectorXd& x) {
  const ConeLayout layout = ConeLayout::from_blocks(program.blocks());
  VectorXd values(program.n_rows());
  for (int r = 0; r < program.n_rows(); ++r) values[r] = program.row_value(r, x);
  VectorXd projected = values;
  project_onto_cones(projected, layout, /*dual=*/false, par::Exec::Serial);
  return (values - projected).lpNorm<Eigen::Infinity>();
}

void project_onto_cones(VectorXd& z, const ConeLayout& layout, bool dual, par::Exec exec) {
  par::for_each(layout.blocks.size(), exec, [&](std::size_t bi) {
    const ConeBlock& block = layout.blocks[bi];
    double* ptr = z.data() + layout.offsets[bi];
    switch (block.type) {
      case ConeType::Zero:
        if (dual) return;  // dual of {0} is free
        std::fill(ptr, ptr + block.dim, 0.0);
        return;
      case ConeType::NonNeg:
        for (int i = 0; i < block.dim; ++i) ptr[i] = std::max(ptr[i], 0.0);
        return;
      case ConeType::Soc:
        project_soc(ptr, block.dim);
        return;
      case ConeType::Psd:
        project_psd_svec(ptr, block.psd_order);
        return;
      case ConeType::Exp:
        for (int i = 0; i < block.dim; i += 3) {
          Eigen::Map<Vector3d> triple(ptr + i);
          triple = dual ? project_exp_dual_cone(triple) : project_exp_cone(triple);
        }
        return;
    }
  });
}

}  // namespace rsirs::conic
