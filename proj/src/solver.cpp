#include "rsirs/solver.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <iostream>
#include <limits>

namespace rsirs::conic {

using Eigen::SparseMatrix;
using Eigen::Triplet;
using Eigen::VectorXd;

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, const std::vector<Triplet<double>>& triplets) {
  SparseMatrix<double, Eigen::RowMajor> m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  CsrMatrix out;
  out.rows = rows;
  out.cols = cols;
  out.row_ptr.assign(m.outerIndexPtr(), m.outerIndexPtr() + rows + 1);
  out.col_idx.assign(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros());
  out.values.assign(m.valuePtr(), m.valuePtr() + m.nonZeros());
  return out;
}

CsrMatrix CsrMatrix::transposed() const {
  std::vector<Triplet<double>> trips;
  trips.reserve(values.size());
  for (int r = 0; r < rows; ++r) {
    for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
      trips.emplace_back(col_idx[p], r, values[p]);
    }
  }
  return from_triplets(cols, rows, trips);
}

void csr_matvec(const CsrMatrix& a, const VectorXd& x, VectorXd& y, par::Exec exec) {
  y.resize(a.rows);
  par::for_each(static_cast<std::size_t>(a.rows), exec, [&](std::size_t r) {
    double acc = 0.0;
    for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
      acc += a.values[p] * x[a.col_idx[p]];
    }
    y[static_cast<Eigen::Index>(r)] = acc;
  });
}

namespace {

struct StandardForm {
  // minimize c'x  s.t.  A x + s = b, s in K.
  CsrMatrix a;
  CsrMatrix at;
  VectorXd b;
  VectorXd c;
  ConeLayout cones;
  double sign = 1.0;  // -1 when the program maximizes
};

StandardForm to_standard_form(const ConicProgram& program) {
  StandardForm f;
  f.cones = ConeLayout::from_blocks(program.blocks());
  const int m = program.n_rows();
  const int n = program.n_vars();
  std::vector<Triplet<double>> trips;
  f.b = VectorXd::Zero(m);
  for (int r = 0; r < m; ++r) {
    const LinExpr& row = program.rows()[r];
    f.b[r] = row.constant;  // F x + g in K  ->  (-F) x + s = g
    for (const auto& [var, coeff] : row.terms) trips.emplace_back(r, var, -coeff);
  }
  f.a = CsrMatrix::from_triplets(m, n, trips);
  f.at = f.a.transposed();
  f.sign = program.maximize() ? -1.0 : 1.0;
  f.c = f.sign * program.objective();
  return f;
}

/// Cone-aware Ruiz equilibration. Row scales are uniform within each cone
/// block (cones are invariant under uniform positive scaling), column scales
/// are free.
struct Equilibration {
  VectorXd row_scale;  // D
  VectorXd col_scale;  // E
  double b_scale = 1.0;
  double c_scale = 1.0;
};

Equilibration equilibrate(CsrMatrix& a, VectorXd& b, VectorXd& c, const ConeLayout& cones,
                          int iters) {
  const int m = a.rows, n = a.cols;
  Equilibration eq;
  eq.row_scale = VectorXd::Ones(m);
  eq.col_scale = VectorXd::Ones(n);

  for (int it = 0; it < iters; ++it) {
    VectorXd row_max = VectorXd::Zero(m);
    VectorXd col_max = VectorXd::Zero(n);
    for (int r = 0; r < m; ++r) {
      for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
        const double v = std::abs(a.values[p]);
        row_max[r] = std::max(row_max[r], v);
        col_max[a.col_idx[p]] = std::max(col_max[a.col_idx[p]], v);
      }
    }
    // Soc/Exp/Psd cones are only invariant under uniform scaling, so those
    // blocks share one row scale; Zero and NonNeg rows scale independently.
    for (std::size_t bi = 0; bi < cones.blocks.size(); ++bi) {
      const ConeType type = cones.blocks[bi].type;
      if (type == ConeType::Zero || type == ConeType::NonNeg) continue;
      const int off = cones.offsets[bi];
      const int dim = cones.blocks[bi].dim;
      double blk = 0.0;
      for (int i = 0; i < dim; ++i) blk = std::max(blk, row_max[off + i]);
      for (int i = 0; i < dim; ++i) row_max[off + i] = blk;
    }
    bool changed = false;
    VectorXd dr = VectorXd::Ones(m), dc = VectorXd::Ones(n);
    for (int r = 0; r < m; ++r) {
      if (row_max[r] > 1e-12) {
        dr[r] = 1.0 / std::sqrt(row_max[r]);
        changed = changed || std::abs(row_max[r] - 1.0) > 1e-3;
      }
    }
    for (int j = 0; j < n; ++j) {
      if (col_max[j] > 1e-12) {
        dc[j] = 1.0 / std::sqrt(col_max[j]);
        changed = changed || std::abs(col_max[j] - 1.0) > 1e-3;
      }
    }
    for (int r = 0; r < m; ++r) {
      for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
        a.values[p] *= dr[r] * dc[a.col_idx[p]];
      }
    }
    eq.row_scale.array() *= dr.array();
    eq.col_scale.array() *= dc.array();
    if (!changed) break;
  }
  b.array() *= eq.row_scale.array();
  c.array() *= eq.col_scale.array();
  eq.b_scale = std::max(b.norm(), 1e-6);
  eq.c_scale = std::max(c.norm(), 1e-6);
  b /= eq.b_scale;
  c /= eq.c_scale;
  return eq;
}

struct Residuals {
  double primal = std::numeric_limits<double>::infinity();
  double dual = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  double worst() const { return std::max({primal, dual, gap}); }
};

}  // namespace

ConicSolution solve(const ConicProgram& program, const SolverSettings& settings,
                    const std::optional<WarmStart>& warm) {
  if (!program.finalized()) throw std::logic_error("solve: program must be finalized");

  StandardForm f = to_standard_form(program);
  const int m = f.a.rows;
  const int n = f.a.cols;

  ConicSolution sol;
  sol.x = VectorXd::Zero(n);
  sol.y = VectorXd::Zero(m);
  sol.s = VectorXd::Zero(m);

  if (m == 0) {
    // Unconstrained linear objective: optimal only when c == 0.
    sol.status = f.c.norm() == 0.0 ? SolveStatus::Optimal : SolveStatus::Failed;
    sol.objective = program.objective_constant();
    return sol;
  }

  // Keep the original data for residual checks; equilibrate a working copy.
  const CsrMatrix a0 = f.a;
  const CsrMatrix at0 = f.at;
  const VectorXd b0 = f.b;
  const VectorXd c0 = f.c;
  const double bnorm0 = 1.0 + b0.norm();
  const double cnorm0 = 1.0 + c0.norm();

  Equilibration eq = equilibrate(f.a, f.b, f.c, f.cones, settings.ruiz_iters);
  f.at = f.a.transposed();

  // Quasidefinite KKT matrix [[I, A'], [A, -I]], factored once.
  std::vector<Triplet<double>> ktrips;
  ktrips.reserve(f.a.values.size() * 2 + m + n);
  for (int j = 0; j < n; ++j) ktrips.emplace_back(j, j, 1.0);
  for (int r = 0; r < m; ++r) {
    ktrips.emplace_back(n + r, n + r, -1.0);
    for (int p = f.a.row_ptr[r]; p < f.a.row_ptr[r + 1]; ++p) {
      ktrips.emplace_back(n + r, f.a.col_idx[p], f.a.values[p]);
      ktrips.emplace_back(f.a.col_idx[p], n + r, f.a.values[p]);
    }
  }
  SparseMatrix<double> kkt(n + m, n + m);
  kkt.setFromTriplets(ktrips.begin(), ktrips.end());
  Eigen::SimplicialLDLT<SparseMatrix<double>> ldlt;
  ldlt.compute(kkt);
  if (ldlt.info() != Eigen::Success) {
    sol.status = SolveStatus::Failed;
    return sol;
  }

  // Solves [[I, A'],[-A, I]] z = r via the quasidefinite system.
  VectorXd kkt_rhs(n + m), kkt_sol(n + m);
  auto skew_solve = [&](const VectorXd& r1, const VectorXd& r2, VectorXd& z1, VectorXd& z2) {
    kkt_rhs.head(n) = r1;
    kkt_rhs.tail(m) = -r2;
    kkt_sol = ldlt.solve(kkt_rhs);
    z1 = kkt_sol.head(n);
    z2 = kkt_sol.tail(m);
  };

  // h = (c, b); p = M^{-1} h, shared by every iteration.
  VectorXd ph(n), pb(m);
  skew_solve(f.c, f.b, ph, pb);
  const double denom = 1.0 + f.c.dot(ph) + f.b.dot(pb);

  // Iterates u = (x, y, tau), v = (0, s, kappa).
  VectorXd ux = VectorXd::Zero(n), uy = VectorXd::Zero(m);
  double utau = 1.0;
  VectorXd vx = VectorXd::Zero(n), vy = VectorXd::Zero(m);
  double vkappa = 0.0;
  if (warm.has_value() && warm->x.size() == n && warm->y.size() == m && warm->s.size() == m) {
    ux = warm->x.cwiseQuotient(eq.col_scale) / eq.b_scale;
    uy = warm->y.cwiseQuotient(eq.row_scale) / eq.c_scale;
    vy = warm->s.cwiseProduct(eq.row_scale) / eq.b_scale;
  }

  VectorXd wx(n), wy(m), tx(n), ty(m), qx(n), qy(m);
  VectorXd cand_x(n), cand_y(m), cand_s(m), ax(m), aty(n);

  Residuals best;
  VectorXd best_x = ux, best_y = uy, best_s = vy;
  int best_iter = 0;

  auto unscale = [&](const VectorXd& xh, const VectorXd& yh, const VectorXd& sh, VectorXd& x,
                     VectorXd& y, VectorXd& s) {
    x = xh.cwiseProduct(eq.col_scale) * eq.b_scale;
    y = yh.cwiseProduct(eq.row_scale) * eq.c_scale;
    s = sh.cwiseQuotient(eq.row_scale) * eq.b_scale;
  };

  const double tol = settings.tol;
  int iter = 0;
  for (; iter < settings.max_iters; ++iter) {
    // ut = (I + Q)^{-1} (u + v): one KKT solve plus a Sherman-Morrison
    // correction for the rank-one tau coupling.
    wx = ux + vx;
    wy = uy + vy;
    const double wtau = utau + vkappa;
    skew_solve(wx - f.c * wtau, wy - f.b * wtau, qx, qy);
    const double coef = (f.c.dot(qx) + f.b.dot(qy)) / denom;
    tx = qx - ph * coef;
    ty = qy - pb * coef;
    const double ttau = wtau + coef;

    // Over-relaxation.
    const double alpha = settings.relax_alpha;
    tx = alpha * tx + (1.0 - alpha) * ux;
    ty = alpha * ty + (1.0 - alpha) * uy;
    const double ttau_r = alpha * ttau + (1.0 - alpha) * utau;

    // u = Pi_C(t - v), C = R^n x K* x R+.
    ux = tx - vx;
    uy = ty - vy;
    project_onto_cones(uy, f.cones, /*dual=*/true, settings.exec);
    utau = std::max(ttau_r - vkappa, 0.0);

    // v = v + u - t.
    vx += ux - tx;
    vy += uy - ty;
    vkappa += utau - ttau_r;

    if ((iter + 1) % settings.check_every != 0) continue;

    if (utau > 1e-12) {
      cand_x = ux / utau;
      cand_y = uy / utau;
      cand_s = vy / utau;
      VectorXd x, y, s;
      unscale(cand_x, cand_y, cand_s, x, y, s);
      csr_matvec(a0, x, ax, settings.exec);
      csr_matvec(at0, y, aty, settings.exec);
      const double ctx = c0.dot(x);
      const double bty = b0.dot(y);
      Residuals res;
      res.primal = (ax + s - b0).norm() / bnorm0;
      res.dual = (aty + c0).norm() / cnorm0;
      res.gap = std::abs(ctx + bty) / (1.0 + std::abs(ctx) + std::abs(bty));
      if (res.worst() < best.worst()) {
        best = res;
        best_x = x;
        best_y = y;
        best_s = s;
        best_iter = iter + 1;
      }
      if (res.primal <= tol && res.dual <= tol && res.gap <= tol) {
        sol.status = SolveStatus::Optimal;
        sol.x = x;
        sol.y = y;
        sol.s = s;
        sol.iterations = iter + 1;
        sol.primal_residual = res.primal;
        sol.dual_residual = res.dual;
        sol.duality_gap = res.gap;
        sol.objective = f.sign * ctx + program.objective_constant();
        return sol;
      }
    }

    // Certificates of primal/dual infeasibility from the raw iterates.
    {
      VectorXd x, y, s;
      unscale(ux, uy, vy, x, y, s);
      const double bty = b0.dot(y);
      if (bty < -1e-12) {
        csr_matvec(at0, y, aty, settings.exec);
        if (aty.norm() * (bnorm0 - 1.0) <= -tol * bty) {
          sol.status = SolveStatus::Infeasible;
          sol.y = y / (-bty);
          sol.iterations = iter + 1;
          return sol;
        }
      }
      const double ctx = c0.dot(x);
      if (ctx < -1e-12) {
        csr_matvec(a0, x, ax, settings.exec);
        if ((ax + s).norm() * (cnorm0 - 1.0) <= -tol * ctx) {
          sol.status = SolveStatus::Failed;  // unbounded below
          sol.iterations = iter + 1;
          return sol;
        }
      }
    }
  }

  sol.iterations = iter;
  sol.x = best_x;
  sol.y = best_y;
  sol.s = best_s;
  sol.primal_residual = best.primal;
  sol.dual_residual = best.dual;
  sol.duality_gap = best.gap;
  sol.objective = f.sign * c0.dot(best_x) + program.objective_constant();
  sol.status = best.worst() <= 1e-4 ? SolveStatus::Inaccurate : SolveStatus::Failed;
  if (settings.verbose) {
    std::cerr << "solver: max iters, best residuals " << best.primal << " " << best.dual << " "
              << best.gap << " at iter " << best_iter << "\n";
  }
  return sol;
}

ConicSolution solve(const ConicProgram& program, double tol) {
  SolverSettings settings;
  settings.tol = tol;
  return solve(program, settings);
}

}  // namespace rsirs::conic
