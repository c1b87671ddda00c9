#pragma once

#include <optional>

#include "rsirs/cones.hpp"
#include "rsirs/conic.hpp"
#include "rsirs/parallel.hpp"

namespace rsirs::conic {

/// Compressed sparse rows; the matvec kernel writes one output slot per row,
/// so the OpenMP path reproduces the serial result bitwise.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> values;

  static CsrMatrix from_triplets(int rows, int cols,
                                 const std::vector<Eigen::Triplet<double>>& triplets);
  CsrMatrix transposed() const;
};

/// y = A x.
void csr_matvec(const CsrMatrix& a, const Eigen::VectorXd& x, Eigen::VectorXd& y, par::Exec exec);

struct SolverSettings {
  double tol = 1e-8;
  int max_iters = 30000;
  int check_every = 25;
  double relax_alpha = 1.5;
  int ruiz_iters = 10;
  par::Exec exec = par::Exec::Serial;
  bool verbose = false;
};

/// Residual level at which an Inaccurate solution is still usable by the
/// iterative callers; matches the slack of the descent checks.
inline constexpr double kUsableResidual = 1e-6;

inline bool usable_solution(const ConicSolution& sol) {
  if (sol.status == SolveStatus::Optimal) return true;
  return sol.status == SolveStatus::Inaccurate && sol.primal_residual <= kUsableResidual &&
         sol.dual_residual <= kUsableResidual && sol.duality_gap <= kUsableResidual;
}

struct WarmStart {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd s;
};

/// Solves the program with a homogeneous self-dual operator-splitting method
/// (ADMM on the self-dual embedding; the linear system is factored once per
/// program with a sparse LDLT). Deterministic for identical inputs.
ConicSolution solve(const ConicProgram& program, const SolverSettings& settings = {},
                    const std::optional<WarmStart>& warm = std::nullopt);

/// Convenience overload matching the basic contract: default settings with
/// the given feasibility/gap tolerance.
ConicSolution solve(const ConicProgram& program, double tol);

}  // namespace rsirs::conic
