#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <string>
#include <utility>
#include <vector>

namespace rsirs::conic {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class ConeType { Zero, NonNeg, Soc, Exp, Psd };

/// One block of constraint rows. For Psd blocks, dim is the packed (svec)
/// length order*(order+1)/2 of a real symmetric matrix of the given order.
struct ConeBlock {
  ConeType type = ConeType::Zero;
  int dim = 0;
  int psd_order = 0;
};

/// Sparse affine expression over the program variables.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  static LinExpr of_constant(double c);
  static LinExpr of_var(int var, double coeff = 1.0);
  LinExpr& add(int var, double coeff);
  LinExpr& add_constant(double c);
  LinExpr& add_scaled(const LinExpr& other, double scale);
  LinExpr scaled(double s) const;
};

/// Linear conic program: minimize (or maximize) c'x + const subject to
/// F x + g lying in a product of cones, one affine block per cone.
class ConicProgram {
 public:
  explicit ConicProgram(int n_vars);

  int n_vars() const { return n_vars_; }
  int n_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<ConeBlock>& blocks() const { return blocks_; }
  const std::vector<LinExpr>& rows() const { return rows_; }

  void set_objective(VectorXd coeffs, double constant = 0.0, bool maximize = false);
  const VectorXd& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }
  bool maximize() const { return maximize_; }

  /// Opens a new cone block; subsequent add_row calls append to it until the
  /// next begin_block. Psd blocks must receive exactly
  /// order*(order+1)/2 rows (packed lower triangle, column-major, with
  /// off-diagonal entries scaled by sqrt(2)).
  void begin_block(ConeType type, int psd_order = 0);
  void add_row(LinExpr row);

  /// Validates block dimensions and objective length; throws std::logic_error.
  void finalize();
  bool finalized() const { return finalized_; }

  /// Value of row r at the point x.
  double row_value(int r, const VectorXd& x) const;

 private:
  int n_vars_ = 0;
  VectorXd objective_;
  double objective_constant_ = 0.0;
  bool maximize_ = false;
  std::vector<ConeBlock> blocks_;
  std::vector<LinExpr> rows_;
  bool finalized_ = false;
};

enum class SolveStatus { Optimal, Infeasible, Inaccurate, Failed };

std::string to_string(SolveStatus status);

struct ConicSolution {
  SolveStatus status = SolveStatus::Failed;
  VectorXd x;          // primal values, length n_vars
  VectorXd y;          // dual values, one per row
  VectorXd s;          // primal slacks, one per row
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
};

/// Real-symmetric embedding of Hermitian matrices: V maps to
/// [[Re V, -Im V], [Im V, Re V]], which is PSD exactly when V is.
struct HermitianEmbedding {
  int complex_order = 0;
  int real_order = 0;

  MatrixXd embed(const MatrixXcd& v) const;
  MatrixXcd reconstruct(const MatrixXd& s) const;
};

HermitianEmbedding embed_hermitian(int order);

/// Packed length of a real symmetric matrix of the given order.
int svec_dim(int order);

/// svec packing: lower triangle, column-major, off-diagonals scaled by
/// sqrt(2) so that the packed Euclidean norm equals the Frobenius norm.
VectorXd svec(const MatrixXd& x);
MatrixXd unsvec(const VectorXd& packed, int order);

/// Appends the exponential-cone rows encoding
///   rate_var <= bandwidth_hz * log2(1 + t_var),  t_var >= 0 implied separately.
/// rate_scale and t_scale convert normalized variables into bps and SINR
/// units (1.0 when the variables already carry those units).
void rate_log_constraint(ConicProgram& program, int rate_var, int t_var, double bandwidth_hz,
                         double rate_scale = 1.0, double t_scale = 1.0);

}  // namespace rsirs::conic
