#include "rsirs/conic.hpp"

#include <cmath>
#include <stdexcept>

namespace rsirs::conic {

LinExpr LinExpr::of_constant(double c) {
  LinExpr e;
  e.constant = c;
  return e;
}

LinExpr LinExpr::of_var(int var, double coeff) {
  LinExpr e;
  e.terms.emplace_back(var, coeff);
  return e;
}

LinExpr& LinExpr::add(int var, double coeff) {
  if (coeff != 0.0) terms.emplace_back(var, coeff);
  return *this;
}

LinExpr& LinExpr::add_constant(double c) {
  constant += c;
  return *this;
}

LinExpr& LinExpr::add_scaled(const LinExpr& other, double scale) {
  for (const auto& [var, coeff] : other.terms) add(var, coeff * scale);
  constant += other.constant * scale;
  return *this;
}

LinExpr LinExpr::scaled(double s) const {
  LinExpr e;
  e.constant = constant * s;
  e.terms.reserve(terms.size());
  for (const auto& [var, coeff] : terms) e.terms.emplace_back(var, coeff * s);
  return e;
}

ConicProgram::ConicProgram(int n_vars) : n_vars_(n_vars), objective_(VectorXd::Zero(n_vars)) {
  if (n_vars < 1) throw std::invalid_argument("program needs at least one variable");
}

void ConicProgram::set_objective(VectorXd coeffs, double constant, bool maximize) {
  if (coeffs.size() != n_vars_) throw std::invalid_argument("objective length must equal n_vars");
  objective_ = std::move(coeffs);
  objective_constant_ = constant;
  maximize_ = maximize;
}

void ConicProgram::begin_block(ConeType type, int psd_order) {
  if (finalized_) throw std::logic_error("program already finalized");
  if (type == ConeType::Psd && psd_order < 1) {
    throw std::invalid_argument("PSD block needs order >= 1");
  }
  blocks_.push_back({type, 0, type == ConeType::Psd ? psd_order : 0});
}

void ConicProgram::add_row(LinExpr row) {
  if (finalized_) throw std::logic_error("program already finalized");
  if (blocks_.empty()) throw std::logic_error("begin_block before add_row");
  for (const auto& [var, coeff] : row.terms) {
    if (var < 0 || var >= n_vars_) throw std::invalid_argument("row references unknown variable");
    if (!std::isfinite(coeff)) throw std::invalid_argument("row coefficient not finite");
  }
  if (!std::isfinite(row.constant)) throw std::invalid_argument("row offset not finite");
  rows_.push_back(std::move(row));
  blocks_.back().dim += 1;
}

void ConicProgram::finalize() {
  for (const auto& block : blocks_) {
    if (block.dim < 1) throw std::logic_error("empty cone block");
    switch (block.type) {
      case ConeType::Soc:
        if (block.dim < 2) throw std::logic_error("second-order cone block needs dim >= 2");
        break;
      case ConeType::Exp:
        if (block.dim % 3 != 0) throw std::logic_error("exponential cone block dim must be 3k");
        break;
      case ConeType::Psd:
        if (block.dim != svec_dim(block.psd_order)) {
          throw std::logic_error("PSD block dim must be order*(order+1)/2");
        }
        break;
      default:
        break;
    }
  }
  finalized_ = true;
}

double ConicProgram::row_value(int r, const VectorXd& x) const {
  const LinExpr& row = rows_[r];
  double v = row.constant;
  for (const auto& [var, coeff] : row.terms) v += coeff * x[var];
  return v;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Inaccurate:
      return "inaccurate";
    case SolveStatus::Failed:
      return "failed";
  }
  return "unknown";
}

MatrixXd HermitianEmbedding::embed(const MatrixXcd& v) const {
  if (v.rows() != complex_order || v.cols() != complex_order) {
    throw std::invalid_argument("embed: matrix order mismatch");
  }
  MatrixXd s(real_order, real_order);
  const MatrixXd re = v.real();
  const MatrixXd im = v.imag();
  s.topLeftCorner(complex_order, complex_order) = re;
  s.topRightCorner(complex_order, complex_order) = -im;
  s.bottomLeftCorner(complex_order, complex_order) = im;
  s.bottomRightCorner(complex_order, complex_order) = re;
  return s;
}

MatrixXcd HermitianEmbedding::reconstruct(const MatrixXd& s) const {
  if (s.rows() != real_order || s.cols() != real_order) {
    throw std::invalid_argument("reconstruct: matrix order mismatch");
  }
  const int n = complex_order;
  const MatrixXd re = 0.5 * (s.topLeftCorner(n, n) + s.bottomRightCorner(n, n));
  const MatrixXd im = 0.5 * (s.bottomLeftCorner(n, n) - s.topRightCorner(n, n));
  MatrixXcd v(n, n);
  v.real() = re;
  v.imag() = im;
  return v;
}

HermitianEmbedding embed_hermitian(int order) {
  if (order < 1) throw std::invalid_argument("embed_hermitian needs order >= 1");
  return {order, 2 * order};
}

int svec_dim(int order) { return order * (order + 1) / 2; }

VectorXd svec(const MatrixXd& x) {
  const int n = static_cast<int>(x.rows());
  VectorXd packed(svec_dim(n));
  int idx = 0;
  for (int j = 0; j < n; ++j) {
    packed[idx++] = x(j, j);
    for (int i = j + 1; i < n; ++i) packed[idx++] = M_SQRT2 * x(i, j);
  }
  return packed;
}

MatrixXd unsvec(const VectorXd& packed, int order) {
  if (packed.size() != svec_dim(order)) throw std::invalid_argument("unsvec: length mismatch");
  MatrixXd x(order, order);
  int idx = 0;
  for (int j = 0; j < order; ++j) {
    x(j, j) = packed[idx++];
    for (int i = j + 1; i < order; ++i) {
      const double v = packed[idx++] * M_SQRT1_2;
      x(i, j) = v;
      x(j, i) = v;
    }
  }
  return x;
}

void rate_log_constraint(ConicProgram& program, int rate_var, int t_var, double bandwidth_hz,
                         double rate_scale, double t_scale) {
  if (bandwidth_hz <= 0.0) throw std::invalid_argument("bandwidth must be positive");
  // rate <= B log2(1+t)  <=>  exp(ln2 * rate / B) <= 1 + t
  // encoded as (ln2/B * rate, 1, 1 + t) in the exponential cone.
  program.begin_block(ConeType::Exp);
  program.add_row(LinExpr::of_var(rate_var, rate_scale * M_LN2 / bandwidth_hz));
  program.add_row(LinExpr::of_constant(1.0));
  program.add_row(LinExpr::of_var(t_var, t_scale).add_constant(1.0));
}

}  // namespace rsirs::conic
