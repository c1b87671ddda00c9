#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rsirs/conic.hpp"
#include "rsirs/parallel.hpp"

namespace rsirs::conic {

/// Row offsets of each cone block inside the stacked constraint vector.
struct ConeLayout {
  std::vector<ConeBlock> blocks;
  std::vector<int> offsets;
  int dim = 0;

  static ConeLayout from_blocks(const std::vector<ConeBlock>& blocks);
};

/// Projects z in place onto the product cone (dual = false) or onto its dual
/// (dual = true). Blocks are independent, so the OpenMP path is bitwise
/// identical to the serial one.
void project_onto_cones(Eigen::VectorXd& z, const ConeLayout& layout, bool dual, par::Exec exec);

/// Euclidean projection onto the exponential cone
/// cl{(x, y, z) : y > 0, y*exp(x/y) <= z}.
Eigen::Vector3d project_exp_cone(const Eigen::Vector3d& v);

/// Projection onto the dual exponential cone via Moreau decomposition.
Eigen::Vector3d project_exp_dual_cone(const Eigen::Vector3d& v);

/// Membership tests with additive tolerance, used by the projection tests
/// and the solver's feasibility reporting.
bool in_exp_cone(const Eigen::Vector3d& v, double tol);
bool in_exp_dual_cone(const Eigen::Vector3d& v, double tol);

/// In-place projection of one second-order cone block (x[0] is the head).
void project_soc(double* x, int dim);

/// In-place projection of one svec-packed PSD block of the given order.
void project_psd_svec(double* x, int order);

/// Largest distance (infinity norm) of F x + g from its cone, blockwise via
/// the projections. Zero for feasible points.
double max_constraint_violation(const ConicProgram& program, const Eigen::VectorXd& x);

}  // namespace rsirs::conic
