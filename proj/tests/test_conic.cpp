#include <cmath>

#include "doctest.h"
#include "rsirs/cones.hpp"
#include "rsirs/conic.hpp"
#include "rsirs/rng.hpp"
#include "rsirs/solver.hpp"

using namespace rsirs;
using namespace rsirs::conic;
using Eigen::Vector3d;

TEST_CASE("hermitian embedding round trip and PSD equivalence") {
  const HermitianEmbedding e = embed_hermitian(2);
  CHECK(e.real_order == 4);

  SUBCASE("scalar case") {
    const HermitianEmbedding e1 = embed_hermitian(1);
    MatrixXcd v = MatrixXcd::Constant(1, 1, std::complex<double>(1.0, 0.0));
    const MatrixXd s = e1.embed(v);
    CHECK(s == MatrixXd::Identity(2, 2));
    CHECK(s.trace() == doctest::Approx(2.0));
  }

  SUBCASE("PSD matrix stays PSD") {
    MatrixXcd v(2, 2);
    v << std::complex<double>(2, 0), std::complex<double>(0, 1), std::complex<double>(0, -1),
        std::complex<double>(2, 0);
    const MatrixXd s = e.embed(v);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
    // Eigenvalues of the Hermitian matrix are 2 +- 1; embedding duplicates them.
    CHECK(eig.eigenvalues().minCoeff() == doctest::Approx(1.0));
    CHECK(eig.eigenvalues().maxCoeff() == doctest::Approx(3.0));
  }

  SUBCASE("indefinite matrix stays indefinite") {
    MatrixXcd v(2, 2);
    v << std::complex<double>(1, 0), std::complex<double>(0, 0), std::complex<double>(0, 0),
        std::complex<double>(-1, 0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(e.embed(v));
    CHECK(eig.eigenvalues().minCoeff() < -0.5);
  }

  SUBCASE("round trip") {
    Rng rng(3);
    MatrixXcd v(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) v(i, j) = rng.cnormal();
    }
    v = MatrixXcd((v + v.adjoint()) / 2.0);
    const HermitianEmbedding e3 = embed_hermitian(3);
    const MatrixXcd back = e3.reconstruct(e3.embed(v));
    CHECK((back - v).norm() <= 1e-12);
  }
}

TEST_CASE("svec round trip preserves the Frobenius norm") {
  Rng rng(5);
  MatrixXd x(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) x(i, j) = rng.normal();
  }
  x = MatrixXd((x + x.transpose()) / 2.0);
  const VectorXd packed = svec(x);
  CHECK(packed.size() == svec_dim(4));
  CHECK(packed.norm() == doctest::Approx(x.norm()).epsilon(1e-12));
  CHECK((unsvec(packed, 4) - x).norm() <= 1e-14);
}

namespace {

bool in_cone_block(const ConeBlock& block, const VectorXd& z, double tol) {
  switch (block.type) {
    case ConeType::Zero:
      return z.lpNorm<Eigen::Infinity>() <= tol;
    case ConeType::NonNeg:
      return z.minCoeff() >= -tol;
    case ConeType::Soc:
      return z.tail(z.size() - 1).norm() <= z[0] + tol;
    case ConeType::Exp: {
      for (int i = 0; i < z.size(); i += 3) {
        if (!in_exp_cone(z.segment<3>(i), tol)) return false;
      }
      return true;
    }
    case ConeType::Psd: {
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(unsvec(z, block.psd_order));
      return eig.eigenvalues().minCoeff() >= -tol;
    }
  }
  return false;
}

/// Projection optimality: p in K, v - p in the polar cone, <p, v-p> = 0.
void check_projection(const ConeBlock& block, const VectorXd& v, const VectorXd& p, double tol) {
  CHECK(in_cone_block(block, p, tol));
  const VectorXd residual = v - p;
  // Polar cone membership via the dual: -(v - p) must lie in K*.
  switch (block.type) {
    case ConeType::Exp:
      for (int i = 0; i < v.size(); i += 3) {
        CHECK(in_exp_dual_cone(-residual.segment<3>(i), tol));
      }
      break;
    case ConeType::Soc: {
      VectorXd neg = -residual;
      CHECK(neg.tail(neg.size() - 1).norm() <= neg[0] + tol);
      break;
    }
    case ConeType::NonNeg:
      CHECK((-residual).minCoeff() >= -tol);
      break;
    case ConeType::Psd: {
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(unsvec(VectorXd(-residual), block.psd_order));
      CHECK(eig.eigenvalues().minCoeff() >= -tol);
      break;
    }
    case ConeType::Zero:
      break;  // residual is free
  }
  CHECK(std::abs(p.dot(residual)) <= tol * (1.0 + v.squaredNorm()));
}

}  // namespace

TEST_CASE("cone projections satisfy the optimality conditions") {
  Rng rng(7);
  const double tol = 1e-7;

  SUBCASE("second-order cone") {
    const ConeBlock block{ConeType::Soc, 5, 0};
    for (int trial = 0; trial < 200; ++trial) {
      VectorXd v(5);
      for (int i = 0; i < 5; ++i) v[i] = 4.0 * rng.normal();
      VectorXd p = v;
      project_soc(p.data(), 5);
      check_projection(block, v, p, tol);
    }
  }

  SUBCASE("exponential cone") {
    const ConeBlock block{ConeType::Exp, 3, 0};
    for (int trial = 0; trial < 2000; ++trial) {
      Vector3d v;
      const double scale = trial % 3 == 0 ? 100.0 : 2.0;
      for (int i = 0; i < 3; ++i) v[i] = scale * rng.normal();
      const Vector3d p = project_exp_cone(v);
      check_projection(block, VectorXd(v), VectorXd(p), 1e-6 * std::max(1.0, v.norm()));
    }
  }

  SUBCASE("exponential cone members are fixed points") {
    for (int trial = 0; trial < 200; ++trial) {
      const double y = std::exp(2.0 * rng.normal());
      const double x = 2.0 * rng.normal();
      const double z = y * std::exp(x / y) + std::abs(rng.normal());
      const Vector3d v(x, y, z);
      CHECK((project_exp_cone(v) - v).norm() <= 1e-12 * v.norm());
    }
  }

  SUBCASE("PSD cone") {
    const int order = 6;
    const ConeBlock block{ConeType::Psd, svec_dim(order), order};
    for (int trial = 0; trial < 50; ++trial) {
      MatrixXd m(order, order);
      for (int i = 0; i < order; ++i) {
        for (int j = 0; j < order; ++j) m(i, j) = rng.normal();
      }
      m = MatrixXd((m + m.transpose()) / 2.0);
      const VectorXd v = svec(m);
      VectorXd p = v;
      project_psd_svec(p.data(), order);
      check_projection(block, v, p, 1e-8);
    }
  }
}

TEST_CASE("dual exponential cone projection via Moreau") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    Vector3d v;
    for (int i = 0; i < 3; ++i) v[i] = 3.0 * rng.normal();
    const Vector3d p = project_exp_dual_cone(v);
    const double tol = 1e-6 * std::max(1.0, v.norm());
    CHECK(in_exp_dual_cone(p, tol));
    // Moreau decomposition: v = p - Pi_polar... equivalently v - p in -K.
    const Vector3d q = v - p;
    CHECK(in_exp_cone(-q, tol));
    CHECK(std::abs(p.dot(q)) <= tol * (1.0 + v.squaredNorm()));
  }
}

TEST_CASE("one-variable LP") {
  ConicProgram prog(1);
  prog.begin_block(ConeType::NonNeg);
  prog.add_row(LinExpr::of_var(0, 1.0).add_constant(-3.0));  // x - 3 >= 0
  VectorXd c(1);
  c << 1.0;
  prog.set_objective(c);
  prog.finalize();
  const ConicSolution sol = solve(prog, 1e-8);
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("second-order cone norm epigraph") {
  // minimize t s.t. (t, 3, 4) in SOC -> t = 5.
  ConicProgram prog(1);
  prog.begin_block(ConeType::Soc);
  prog.add_row(LinExpr::of_var(0, 1.0));
  prog.add_row(LinExpr::of_constant(3.0));
  prog.add_row(LinExpr::of_constant(4.0));
  VectorXd c(1);
  c << 1.0;
  prog.set_objective(c);
  prog.finalize();
  const ConicSolution sol = solve(prog, 1e-8);
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("PSD block with unit diagonal bounds the off-diagonal") {
  // Variables a, b, c with [[a, b], [b, c]] PSD, a = c = 1; maximize b -> 1.
  ConicProgram prog(3);
  prog.begin_block(ConeType::Zero);
  prog.add_row(LinExpr::of_var(0, 1.0).add_constant(-1.0));
  prog.add_row(LinExpr::of_var(2, 1.0).add_constant(-1.0));
  prog.begin_block(ConeType::Psd, 2);
  prog.add_row(LinExpr::of_var(0, 1.0));
  prog.add_row(LinExpr::of_var(1, M_SQRT2));
  prog.add_row(LinExpr::of_var(2, 1.0));
  VectorXd c = VectorXd::Zero(3);
  c[1] = 1.0;
  prog.set_objective(c, 0.0, /*maximize=*/true);
  prog.finalize();
  const ConicSolution sol = solve(prog, 1e-8);
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[1] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("rate-log constraint caps the rate at B log2(1+t)") {
  auto max_rate_for = [](double t_fixed, double bandwidth) {
    ConicProgram prog(2);  // vars: rate, t
    prog.begin_block(ConeType::Zero);
    prog.add_row(LinExpr::of_var(1, 1.0).add_constant(-t_fixed));
    rate_log_constraint(prog, 0, 1, bandwidth);
    VectorXd c = VectorXd::Zero(2);
    c[0] = 1.0;
    prog.set_objective(c, 0.0, /*maximize=*/true);
    prog.finalize();
    const ConicSolution sol = solve(prog, 1e-9);
    REQUIRE(sol.status == SolveStatus::Optimal);
    return sol.objective;
  };
  CHECK(max_rate_for(1.0, 10e6) == doctest::Approx(10e6).epsilon(1e-6));
  CHECK(max_rate_for(3.0, 1.0) == doctest::Approx(2.0).epsilon(1e-6));

  // R = 0 is feasible for any t >= 0.
  ConicProgram prog(2);
  prog.begin_block(ConeType::NonNeg);
  prog.add_row(LinExpr::of_var(1, 1.0));
  rate_log_constraint(prog, 0, 1, 1e6);
  prog.begin_block(ConeType::Zero);
  prog.add_row(LinExpr::of_var(0, 1.0));  // rate pinned to zero
  VectorXd c = VectorXd::Zero(2);
  c[1] = 1.0;
  prog.set_objective(c);
  prog.finalize();
  const ConicSolution sol = solve(prog, 1e-8);
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("quadratic epigraph matches the squared magnitude") {
  // minimize p s.t. |z|^2 <= p with z fixed by zero-cone rows.
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const double re = rng.normal(), im = rng.normal();
    ConicProgram prog(3);  // z_re, z_im, p
    prog.begin_block(ConeType::Zero);
    prog.add_row(LinExpr::of_var(0, 1.0).add_constant(-re));
    prog.add_row(LinExpr::of_var(1, 1.0).add_constant(-im));
    prog.begin_block(ConeType::Soc);
    prog.add_row(LinExpr::of_var(2, 0.5).add_constant(0.5));
    prog.add_row(LinExpr::of_var(0, 1.0));
    prog.add_row(LinExpr::of_var(1, 1.0));
    prog.add_row(LinExpr::of_var(2, 0.5).add_constant(-0.5));
    VectorXd c = VectorXd::Zero(3);
    c[2] = 1.0;
    prog.set_objective(c);
    prog.finalize();
    const ConicSolution sol = solve(prog, 1e-9);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(re * re + im * im).epsilon(1e-6));
  }
}

TEST_CASE("infeasible program is detected") {
  // x >= 1 and x <= -1.
  ConicProgram prog(1);
  prog.begin_block(ConeType::NonNeg);
  prog.add_row(LinExpr::of_var(0, 1.0).add_constant(-1.0));
  prog.add_row(LinExpr::of_var(0, -1.0).add_constant(-1.0));
  VectorXd c(1);
  c << 1.0;
  prog.set_objective(c);
  prog.finalize();
  const ConicSolution sol = solve(prog, 1e-8);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("row permutation leaves the optimum unchanged") {
  auto build = [](bool swap_rows) {
    ConicProgram prog(2);
    prog.begin_block(ConeType::NonNeg);
    if (swap_rows) {
      prog.add_row(LinExpr::of_var(1, 1.0).add_constant(-1.0));
      prog.add_row(LinExpr::of_var(0, 1.0).add_constant(-2.0));
    } else {
      prog.add_row(LinExpr::of_var(0, 1.0).add_constant(-2.0));
      prog.add_row(LinExpr::of_var(1, 1.0).add_constant(-1.0));
    }
    VectorXd c(2);
    c << 1.0, 3.0;
    prog.set_objective(c);
    prog.finalize();
    return solve(prog, 1e-9);
  };
  const ConicSolution a = build(false);
  const ConicSolution b = build(true);
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(b.status == SolveStatus::Optimal);
  CHECK(std::abs(a.objective - b.objective) <= 1e-7);
}

TEST_CASE("deterministic: identical inputs give identical solutions") {
  auto run = [] {
    ConicProgram prog(3);
    prog.begin_block(ConeType::NonNeg);
    prog.add_row(LinExpr::of_var(0, 1.0).add(1, 1.0).add_constant(-1.0));
    prog.add_row(LinExpr::of_var(1, 1.0).add(2, 2.0).add_constant(-3.0));
    prog.begin_block(ConeType::Soc);
    prog.add_row(LinExpr::of_var(2, 1.0).add_constant(1.0));
    prog.add_row(LinExpr::of_var(0, 1.0));
    prog.add_row(LinExpr::of_var(1, 1.0));
    VectorXd c(3);
    c << 1.0, 2.0, 0.5;
    prog.set_objective(c);
    prog.finalize();
    return solve(prog, 1e-9);
  };
  const ConicSolution a = run();
  const ConicSolution b = run();
  CHECK(a.x == b.x);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("warm start from the solution converges immediately") {
  ConicProgram prog(2);
  prog.begin_block(ConeType::NonNeg);
  prog.add_row(LinExpr::of_var(0, 1.0).add_constant(-2.0));
  prog.add_row(LinExpr::of_var(1, 1.0).add_constant(-1.0));
  VectorXd c(2);
  c << 1.0, 1.0;
  prog.set_objective(c);
  prog.finalize();
  const ConicSolution cold = solve(prog, 1e-9);
  REQUIRE(cold.status == SolveStatus::Optimal);
  SolverSettings settings;
  settings.tol = 1e-9;
  const ConicSolution warm = solve(prog, settings, WarmStart{cold.x, cold.y, cold.s});
  CHECK(warm.status == SolveStatus::Optimal);
  CHECK(warm.iterations <= cold.iterations);
}
