// Compares the serial reference kernels against their OpenMP counterparts:
// CSR matvec, blockwise cone projection, one full conic solve, and a small
// Monte Carlo batch. Results are checked for equality before timing.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "rsirs/cones.hpp"
#include "rsirs/harness.hpp"
#include "rsirs/orchestrator.hpp"
#include "rsirs/solver.hpp"

using rsirs::par::Exec;

namespace {

double time_of(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(end - start).count() / reps;
}

void report(const char* name, double serial_s, double omp_s) {
  std::printf("%-28s serial %10.6f s   openmp %10.6f s   speedup %5.2fx\n", name, serial_s, omp_s,
              serial_s / omp_s);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", rsirs::par::max_threads());

  // CSR matvec on a banded matrix.
  {
    const int n = 4000;
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < n; ++i) {
      for (int j = std::max(0, i - 16); j < std::min(n, i + 16); ++j) {
        trips.emplace_back(i, j, 1.0 / (1 + std::abs(i - j)));
      }
    }
    const auto a = rsirs::conic::CsrMatrix::from_triplets(n, n, trips);
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
    Eigen::VectorXd y_serial(n), y_omp(n);
    rsirs::conic::csr_matvec(a, x, y_serial, Exec::Serial);
    rsirs::conic::csr_matvec(a, x, y_omp, Exec::OpenMP);
    if (y_serial != y_omp) {
      std::printf("matvec mismatch!\n");
      return 1;
    }
    report("csr_matvec",
           time_of([&] { rsirs::conic::csr_matvec(a, x, y_serial, Exec::Serial); }, 200),
           time_of([&] { rsirs::conic::csr_matvec(a, x, y_omp, Exec::OpenMP); }, 200));
  }

  // Blockwise cone projection: many small cones plus PSD blocks.
  {
    std::vector<rsirs::conic::ConeBlock> blocks;
    for (int i = 0; i < 64; ++i) {
      blocks.push_back({rsirs::conic::ConeType::Soc, 20, 0});
      blocks.push_back({rsirs::conic::ConeType::Exp, 3, 0});
      blocks.push_back({rsirs::conic::ConeType::Psd, rsirs::conic::svec_dim(16), 16});
    }
    const auto layout = rsirs::conic::ConeLayout::from_blocks(blocks);
    rsirs::Rng rng(7);
    Eigen::VectorXd z(layout.dim);
    for (int i = 0; i < layout.dim; ++i) z[i] = rng.normal();
    Eigen::VectorXd z_serial = z, z_omp = z;
    rsirs::conic::project_onto_cones(z_serial, layout, true, Exec::Serial);
    rsirs::conic::project_onto_cones(z_omp, layout, true, Exec::OpenMP);
    if (z_serial != z_omp) {
      std::printf("projection mismatch!\n");
      return 1;
    }
    report("cone_projection",
           time_of([&] {
             Eigen::VectorXd w = z;
             rsirs::conic::project_onto_cones(w, layout, true, Exec::Serial);
           }, 50),
           time_of([&] {
             Eigen::VectorXd w = z;
             rsirs::conic::project_onto_cones(w, layout, true, Exec::OpenMP);
           }, 50));
  }

  // A small Monte Carlo batch through the full pipeline.
  {
    rsirs::ExperimentConfig config;
    config.system.n_bs = 2;
    config.system.antennas_per_bs = 2;
    config.system.n_users = 3;
    config.system.n_reflect = 4;
    config.system.max_outer_iters = 3;
    config.drops = 4;
    config.schemes = {"rs_irs"};
    config.sweep_qos_bps = {4e6};
    config.seed = 11;
    config.zero_walltime = true;

    config.output_path = "/tmp/bench_serial.csv";
    config.threads = 1;
    const double serial_s = time_of([&] { rsirs::run_experiment(config); }, 1);
    config.output_path = "/tmp/bench_omp.csv";
    config.threads = 0;
    const double omp_s = time_of([&] { rsirs::run_experiment(config); }, 1);
    report("monte_carlo_batch", serial_s, omp_s);
  }

  return 0;
}
