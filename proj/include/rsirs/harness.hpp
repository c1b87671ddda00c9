#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rsirs/orchestrator.hpp"
#include "rsirs/scenario.hpp"

namespace rsirs {

inline const std::vector<std::string> kAllSchemes = {"rs_irs", "rs_noirs", "tin_irs", "tin_noirs"};

struct ExperimentConfig {
  SystemConfig system;                 // template; QoS and weights are filled per run
  std::vector<double> sweep_qos_bps;   // non-empty
  int drops = 20;
  std::vector<std::string> schemes = kAllSchemes;
  std::string output_path = "results.csv";
  std::uint64_t seed = 1;
  int threads = 0;           // 0: library default; 1 forces the serial path
  bool zero_walltime = false;  // write 0 instead of measured wall time

  void validate() const;
};

struct ResultRow {
  int drop_id = 0;
  std::string scheme;
  double qos_bps = 0.0;
  double weighted_power_dbm = 0.0;
  double unweighted_power_dbm = 0.0;
  int outer_iterations = 0;
  bool feasible = false;
  double wall_time_s = 0.0;
  std::uint64_t channel_hash = 0;
};

double watts_to_dbm(double watts);

std::string format_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);

/// Per-(scheme, qos) aggregates plus the pairwise savings of the comparison.
struct SummaryTable {
  struct Cell {
    std::string scheme;
    double qos_bps = 0.0;
    int n_total = 0;
    int n_feasible = 0;
    double mean_weighted_dbm = 0.0;  // over feasible rows
    double mean_dbm_per_mbps = 0.0;
  };
  struct Savings {
    double qos_bps = 0.0;
    // Paired means over drops feasible in both schemes of each difference.
    double irs_saving_tin_db = 0.0;  // tin_noirs - tin_irs
    double irs_saving_rs_db = 0.0;   // rs_noirs - rs_irs
    double rs_saving_noirs_db = 0.0; // tin_noirs - rs_noirs
    double rs_saving_irs_db = 0.0;   // tin_irs - rs_irs
    double combined_saving_db = 0.0; // tin_noirs - rs_irs
    double synergy_db = 0.0;         // combined - (irs-only + rs-only)
  };
  std::vector<Cell> cells;
  std::vector<Savings> savings;
  std::map<std::string, double> feasibility_rate;
  std::map<std::string, double> slope_dbm_per_mbps;  // least-squares over qos points

  const Cell* find_cell(const std::string& scheme, double qos_bps) const;
  std::string to_string() const;
};

SummaryTable summarize(const std::vector<ResultRow>& rows);

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  SummaryTable summary;
  std::string csv_path;
};

/// Runs drops x qos x schemes with paired channels per drop, writes the CSV,
/// and returns rows plus aggregates. Throws on an unwritable output path
/// before any solve starts.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Strict JSON config loader: unknown keys are errors.
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace rsirs
