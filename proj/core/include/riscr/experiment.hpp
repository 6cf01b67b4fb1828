#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "riscr/driver.hpp"

namespace riscr {

/// Monte Carlo sweep description; loadable from a JSON config file (schema in
/// the repository README) with CLI overrides applied on top.
struct ExperimentConfig {
  NetworkGeometry geometry;
  PathLossParams path_loss;
  double sigma2_db = -80.0;
  double kappa_db = -30.0;
  std::vector<double> gamma_db = {15.0};
  std::vector<int> m_values = {20};
  std::vector<std::string> methods = {"dc"};
  int trials = 20;
  std::uint64_t base_seed = 1;
  AlternatingParams algorithm;
  std::string output_path = "sweep.csv";

  void validate() const;
  /// The deployment of the reference simulation setup.
  static ExperimentConfig Defaults();
};

ExperimentConfig load_config(const std::string& path);

struct TrialRecord {
  int trial_index = 0;
  std::uint64_t seed = 0;
  int m = 0, k = 0, l = 0, n = 0;
  double gamma_db = 0.0;
  std::string method;
  std::string status;
  int outer_iterations = 0;
  double total_power_db = 0.0;  // NaN when no feasible solution was produced
  double final_rank_residual = 0.0;
  double wall_time_seconds = 0.0;
  std::uint64_t channel_hash = 0;
};

/// Runs the full sweep. Channels are sampled once per (trial, M) and shared
/// across methods and gamma values, so comparisons are paired; the per-trial
/// seed is derived from base_seed and the (trial, M) pair only. Solver
/// failures are recorded in the per-trial status, never aborting the sweep.
/// Records come back in canonical order (M, trial, gamma, method) regardless
/// of the number of worker threads.
std::vector<TrialRecord> run_sweep(const ExperimentConfig& cfg, int jobs = 1,
                                   std::ostream* progress = nullptr);

void write_csv(const std::vector<TrialRecord>& records, const std::string& path);
std::vector<TrialRecord> read_csv(const std::string& path);

struct SummaryRow {
  double gamma_db = 0.0;
  int m = 0;
  std::string method;
  int n_trials = 0;
  int n_feasible = 0;   // status converged or max_iterations
  double mean_power_db = 0.0;  // over feasible trials, NaN if none
  double stderr_power_db = 0.0;
};

/// Per-sweep-point aggregation; infeasible trials are excluded from the mean
/// and counted in the feasibility rate.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

std::string format_summary(const std::vector<SummaryRow>& rows);

}  // namespace riscr
