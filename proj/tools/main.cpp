// Command-line front end: `sweep` runs a config-driven Monte Carlo sweep and
// writes a CSV, `single` runs one trial with verbose diagnostics, `summarize`
// aggregates an existing CSV into per-sweep-point means.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "riscr/experiment.hpp"

namespace {

riscr::ExperimentConfig make_config(const std::string& config_path) {
  if (config_path.empty()) return riscr::ExperimentConfig::Defaults();
  return riscr::load_config(config_path);
}

void apply_overrides(riscr::ExperimentConfig& cfg, const std::optional<std::uint64_t>& seed,
                     const std::optional<int>& trials, const std::optional<std::string>& method,
                     const std::optional<std::string>& out) {
  if (seed) cfg.base_seed = *seed;
  if (trials) cfg.trials = *trials;
  if (method) cfg.methods = {*method};
  if (out) cfg.output_path = *out;
}

int run_single(const riscr::ExperimentConfig& cfg, double gamma_db, int m_value,
               const std::string& method) {
  using namespace riscr;
  NetworkGeometry geom = cfg.geometry;
  geom.n_ris_elements = m_value;
  const std::uint64_t seed = derive_seed(cfg.base_seed, {0, static_cast<std::uint64_t>(m_value)});
  Rng rng(seed);
  const ChannelSet ch = generate_channels(geom, cfg.path_loss, rng);
  const QosSpec qos =
      QosSpec::Uniform(geom.n_sus, geom.n_pus, gamma_db, cfg.kappa_db, cfg.sigma2_db);

  std::printf("single trial: K=%d L=%d N=%d M=%d gamma=%.1f dB method=%s seed=%llu\n",
              geom.n_sus, geom.n_pus, geom.n_antennas, m_value, gamma_db, method.c_str(),
              static_cast<unsigned long long>(seed));

  AlternatingParams params = cfg.algorithm;
  params.init_seed = derive_seed(seed, {0x696e6974});
  params.phase_method = method == "sdr" ? PhaseMethod::Sdr : PhaseMethod::Dc;

  SolveReport report;
  if (method == "no_ris") {
    report = no_ris_baseline(ch, qos, params.solver_tol);
  } else {
    report = alternate(ch, qos, params);
  }

  std::printf("status: %s, outer iterations: %d\n", to_string(report.status),
              report.outer_iterations);
  for (std::size_t i = 0; i < report.power_trajectory.size(); ++i) {
    std::printf("  iter %2zu: power %.6f dB\n", i + 1,
                riscr::linear_to_db(report.power_trajectory[i]));
  }
  for (std::size_t i = 0; i < report.dc_reports.size(); ++i) {
    const auto& dc = report.dc_reports[i];
    std::printf("  dc step %2zu: %d solves, final residual %.3e, %s\n", i + 1, dc.iterations,
                dc.final_residual, dc.converged ? "converged" : "not converged");
  }
  if (report.status != DriverStatus::InfeasibleAtStart && !report.power_trajectory.empty()) {
    const FeasibilityReport feas =
        check_feasibility(ch, report.final_theta, report.final_w, qos, 1e-5);
    std::printf("final power: %.6f dB, feasible: %s\n",
                riscr::linear_to_db(report.power_trajectory.back()),
                feas.feasible ? "yes" : "no");
    std::printf("min SINR margin: %.3e, min IP margin: %.3e\n",
                feas.sinr_margin.size() ? feas.sinr_margin.minCoeff() : 0.0,
                feas.ip_margin.size() ? feas.ip_margin.minCoeff() : 0.0);
    return 0;
  }
  std::printf("no feasible solution produced\n");
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-assisted cognitive radio downlink power minimization"};
  app.require_subcommand(1);

  std::string config_path, in_path;
  std::optional<std::string> out, method;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int jobs = 1;
  double gamma_db = 15.0;
  int m_value = 20;

  auto* sweep = app.add_subcommand("sweep", "run the configured Monte Carlo sweep");
  sweep->add_option("--config", config_path, "JSON config file")->required();
  sweep->add_option("--out", out, "output CSV path (overrides config)");
  sweep->add_option("--seed", seed, "base seed (overrides config)");
  sweep->add_option("--trials", trials, "trial count (overrides config)");
  sweep->add_option("--method", method, "restrict to one method: dc|sdr|no_ris");
  sweep->add_option("--jobs", jobs, "worker threads");

  auto* single = app.add_subcommand("single", "run one trial with verbose diagnostics");
  single->add_option("--config", config_path, "JSON config file (default: built-in setup)");
  single->add_option("--seed", seed, "base seed");
  single->add_option("--method", method, "dc|sdr|no_ris");
  single->add_option("--gamma-db", gamma_db, "SINR target in dB");
  single->add_option("--m", m_value, "number of RIS elements");

  auto* summ = app.add_subcommand("summarize", "aggregate an existing sweep CSV");
  summ->add_option("--in", in_path, "input CSV")->required();
  summ->add_option("--out", out, "also write the summary as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      riscr::ExperimentConfig cfg = riscr::load_config(config_path);
      apply_overrides(cfg, seed, trials, method, out);
      const auto records = riscr::run_sweep(cfg, jobs, &std::cerr);
      riscr::write_csv(records, cfg.output_path);
      std::cout << riscr::format_summary(riscr::summarize(records));
      std::cout << "wrote " << records.size() << " records to " << cfg.output_path << "\n";
    } else if (single->parsed()) {
      riscr::ExperimentConfig cfg = make_config(config_path);
      apply_overrides(cfg, seed, trials, method, out);
      return run_single(cfg, gamma_db, m_value, method.value_or("dc"));
    } else if (summ->parsed()) {
      const auto records = riscr::read_csv(in_path);
      const auto rows = riscr::summarize(records);
      std::cout << riscr::format_summary(rows);
      if (out) {
        std::ofstream f(*out);
        f << "gamma_db,M,method,trials,feasible,mean_power_db,stderr_power_db\n";
        for (const auto& r : rows) {
          f << r.gamma_db << "," << r.m << "," << r.method << "," << r.n_trials << ","
            << r.n_feasible << "," << r.mean_power_db << "," << r.stderr_power_db << "\n";
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
