#include "riscr/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace riscr {

using nlohmann::json;

void ExperimentConfig::validate() const {
  geometry.validate();
  path_loss.validate();
  if (trials < 1) throw ValidationError("ExperimentConfig: trials must be >= 1");
  if (gamma_db.empty() || m_values.empty() || methods.empty()) {
    throw ValidationError("ExperimentConfig: sweep lists must be nonempty");
  }
  for (const auto& m : methods) {
    if (m != "dc" && m != "sdr" && m != "no_ris") {
      throw ValidationError("ExperimentConfig: unknown method '" + m + "'");
    }
  }
  for (int m : m_values) {
    if (m < 0) throw ValidationError("ExperimentConfig: m_values must be nonnegative");
  }
}

ExperimentConfig ExperimentConfig::Defaults() {
  ExperimentConfig cfg;
  cfg.geometry.tx_position = {0, 0, 10};
  cfg.geometry.ris_position = {50, 50, 15};
  cfg.geometry.su_region = {{-50, 60, 0}, {50, 160, 0}};
  cfg.geometry.pu_region = {{-170, -40, 0}, {-120, 10, 0}};
  cfg.geometry.n_antennas = 5;
  cfg.geometry.n_sus = 4;
  cfg.geometry.n_pus = 2;
  cfg.geometry.n_ris_elements = 20;
  cfg.path_loss.t0_db = -30.0;
  cfg.path_loss.d0 = 1.0;
  cfg.path_loss.exponents = {3.5, 3.5, 2.0, 2.2, 2.2};
  return cfg;
}

namespace {

Vec3 parse_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("config: expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Box3 parse_box(const json& j) {
  Box3 b{parse_vec3(j.at("min")), parse_vec3(j.at("max"))};
  // Accept corners in either order per axis.
  if (b.min.x > b.max.x) std::swap(b.min.x, b.max.x);
  if (b.min.y > b.max.y) std::swap(b.min.y, b.max.y);
  if (b.min.z > b.max.z) std::swap(b.min.z, b.max.z);
  return b;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;

  ExperimentConfig cfg = ExperimentConfig::Defaults();
  if (j.contains("geometry")) {
    const json& g = j["geometry"];
    if (g.contains("tx_position")) cfg.geometry.tx_position = parse_vec3(g["tx_position"]);
    if (g.contains("ris_position")) cfg.geometry.ris_position = parse_vec3(g["ris_position"]);
    if (g.contains("su_region")) cfg.geometry.su_region = parse_box(g["su_region"]);
    if (g.contains("pu_region")) cfg.geometry.pu_region = parse_box(g["pu_region"]);
    if (g.contains("n_antennas")) cfg.geometry.n_antennas = g["n_antennas"].get<int>();
    if (g.contains("n_sus")) cfg.geometry.n_sus = g["n_sus"].get<int>();
    if (g.contains("n_pus")) cfg.geometry.n_pus = g["n_pus"].get<int>();
  }
  if (j.contains("path_loss")) {
    const json& p = j["path_loss"];
    if (p.contains("t0_db")) cfg.path_loss.t0_db = p["t0_db"].get<double>();
    if (p.contains("d0")) cfg.path_loss.d0 = p["d0"].get<double>();
    if (p.contains("exponents")) {
      const json& e = p["exponents"];
      auto set = [&](const char* key, LinkClass c) {
        if (e.contains(key)) cfg.path_loss.exponents[static_cast<int>(c)] = e[key].get<double>();
      };
      set("tx_su", LinkClass::TxSu);
      set("tx_pu", LinkClass::TxPu);
      set("tx_ris", LinkClass::TxRis);
      set("ris_su", LinkClass::RisSu);
      set("ris_pu", LinkClass::RisPu);
    }
  }
  if (j.contains("sigma2_db")) cfg.sigma2_db = j["sigma2_db"].get<double>();
  if (j.contains("kappa_db")) cfg.kappa_db = j["kappa_db"].get<double>();
  if (j.contains("gamma_db")) cfg.gamma_db = j["gamma_db"].get<std::vector<double>>();
  if (j.contains("m_values")) cfg.m_values = j["m_values"].get<std::vector<int>>();
  if (j.contains("methods")) cfg.methods = j["methods"].get<std::vector<std::string>>();
  if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
  if (j.contains("base_seed")) cfg.base_seed = j["base_seed"].get<std::uint64_t>();
  if (j.contains("output_path")) cfg.output_path = j["output_path"].get<std::string>();
  if (j.contains("algorithm")) {
    const json& a = j["algorithm"];
    if (a.contains("epsilon")) cfg.algorithm.epsilon = a["epsilon"].get<double>();
    if (a.contains("max_outer")) cfg.algorithm.max_outer = a["max_outer"].get<int>();
    if (a.contains("solver_tol")) cfg.algorithm.solver_tol = a["solver_tol"].get<double>();
    if (a.contains("dc_max_iters")) cfg.algorithm.dc.max_iters = a["dc_max_iters"].get<int>();
    if (a.contains("dc_rank_tol")) cfg.algorithm.dc.rank_tol = a["dc_rank_tol"].get<double>();
    if (a.contains("sdr_randomizations")) {
      cfg.algorithm.sdr.n_randomizations = a["sdr_randomizations"].get<int>();
    }
  }
  cfg.algorithm.dc.solver_tol = cfg.algorithm.solver_tol;
  cfg.algorithm.sdr.solver_tol = cfg.algorithm.solver_tol;
  cfg.validate();
  return cfg;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

TrialRecord run_one(const ExperimentConfig& cfg, const ChannelSet& ch, std::uint64_t seed,
                    int trial, int m, double gamma_db, const std::string& method) {
  TrialRecord rec;
  rec.trial_index = trial;
  rec.seed = seed;
  rec.m = m;
  rec.k = cfg.geometry.n_sus;
  rec.l = cfg.geometry.n_pus;
  rec.n = cfg.geometry.n_antennas;
  rec.gamma_db = gamma_db;
  rec.method = method;
  rec.channel_hash = channel_hash(ch);

  const QosSpec qos = QosSpec::Uniform(cfg.geometry.n_sus, cfg.geometry.n_pus, gamma_db,
                                       cfg.kappa_db, cfg.sigma2_db);
  AlternatingParams params = cfg.algorithm;
  // The phase initialization is shared across methods for paired comparisons.
  params.init_seed = derive_seed(seed, {0x696e6974});
  params.phase_method = method == "sdr" ? PhaseMethod::Sdr : PhaseMethod::Dc;

  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  try {
    if (method == "no_ris") {
      report = no_ris_baseline(ch, qos, params.solver_tol);
    } else {
      report = alternate(ch, qos, params);
    }
    rec.status = to_string(report.status);
    rec.outer_iterations = report.outer_iterations;
    rec.final_rank_residual = report.final_rank_residual;
    if (report.status == DriverStatus::InfeasibleAtStart || report.power_trajectory.empty()) {
      rec.total_power_db = std::nan("");
    } else {
      rec.total_power_db = linear_to_db(report.power_trajectory.back());
    }
  } catch (const std::exception& e) {
    rec.status = std::string("error:") + e.what();
    // Keep the CSV single-line and comma-free.
    for (char& c : rec.status) {
      if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    rec.total_power_db = std::nan("");
  }
  rec.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace

std::vector<TrialRecord> run_sweep(const ExperimentConfig& cfg, int jobs,
                                   std::ostream* progress) {
  cfg.validate();
  const int n_gamma = static_cast<int>(cfg.gamma_db.size());
  const int n_methods = static_cast<int>(cfg.methods.size());
  const int per_channel = n_gamma * n_methods;

  struct Task {
    int m_idx, trial;
  };
  std::vector<Task> tasks;
  for (int mi = 0; mi < static_cast<int>(cfg.m_values.size()); ++mi) {
    for (int t = 0; t < cfg.trials; ++t) tasks.push_back({mi, t});
  }

  std::vector<TrialRecord> records(tasks.size() * static_cast<std::size_t>(per_channel));
  std::atomic<std::size_t> next{0};
  std::atomic<int> done{0};
  std::mutex io_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t ti = next.fetch_add(1);
      if (ti >= tasks.size()) return;
      const Task task = tasks[ti];
      const int m = cfg.m_values[task.m_idx];

      NetworkGeometry geom = cfg.geometry;
      geom.n_ris_elements = m;
      const std::uint64_t seed =
          derive_seed(cfg.base_seed, {static_cast<std::uint64_t>(task.trial),
                                      static_cast<std::uint64_t>(m)});
      Rng rng(seed);
      const ChannelSet ch = generate_channels(geom, cfg.path_loss, rng);

      std::size_t slot = ti * static_cast<std::size_t>(per_channel);
      for (int gi = 0; gi < n_gamma; ++gi) {
        for (int me = 0; me < n_methods; ++me) {
          records[slot++] = run_one(cfg, ch, seed, task.trial, m, cfg.gamma_db[gi],
                                    cfg.methods[me]);
        }
      }
      const int d = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(io_mutex);
        *progress << "\r" << d << "/" << tasks.size() << " channel draws" << std::flush;
      }
    }
  };

  jobs = std::max(1, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (progress) *progress << "\n";
  return records;
}

namespace {
const char* kCsvHeader =
    "trial_index,seed,M,K,L,N,gamma_db,method,status,outer_iterations,total_power_db,"
    "final_rank_residual,wall_time_seconds,channel_hash";
}

void write_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << kCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.trial_index << "," << r.seed << "," << r.m << "," << r.k << "," << r.l << ","
        << r.n << "," << format_double(r.gamma_db) << "," << r.method << "," << r.status << ","
        << r.outer_iterations << "," << format_double(r.total_power_db) << ","
        << format_double(r.final_rank_residual) << "," << format_double(r.wall_time_seconds)
        << "," << r.channel_hash << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<TrialRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
  if (line != kCsvHeader) throw std::runtime_error("unexpected CSV header in " + path);
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 14) throw std::runtime_error("malformed CSV row: " + line);
    TrialRecord r;
    r.trial_index = std::stoi(fields[0]);
    r.seed = std::stoull(fields[1]);
    r.m = std::stoi(fields[2]);
    r.k = std::stoi(fields[3]);
    r.l = std::stoi(fields[4]);
    r.n = std::stoi(fields[5]);
    r.gamma_db = std::stod(fields[6]);
    r.method = fields[7];
    r.status = fields[8];
    r.outer_iterations = std::stoi(fields[9]);
    r.total_power_db = std::stod(fields[10]);
    r.final_rank_residual = std::stod(fields[11]);
    r.wall_time_seconds = std::stod(fields[12]);
    r.channel_hash = std::stoull(fields[13]);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw ValidationError("summarize: no records");
  std::map<std::tuple<double, int, std::string>, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) {
    groups[{r.gamma_db, r.m, r.method}].push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, recs] : groups) {
    SummaryRow row;
    row.gamma_db = std::get<0>(key);
    row.m = std::get<1>(key);
    row.method = std::get<2>(key);
    row.n_trials = static_cast<int>(recs.size());
    double sum = 0.0, sumsq = 0.0;
    for (const auto* r : recs) {
      const bool usable = (r->status == "converged" || r->status == "max_iterations") &&
                          std::isfinite(r->total_power_db);
      if (!usable) continue;
      row.n_feasible += 1;
      sum += r->total_power_db;
      sumsq += r->total_power_db * r->total_power_db;
    }
    if (row.n_feasible > 0) {
      row.mean_power_db = sum / row.n_feasible;
      if (row.n_feasible > 1) {
        const double var =
            std::max(0.0, (sumsq - sum * sum / row.n_feasible) / (row.n_feasible - 1));
        row.stderr_power_db = std::sqrt(var / row.n_feasible);
      }
    } else {
      row.mean_power_db = std::nan("");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%10s %6s %8s %8s %10s %14s %14s\n", "gamma_db", "M", "method",
                "trials", "feasible", "mean_db", "stderr_db");
  os << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%10.2f %6d %8s %8d %10d %14.4f %14.4f\n", r.gamma_db, r.m,
                  r.method.c_str(), r.n_trials, r.n_feasible, r.mean_power_db,
                  r.stderr_power_db);
    os << buf;
  }
  return os.str();
}

}  // namespace riscr
