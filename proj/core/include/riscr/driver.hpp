#pragma once

#include <vector>

#include "riscr/beamforming.hpp"
#include "riscr/phase_opt.hpp"
#include "riscr/system_model.hpp"

namespace riscr {

enum class PhaseMethod { Dc, Sdr };

struct AlternatingParams {
  double epsilon = 1e-4;  // stop when the relative power decrease falls below this
  int max_outer = 30;
  PhaseMethod phase_method = PhaseMethod::Dc;
  DcParams dc;
  SdrParams sdr;
  std::uint64_t init_seed = 0;
  double solver_tol = 1e-8;
  bool record_iterates = false;
};

enum class DriverStatus { Converged, MaxIterations, InfeasibleAtStart, PhaseStalled };

const char* to_string(DriverStatus status);

/// Snapshot of one completed outer iteration (kept when record_iterates set).
struct IterateRecord {
  BeamformerSet w;
  PhaseVector theta;        // phase chosen for this W
  bool dc_converged = false;
  double dc_residual = 0.0;
};

struct SolveReport {
  std::vector<double> power_trajectory;  // one entry per beamforming solve
  BeamformerSet final_w;
  PhaseVector final_theta;
  int outer_iterations = 0;  // completed (beamforming, phase) cycles
  DriverStatus status = DriverStatus::InfeasibleAtStart;
  std::vector<DcReport> dc_reports;
  double final_rank_residual = 0.0;
  std::vector<IterateRecord> iterates;
};

/// Alternating minimization: random initial phases, then beamforming solves
/// interleaved with phase-feasibility solves until the power decrease drops
/// below epsilon, the phase step stalls, or max_outer is reached. The returned
/// (W, theta) pair is feasible whenever status != InfeasibleAtStart.
SolveReport alternate(const ChannelSet& ch, const QosSpec& qos, const AlternatingParams& params);

/// Reference point without the RIS: beamforming over the direct channels only.
SolveReport no_ris_baseline(const ChannelSet& ch, const QosSpec& qos, double solver_tol = 1e-8);

}  // namespace riscr
