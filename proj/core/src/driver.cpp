#include "riscr/driver.hpp"

#include <cmath>

namespace riscr {

const char* to_string(DriverStatus status) {
  switch (status) {
    case DriverStatus::Converged: return "converged";
    case DriverStatus::MaxIterations: return "max_iterations";
    case DriverStatus::InfeasibleAtStart: return "infeasible_at_start";
    case DriverStatus::PhaseStalled: return "phase_stalled";
  }
  return "?";
}

namespace {

// Phase update for the current W; empty optional means the step stalled.
std::optional<PhaseVector> phase_step(const ChannelSet& ch, const QosSpec& qos,
                                      const BeamformerSet& w, const AlternatingParams& params,
                                      Rng& rng, SolveReport& report) {
  const HomogenizedData dat = homogenize(ch, qos, w);
  try {
    if (params.phase_method == PhaseMethod::Dc) {
      auto [lifted, dc_report] = dc_solve(dat, params.dc);
      report.dc_reports.push_back(dc_report);
      report.final_rank_residual = dc_report.final_residual;
      if (dc_report.converged) {
        return extract_phase(lifted, params.dc.rank_tol);
      }
      // Non-convergent DC: randomize from the final iterate before giving up.
      const HermitianMatrix hm(lifted.theta_tilde, 1e-6);
      const EigenDecomposition ed = hermitian_eig(hm);
      const int n = dat.m + 1;
      CMatrix factor = ed.eigenvectors;
      for (int i = 0; i < n; ++i) {
        factor.col(i) *= std::sqrt(std::max(ed.eigenvalues[i], 0.0));
      }
      for (int draw = 0; draw < params.sdr.n_randomizations; ++draw) {
        CVector g(n);
        for (int i = 0; i < n; ++i) g[i] = rng.cnormal();
        const CVector xi = factor * g;
        if (std::abs(xi[n - 1]) < 1e-12) continue;
        PhaseVector cand;
        cand.theta.resize(dat.m);
        for (int j = 0; j < dat.m; ++j) {
          const Complex ratio = xi[j] / xi[n - 1];
          const double mod = std::abs(ratio);
          cand.theta[j] = mod > 0.0 ? std::conj(ratio) / mod : Complex(1.0, 0.0);
        }
        if (dat.feasible_at(cand)) return cand;
      }
      return std::nullopt;
    }
    auto [theta, diag] = sdr_solve(dat, params.sdr, rng);
    report.final_rank_residual = diag.relaxed_residual;
    return theta;
  } catch (const PhaseInfeasibleError&) {
    // Cannot happen after a feasible beamforming step in exact arithmetic;
    // treated as a numerical stall.
    return std::nullopt;
  } catch (const ConicSolveError&) {
    return std::nullopt;
  } catch (const NotRankOneError&) {
    return std::nullopt;
  }
}

}  // namespace

SolveReport alternate(const ChannelSet& ch, const QosSpec& qos, const AlternatingParams& params) {
  if (params.epsilon <= 0.0 || params.max_outer < 1) {
    throw ValidationError("alternate: epsilon must be positive and max_outer >= 1");
  }
  const int m = static_cast<int>(ch.g.rows());
  Rng rng(derive_seed(params.init_seed, {0x616c74}));

  SolveReport report;
  PhaseVector theta = PhaseVector::Random(m, rng);
  double prev_power = 0.0;

  for (int outer = 1; outer <= params.max_outer; ++outer) {
    const CMatrix h = effective_su_channels(ch, theta);
    const CMatrix u = effective_pu_channels(ch, theta);
    const BeamformingSolution bf = solve_beamforming(h, u, qos, params.solver_tol);

    if (bf.status.code != SolveStatusCode::Optimal) {
      if (outer == 1) {
        report.status = DriverStatus::InfeasibleAtStart;
        report.outer_iterations = 0;
        return report;
      }
      // Keep the last certified (W, theta) pair.
      report.status = DriverStatus::PhaseStalled;
      report.outer_iterations = outer - 1;
      return report;
    }

    report.power_trajectory.push_back(bf.power);
    report.final_w = bf.w;
    report.final_theta = theta;

    if (outer > 1 && prev_power - bf.power <= params.epsilon * prev_power) {
      report.status = DriverStatus::Converged;
      report.outer_iterations = outer - 1;
      return report;
    }
    prev_power = bf.power;

    if (m == 0) {
      // No reflecting elements: the phase step is vacuous.
      report.status = DriverStatus::Converged;
      report.outer_iterations = 1;
      return report;
    }
    if (outer == params.max_outer) break;

    const std::optional<PhaseVector> next = phase_step(ch, qos, bf.w, params, rng, report);
    if (!next) {
      report.status = DriverStatus::PhaseStalled;
      report.outer_iterations = outer;
      return report;
    }
    theta = *next;
    report.final_theta = theta;
    if (params.record_iterates) {
      IterateRecord rec;
      rec.w = bf.w;
      rec.theta = theta;
      if (!report.dc_reports.empty()) {
        rec.dc_converged = report.dc_reports.back().converged;
        rec.dc_residual = report.dc_reports.back().final_residual;
      }
      report.iterates.push_back(std::move(rec));
    }
  }

  report.status = DriverStatus::MaxIterations;
  report.outer_iterations = params.max_outer;
  return report;
}

SolveReport no_ris_baseline(const ChannelSet& ch, const QosSpec& qos, double solver_tol) {
  SolveReport report;
  const BeamformingSolution bf = solve_beamforming(ch.h_d, ch.u_d, qos, solver_tol);
  report.final_theta = PhaseVector::Ones(static_cast<int>(ch.g.rows()));
  if (bf.status.code != SolveStatusCode::Optimal) {
    report.status = DriverStatus::InfeasibleAtStart;
    return report;
  }
  report.power_trajectory.push_back(bf.power);
  report.final_w = bf.w;
  report.outer_iterations = 1;
  report.status = DriverStatus::Converged;
  return report;
}

}  // namespace riscr
