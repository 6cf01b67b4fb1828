#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "riscr/conic.hpp"
#include "riscr/numerics.hpp"
#include "riscr/system_model.hpp"

namespace riscr {

/// Data of the homogenized fixed-W phase feasibility problem. Index pair
/// (k, i) couples SU channel k with beam i; (l, k) couples PU l with beam k.
/// The lifted vector convention is theta_tilde = (conj(theta); t): with the
/// R/Q blocks below, theta_tilde^H R(k,i) theta_tilde + |b(k,i)|^2 equals the
/// received power |h_k^H w_i|^2 whenever |t| = 1.
struct HomogenizedData {
  int m = 0, k = 0, l = 0;
  std::vector<CVector> a;    // k*k entries, a[ki(k,i)], length m
  CMatrix b;                 // k x k
  std::vector<CVector> d;    // l*k entries, length m
  CMatrix c;                 // l x k
  std::vector<CMatrix> r;    // k*k Hermitian blocks, (m+1) x (m+1)
  std::vector<CMatrix> q;    // l*k Hermitian blocks
  double sigma2 = 1.0;
  RVector gamma;  // k
  RVector kappa;  // l

  int ki(int su, int beam) const { return su * k + beam; }
  int lk(int pu, int beam) const { return pu * k + beam; }

  /// |theta^T a + b|-style received amplitude for SU su under beam i at the
  /// given reflection coefficients.
  Complex su_amplitude(const PhaseVector& theta, int su, int beam) const;
  Complex pu_amplitude(const PhaseVector& theta, int pu, int beam) const;

  /// Feasibility of problem constraints at a candidate phase vector, with a
  /// small relative slack.
  bool feasible_at(const PhaseVector& theta, double tol = 1e-9) const;
};

/// Builds a(k,i) = diag(h_{r,k}^H) G w_i, b(k,i) = h_{d,k}^H w_i and the
/// corresponding R/Q lifting blocks R = [[a a^H, a conj(b)], [b a^H, 0]].
HomogenizedData homogenize(const ChannelSet& ch, const QosSpec& qos, const BeamformerSet& w);

/// Lifted feasibility SDP over Theta_tilde: SINR and interference constraints
/// become linear, the diagonal is pinned to one, PSD is kept, and the
/// rank-one constraint is intentionally dropped. Optional linear objective.
SdpProblem build_feasibility_sdp(const HomogenizedData& dat, const CMatrix* objective = nullptr);

/// (M+1) x (M+1) Hermitian PSD matrix with unit diagonal.
struct LiftedSolution {
  CMatrix theta_tilde;
};

struct DcParams {
  int max_iters = 50;
  double rank_tol = 1e-6;  // absolute threshold on Tr - ||.||_2
  double solver_tol = 1e-8;
};

struct DcReport {
  int iterations = 0;  // number of SDP solves, including the initial one
  std::vector<double> residual_trace;
  bool converged = false;
  double final_residual = 0.0;
};

/// The lifted phase subproblem has no solution for this W.
struct PhaseInfeasibleError : std::runtime_error {
  PhaseInfeasibleError() : std::runtime_error("phase feasibility SDP is infeasible") {}
};

/// A convex subproblem solve broke down (not an infeasibility certificate).
struct ConicSolveError : std::runtime_error {
  explicit ConicSolveError(const std::string& what) : std::runtime_error(what) {}
};

/// Difference-of-convex rank-one descent: starting from the plain feasibility
/// solve, iterates Theta minimizing Tr(Theta) - <Theta, phi1 phi1^H(prev)>
/// over the lifted feasible set until the rank-one residual drops below
/// rank_tol or max_iters is reached. The residual trace is nonincreasing.
std::pair<LiftedSolution, DcReport> dc_solve(const HomogenizedData& dat, const DcParams& params);

struct SdrParams {
  int n_randomizations = 1000;
  double rank_tol = 1e-6;
  double solver_tol = 1e-8;
};

struct SdrDiagnostics {
  bool direct_extraction = false;
  int success_index = -1;  // 1-based index of the accepted draw, -1 if none
  int candidates_tried = 0;
  double relaxed_residual = 0.0;
};

/// Semidefinite relaxation baseline: solve the lifted SDP, then extract
/// directly if it is already rank one, otherwise draw Gaussian candidates
/// with covariance Theta* and keep the first feasible one.
std::pair<std::optional<PhaseVector>, SdrDiagnostics> sdr_solve(const HomogenizedData& dat,
                                                                const SdrParams& params, Rng& rng);

/// Recovers the reflection coefficients from a near-rank-one lifted solution:
/// factor, divide by the homogenization component, project to unit modulus.
/// Requires rank_one_residual <= rank_tol * (M+1).
PhaseVector extract_phase(const LiftedSolution& sol, double rank_tol);

}  // namespace riscr
