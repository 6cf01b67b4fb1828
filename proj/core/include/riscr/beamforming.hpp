#pragma once

#include "riscr/conic.hpp"
#include "riscr/system_model.hpp"
#include "riscr/types.hpp"

namespace riscr {

struct BeamformingSolution {
  BeamformerSet w;
  double power = 0.0;
  SolveStatus status;
};

/// Transmit-power minimization for fixed effective channels, as an SOCP.
/// h holds the K effective SU rows (h_k^H), u the L effective PU rows.
/// Variables are x = [Re w_1; Im w_1; ...; Re w_K; Im w_K; t]; constraints:
///   - epigraph ||(w_1,...,w_K)|| <= t,
///   - per SU the rotated SINR cone
///       Re(h_k^H w_k) >= sqrt(gamma_k) ||(h_k^H w_i)_{i != k}, sigma||
///     with Im(h_k^H w_k) = 0,
///   - per PU ||(u_l^H w_1,...,u_l^H w_K)|| <= sqrt(kappa_l).
SocpProblem build_beamforming_socp(const CMatrix& h, const CMatrix& u, const QosSpec& qos);

/// Solves the subproblem after internal rescaling (channel and power scale
/// normalization; both leave the optimal W unchanged up to the recorded power
/// scale). Infeasible status means the QoS targets cannot be met under the
/// interference limits for this phase configuration.
BeamformingSolution solve_beamforming(const CMatrix& h, const CMatrix& u, const QosSpec& qos,
                                      double tol = 1e-8);

}  // namespace riscr
