#pragma once

#include "riscr/channel.hpp"
#include "riscr/types.hpp"

namespace riscr {

/// M unit-modulus RIS reflection coefficients (|theta_m| = 1 within 1e-9).
struct PhaseVector {
  CVector theta;

  static PhaseVector Ones(int m);
  /// Independent uniform phases on [0, 2pi).
  static PhaseVector Random(int m, Rng& rng);
  void validate(double tol = 1e-9) const;
};

/// K beamforming vectors of length N, stored as columns of an N x K matrix.
struct BeamformerSet {
  CMatrix w;  // N x K

  int n_users() const { return static_cast<int>(w.cols()); }
  static BeamformerSet Zero(int n, int k);
};

/// Per-user SINR targets, per-PU interference caps and the noise power, all linear.
struct QosSpec {
  RVector gamma;  // K
  RVector kappa;  // L
  double sigma2 = 1.0;

  void validate() const;
  /// Uniform targets: gamma_db for every SU, kappa_db for every PU.
  static QosSpec Uniform(int k, int l, double gamma_db, double kappa_db, double sigma2_db);
};

/// Row k = h_{d,k}^H + h_{r,k}^H diag(theta) G; the effective downlink channel
/// of SU k under the given reflection coefficients.
CMatrix effective_su_channels(const ChannelSet& ch, const PhaseVector& theta);

/// Same composition for the PU channels u_l.
CMatrix effective_pu_channels(const ChannelSet& ch, const PhaseVector& theta);

/// SINR_k = |h_k^H w_k|^2 / (sum_{i != k} |h_k^H w_i|^2 + sigma2).
RVector sinr_all(const ChannelSet& ch, const PhaseVector& theta, const BeamformerSet& w,
                 double sigma2);

/// IP_l = sum_k |u_l^H w_k|^2.
RVector interference_all(const ChannelSet& ch, const PhaseVector& theta, const BeamformerSet& w);

/// sum_k ||w_k||^2.
double total_power(const BeamformerSet& w);

struct FeasibilityReport {
  RVector sinr;            // K, linear
  RVector sinr_margin;     // SINR_k - gamma_k
  RVector interference;    // L, linear
  RVector ip_margin;       // kappa_l - IP_l
  double max_modulus_err;  // max_m | |theta_m| - 1 |
  bool feasible = false;
};

/// Feasible iff SINR_k >= gamma_k (1 - tol) for all k, IP_l <= kappa_l (1 + tol)
/// for all l, and every |theta_m| = 1 within tol.
FeasibilityReport check_feasibility(const ChannelSet& ch, const PhaseVector& theta,
                                    const BeamformerSet& w, const QosSpec& qos,
                                    double tol = 1e-6);

}  // namespace riscr
