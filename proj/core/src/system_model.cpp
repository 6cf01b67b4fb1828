#include "riscr/system_model.hpp"

#include <cmath>

namespace riscr {

PhaseVector PhaseVector::Ones(int m) {
  PhaseVector p;
  p.theta = CVector::Ones(m);
  return p;
}

PhaseVector PhaseVector::Random(int m, Rng& rng) {
  PhaseVector p;
  p.theta.resize(m);
  for (int i = 0; i < m; ++i) {
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    p.theta[i] = Complex(std::cos(phi), std::sin(phi));
  }
  return p;
}

void PhaseVector::validate(double tol) const {
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (std::abs(std::abs(theta[i]) - 1.0) > tol) {
      throw ValidationError("PhaseVector: |theta_m| != 1 at index " + std::to_string(i));
    }
  }
}

BeamformerSet BeamformerSet::Zero(int n, int k) {
  BeamformerSet b;
  b.w = CMatrix::Zero(n, k);
  return b;
}

void QosSpec::validate() const {
  if ((gamma.array() <= 0.0).any() || (kappa.size() > 0 && (kappa.array() <= 0.0).any()) ||
      sigma2 <= 0.0) {
    throw ValidationError("QosSpec: gamma, kappa and sigma2 must be positive");
  }
}

QosSpec QosSpec::Uniform(int k, int l, double gamma_db, double kappa_db, double sigma2_db) {
  QosSpec q;
  q.gamma = RVector::Constant(k, db_to_linear(gamma_db));
  q.kappa = RVector::Constant(l, db_to_linear(kappa_db));
  q.sigma2 = db_to_linear(sigma2_db);
  return q;
}

namespace {

// rows(k) = base.row(k) + refl.row(k) * diag(theta) * g
CMatrix compose_effective(const CMatrix& base, const CMatrix& refl, const CVector& theta,
                          const CMatrix& g) {
  if (base.rows() != refl.rows() || refl.cols() != theta.size()) {
    throw ValidationError("effective channels: inconsistent dimensions");
  }
  if (refl.cols() == 0) return base;
  if (g.rows() != refl.cols() || g.cols() != base.cols()) {
    throw ValidationError("effective channels: inconsistent dimensions");
  }
  CMatrix scaled = refl;
  scaled.array().rowwise() *= theta.transpose().array();
  return base + scaled * g;
}

}  // namespace

CMatrix effective_su_channels(const ChannelSet& ch, const PhaseVector& theta) {
  return compose_effective(ch.h_d, ch.h_r, theta.theta, ch.g);
}

CMatrix effective_pu_channels(const ChannelSet& ch, const PhaseVector& theta) {
  return compose_effective(ch.u_d, ch.u_r, theta.theta, ch.g);
}

RVector sinr_all(const ChannelSet& ch, const PhaseVector& theta, const BeamformerSet& w,
                 double sigma2) {
  if (sigma2 <= 0.0) throw ValidationError("sinr_all: sigma2 must be positive");
  const CMatrix h = effective_su_channels(ch, theta);
  const int k = static_cast<int>(h.rows());
  const CMatrix gains = h * w.w;  // gains(k, i) = h_k^H w_i
  RVector out(k);
  for (int u = 0; u < k; ++u) {
    double interf = 0.0;
    for (int i = 0; i < w.n_users(); ++i) {
      if (i != u) interf += std::norm(gains(u, i));
    }
    out[u] = std::norm(gains(u, u)) / (interf + sigma2);
  }
  return out;
}

RVector interference_all(const ChannelSet& ch, const PhaseVector& theta, const BeamformerSet& w) {
  const CMatrix u = effective_pu_channels(ch, theta);
  const CMatrix gains = u * w.w;  // gains(l, k) = u_l^H w_k
  return gains.cwiseAbs2().rowwise().sum();
}

double total_power(const BeamformerSet& w) { return w.w.squaredNorm(); }

FeasibilityReport check_feasibility(const ChannelSet& ch, const PhaseVector& theta,
                                    const BeamformerSet& w, const QosSpec& qos, double tol) {
  FeasibilityReport rep;
  rep.sinr = sinr_all(ch, theta, w, qos.sigma2);
  rep.interference = interference_all(ch, theta, w);
  rep.sinr_margin = rep.sinr - qos.gamma;
  rep.ip_margin = qos.kappa - rep.interference;
  rep.max_modulus_err = 0.0;
  for (Eigen::Index m = 0; m < theta.theta.size(); ++m) {
    rep.max_modulus_err = std::max(rep.max_modulus_err, std::abs(std::abs(theta.theta[m]) - 1.0));
  }
  const bool sinr_ok = (rep.sinr.array() >= qos.gamma.array() * (1.0 - tol)).all();
  const bool ip_ok = rep.interference.size() == 0 ||
                     (rep.interference.array() <= qos.kappa.array() * (1.0 + tol)).all();
  rep.feasible = sinr_ok && ip_ok && rep.max_modulus_err <= tol;
  return rep;
}

}  // namespace riscr
