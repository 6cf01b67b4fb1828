#include "riscr/beamforming.hpp"

#include <cmath>

namespace riscr {

namespace {

// x = [Re w_1; Im w_1; ...; Re w_K; Im w_K; t], w_k of length N.
int re_off(int k, int n) { return 2 * n * k; }
int im_off(int k, int n) { return 2 * n * k + n; }

// Coefficient rows of Re(r w_k) and Im(r w_k) for a stored row r = h^H.
void fill_re_row(RVector& row, const Eigen::RowVectorXcd& r, int k, int n) {
  row.segment(re_off(k, n), n) = r.real().transpose();
  row.segment(im_off(k, n), n) = -r.imag().transpose();
}

void fill_im_row(RVector& row, const Eigen::RowVectorXcd& r, int k, int n) {
  row.segment(re_off(k, n), n) = r.imag().transpose();
  row.segment(im_off(k, n), n) = r.real().transpose();
}

}  // namespace

SocpProblem build_beamforming_socp(const CMatrix& h, const CMatrix& u, const QosSpec& qos) {
  const int k = static_cast<int>(h.rows());
  const int n = static_cast<int>(h.cols());
  const int l = static_cast<int>(u.rows());
  if (qos.gamma.size() != k || qos.kappa.size() != l || (l > 0 && u.cols() != n)) {
    throw ValidationError("build_beamforming_socp: dimension mismatch");
  }
  qos.validate();
  const int nv = 2 * n * k + 1;
  const int t_idx = nv - 1;
  const double sigma = std::sqrt(qos.sigma2);

  SocpProblem p;
  p.n_vars = nv;
  p.objective = RVector::Zero(nv);
  p.objective[t_idx] = 1.0;

  // Epigraph cone ||stack(w)|| <= t.
  {
    SocConstraint c;
    c.a = RMatrix::Zero(2 * n * k, nv);
    c.a.leftCols(2 * n * k).setIdentity();
    c.b = RVector::Zero(2 * n * k);
    c.c = RVector::Zero(nv);
    c.c[t_idx] = 1.0;
    c.d = 0.0;
    p.cones.push_back(std::move(c));
  }

  // Rotated SINR cones and the phase-fixing equalities.
  for (int user = 0; user < k; ++user) {
    const double root_gamma = std::sqrt(qos.gamma[user]);
    SocConstraint c;
    c.a = RMatrix::Zero(2 * (k - 1) + 1, nv);
    c.b = RVector::Zero(2 * (k - 1) + 1);
    RVector row(nv);
    int r = 0;
    for (int i = 0; i < k; ++i) {
      if (i == user) continue;
      row.setZero();
      fill_re_row(row, h.row(user), i, n);
      c.a.row(r++) = root_gamma * row.transpose();
      row.setZero();
      fill_im_row(row, h.row(user), i, n);
      c.a.row(r++) = root_gamma * row.transpose();
    }
    c.b[r] = root_gamma * sigma;
    c.c = RVector::Zero(nv);
    row.setZero();
    fill_re_row(row, h.row(user), user, n);
    c.c = row;
    c.d = 0.0;
    p.cones.push_back(std::move(c));

    LinearEquality eq;
    eq.a = RVector::Zero(nv);
    row.setZero();
    fill_im_row(row, h.row(user), user, n);
    eq.a = row;
    eq.b = 0.0;
    p.equalities.push_back(std::move(eq));
  }

  // Interference cones per PU.
  for (int pu = 0; pu < l; ++pu) {
    SocConstraint c;
    c.a = RMatrix::Zero(2 * k, nv);
    c.b = RVector::Zero(2 * k);
    RVector row(nv);
    for (int i = 0; i < k; ++i) {
      row.setZero();
      fill_re_row(row, u.row(pu), i, n);
      c.a.row(2 * i) = row.transpose();
      row.setZero();
      fill_im_row(row, u.row(pu), i, n);
      c.a.row(2 * i + 1) = row.transpose();
    }
    c.c = RVector::Zero(nv);
    c.d = std::sqrt(qos.kappa[pu]);
    p.cones.push_back(std::move(c));
  }
  return p;
}

BeamformingSolution solve_beamforming(const CMatrix& h, const CMatrix& u, const QosSpec& qos,
                                      double tol) {
  const int k = static_cast<int>(h.rows());
  const int n = static_cast<int>(h.cols());
  qos.validate();

  // Channel-scale normalization: (h, u, sigma, kappa) -> (h/s, u/s, sigma/s,
  // kappa/s^2) leaves the SINR and interference constraints invariant and the
  // optimal W unchanged.
  double s2 = h.rowwise().norm().mean();
  if (s2 <= 0.0) s2 = 1.0;
  const CMatrix hs = h / s2;
  const CMatrix us = u.rows() > 0 ? CMatrix(u / s2) : u;
  QosSpec q = qos;
  q.sigma2 = qos.sigma2 / (s2 * s2);
  q.kappa = qos.kappa / (s2 * s2);

  // Power-scale normalization: dividing sigma^2 and kappa by p0 scales the
  // optimal beamformers by 1/sqrt(p0); undone on the way out.
  double p0 = 0.0;
  for (int i = 0; i < k; ++i) {
    p0 = std::max(p0, q.gamma[i] * q.sigma2 / std::max(hs.row(i).squaredNorm(), 1e-300));
  }
  if (p0 <= 0.0) p0 = 1.0;
  q.sigma2 /= p0;
  q.kappa /= p0;

  const SocpProblem prob = build_beamforming_socp(hs, us, q);
  const SocpSolution sol = solve_socp(prob, tol);

  BeamformingSolution out;
  out.status = sol.status;
  out.w = BeamformerSet::Zero(n, k);
  if (sol.x.size() == prob.n_vars) {
    const double amp = std::sqrt(p0);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < n; ++j) {
        out.w.w(j, i) =
            amp * Complex(sol.x[re_off(i, n) + j], sol.x[im_off(i, n) + j]);
      }
    }
  }
  out.power = total_power(out.w);
  out.status.objective = out.power;
  return out;
}

}  // namespace riscr
