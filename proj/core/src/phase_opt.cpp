#include "riscr/phase_opt.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace riscr {

Complex HomogenizedData::su_amplitude(const PhaseVector& theta, int su, int beam) const {
  const CVector& av = a[ki(su, beam)];
  Complex s = b(su, beam);
  for (int j = 0; j < m; ++j) s += theta.theta[j] * av[j];
  return s;
}

Complex HomogenizedData::pu_amplitude(const PhaseVector& theta, int pu, int beam) const {
  const CVector& dv = d[lk(pu, beam)];
  Complex s = c(pu, beam);
  for (int j = 0; j < m; ++j) s += theta.theta[j] * dv[j];
  return s;
}

bool HomogenizedData::feasible_at(const PhaseVector& theta, double tol) const {
  for (int su = 0; su < k; ++su) {
    double interf = 0.0;
    for (int i = 0; i < k; ++i) {
      if (i != su) interf += std::norm(su_amplitude(theta, su, i));
    }
    const double sig = std::norm(su_amplitude(theta, su, su));
    if (sig < gamma[su] * (interf + sigma2) * (1.0 - tol)) return false;
  }
  for (int pu = 0; pu < l; ++pu) {
    double ip = 0.0;
    for (int i = 0; i < k; ++i) ip += std::norm(pu_amplitude(theta, pu, i));
    if (ip > kappa[pu] * (1.0 + tol)) return false;
  }
  return true;
}

namespace {

// Row-form channel times beamformer, h^H w, without extra conjugation.
Complex row_dot(const Eigen::RowVectorXcd& r, const CVector& v) { return (r * v).value(); }

CMatrix lifting_block(const CVector& a, Complex b) {
  const int m = static_cast<int>(a.size());
  CMatrix r = CMatrix::Zero(m + 1, m + 1);
  r.topLeftCorner(m, m) = a * a.adjoint();
  r.topRightCorner(m, 1) = a * std::conj(b);
  r.bottomLeftCorner(1, m) = b * a.adjoint();
  return r;
}

}  // namespace

HomogenizedData homogenize(const ChannelSet& ch, const QosSpec& qos, const BeamformerSet& w) {
  const int k = static_cast<int>(ch.h_d.rows());
  const int l = static_cast<int>(ch.u_d.rows());
  const int m = static_cast<int>(ch.g.rows());
  if (w.w.cols() != k || (m > 0 && w.w.rows() != ch.g.cols()) || qos.gamma.size() != k ||
      qos.kappa.size() != l) {
    throw ValidationError("homogenize: dimension mismatch");
  }

  HomogenizedData dat;
  dat.m = m;
  dat.k = k;
  dat.l = l;
  dat.sigma2 = qos.sigma2;
  dat.gamma = qos.gamma;
  dat.kappa = qos.kappa;
  dat.a.resize(static_cast<std::size_t>(k) * k);
  dat.b.resize(k, k);
  dat.d.resize(static_cast<std::size_t>(l) * k);
  dat.c.resize(l, k);
  dat.r.resize(static_cast<std::size_t>(k) * k);
  dat.q.resize(static_cast<std::size_t>(l) * k);

  const CMatrix gw = m > 0 ? CMatrix(ch.g * w.w) : CMatrix::Zero(0, k);  // (G w_i) columns
  for (int su = 0; su < k; ++su) {
    for (int i = 0; i < k; ++i) {
      CVector av(m);
      for (int j = 0; j < m; ++j) av[j] = ch.h_r(su, j) * gw(j, i);
      const Complex bv = row_dot(ch.h_d.row(su), w.w.col(i));
      dat.a[dat.ki(su, i)] = av;
      dat.b(su, i) = bv;
      dat.r[dat.ki(su, i)] = lifting_block(av, bv);
    }
  }
  for (int pu = 0; pu < l; ++pu) {
    for (int i = 0; i < k; ++i) {
      CVector dv(m);
      for (int j = 0; j < m; ++j) dv[j] = ch.u_r(pu, j) * gw(j, i);
      const Complex cv = row_dot(ch.u_d.row(pu), w.w.col(i));
      dat.d[dat.lk(pu, i)] = dv;
      dat.c(pu, i) = cv;
      dat.q[dat.lk(pu, i)] = lifting_block(dv, cv);
    }
  }
  return dat;
}

SdpProblem build_feasibility_sdp(const HomogenizedData& dat, const CMatrix* objective) {
  const int n = dat.m + 1;
  SdpProblem p;
  p.dim = n;
  p.objective = objective ? *objective : CMatrix::Zero(n, n);

  // gamma_k (sum_{i!=k} q_i + sigma^2) <= q_k with q_i = <R(k,i), T> + |b|^2
  // collected as <gamma sum R(k,i) - R(k,k), T> <= |b_kk|^2 - gamma (sum |b_ki|^2 + sigma^2).
  for (int su = 0; su < dat.k; ++su) {
    SdpConstraint c;
    c.a = CMatrix::Zero(n, n);
    double rhs = std::norm(dat.b(su, su));
    double interf_const = dat.sigma2;
    for (int i = 0; i < dat.k; ++i) {
      if (i == su) continue;
      c.a += dat.gamma[su] * dat.r[dat.ki(su, i)];
      interf_const += std::norm(dat.b(su, i));
    }
    c.a -= dat.r[dat.ki(su, su)];
    c.bound = rhs - dat.gamma[su] * interf_const;
    c.sense = ConstraintSense::LessEqual;
    p.constraints.push_back(std::move(c));
  }
  for (int pu = 0; pu < dat.l; ++pu) {
    SdpConstraint c;
    c.a = CMatrix::Zero(n, n);
    double consts = 0.0;
    for (int i = 0; i < dat.k; ++i) {
      c.a += dat.q[dat.lk(pu, i)];
      consts += std::norm(dat.c(pu, i));
    }
    c.bound = dat.kappa[pu] - consts;
    c.sense = ConstraintSense::LessEqual;
    p.constraints.push_back(std::move(c));
  }
  for (int j = 0; j < n; ++j) {
    SdpConstraint c;
    c.a = CMatrix::Zero(n, n);
    c.a(j, j) = 1.0;
    c.bound = 1.0;
    c.sense = ConstraintSense::Equal;
    p.constraints.push_back(std::move(c));
  }
  return p;
}

namespace {

LiftedSolution to_lifted(const CMatrix& x) {
  LiftedSolution sol;
  sol.theta_tilde = 0.5 * (x + x.adjoint());
  return sol;
}

// Solves the lifted SDP, translating failure modes.
CMatrix solve_lifted(const SdpProblem& prob, double tol, const char* stage) {
  const SdpSolution sol = solve_sdp(prob, tol);
  if (sol.status.code == SolveStatusCode::Infeasible) throw PhaseInfeasibleError();
  if (sol.status.code == SolveStatusCode::NumericalTrouble) {
    throw ConicSolveError(std::string("phase SDP solve failed at ") + stage);
  }
  // IterationLimit iterates are still usable when nearly feasible.
  if (sol.status.code == SolveStatusCode::IterationLimit &&
      sol.status.primal_residual > 1e-5) {
    throw ConicSolveError(std::string("phase SDP did not reach accuracy at ") + stage);
  }
  return sol.x;
}

}  // namespace

std::pair<LiftedSolution, DcReport> dc_solve(const HomogenizedData& dat, const DcParams& params) {
  const int n = dat.m + 1;
  const SdpProblem base = build_feasibility_sdp(dat, nullptr);

  DcReport report;
  CMatrix theta = solve_lifted(base, params.solver_tol, "initialization");
  report.iterations = 1;

  auto residual_of = [&](const CMatrix& t) {
    return rank_one_residual(HermitianMatrix(0.5 * (t + t.adjoint()), 1e-6));
  };

  double residual = residual_of(theta);
  report.residual_trace.push_back(residual);

  SdpProblem step = base;
  while (residual > params.rank_tol && report.iterations <= params.max_iters) {
    const HermitianMatrix current(0.5 * (theta + theta.adjoint()), 1e-6);
    const CMatrix subgrad = leading_rank_one(current).mat();
    const CMatrix objective = CMatrix::Identity(n, n) - subgrad;
    step.objective = objective;
    CMatrix next;
    try {
      next = solve_lifted(step, params.solver_tol, "dc step");
    } catch (const ConicSolveError&) {
      break;  // keep the previous iterate; caller may fall back to randomization
    }
    theta = next;
    residual = residual_of(theta);
    report.residual_trace.push_back(residual);
    report.iterations += 1;
  }

  report.final_residual = residual;
  report.converged = residual <= params.rank_tol;
  return {to_lifted(theta), report};
}

std::pair<std::optional<PhaseVector>, SdrDiagnostics> sdr_solve(const HomogenizedData& dat,
                                                                const SdrParams& params, Rng& rng) {
  if (params.n_randomizations < 1) {
    throw ValidationError("sdr_solve: n_randomizations must be >= 1");
  }
  const SdpProblem base = build_feasibility_sdp(dat, nullptr);
  const CMatrix theta = solve_lifted(base, params.solver_tol, "sdr relaxation");
  const HermitianMatrix lifted(0.5 * (theta + theta.adjoint()), 1e-6);

  SdrDiagnostics diag;
  diag.relaxed_residual = rank_one_residual(lifted);

  if (diag.relaxed_residual <= params.rank_tol) {
    diag.direct_extraction = true;
    return {extract_phase({lifted.mat()}, params.rank_tol), diag};
  }

  // Gaussian randomization with covariance Theta*: draw xi ~ CN(0, Theta),
  // divide by the homogenization component, project to unit modulus.
  const EigenDecomposition ed = hermitian_eig(lifted);
  const int n = dat.m + 1;
  CMatrix factor = ed.eigenvectors;
  for (int i = 0; i < n; ++i) {
    factor.col(i) *= std::sqrt(std::max(ed.eigenvalues[i], 0.0));
  }
  for (int draw = 1; draw <= params.n_randomizations; ++draw) {
    CVector g(n);
    for (int i = 0; i < n; ++i) g[i] = rng.cnormal();
    const CVector xi = factor * g;
    if (std::abs(xi[n - 1]) < 1e-12) continue;
    PhaseVector cand;
    cand.theta.resize(dat.m);
    for (int j = 0; j < dat.m; ++j) {
      const Complex ratio = xi[j] / xi[n - 1];
      const double mod = std::abs(ratio);
      // The lifted vector stacks conjugated coefficients; conjugate back.
      cand.theta[j] = mod > 0.0 ? std::conj(ratio) / mod : Complex(1.0, 0.0);
    }
    diag.candidates_tried = draw;
    if (dat.feasible_at(cand)) {
      diag.success_index = draw;
      return {cand, diag};
    }
  }
  return {std::nullopt, diag};
}

PhaseVector extract_phase(const LiftedSolution& sol, double rank_tol) {
  const HermitianMatrix lifted(sol.theta_tilde, 1e-6);
  const int n = static_cast<int>(lifted.dim());
  const double trace = lifted.trace();
  const CVector f = rank_one_factor(lifted, rank_tol * n / std::max(trace, 1e-300));
  const Complex anchor = f[n - 1];
  if (std::abs(anchor) < 1e-9) {
    throw ValidationError("extract_phase: homogenization component vanished");
  }
  PhaseVector theta;
  theta.theta.resize(n - 1);
  for (int j = 0; j < n - 1; ++j) {
    const Complex ratio = f[j] / anchor;
    const double mod = std::abs(ratio);
    theta.theta[j] = mod > 0.0 ? std::conj(ratio) / mod : Complex(1.0, 0.0);
  }
  return theta;
}

}  // namespace riscr
