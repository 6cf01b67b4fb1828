#include "riscr/conic.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "riscr/ipm.hpp"

namespace riscr {

const char* to_string(SolveStatusCode code) {
  switch (code) {
    case SolveStatusCode::Optimal: return "Optimal";
    case SolveStatusCode::Infeasible: return "Infeasible";
    case SolveStatusCode::IterationLimit: return "IterationLimit";
    case SolveStatusCode::NumericalTrouble: return "NumericalTrouble";
  }
  return "?";
}

void SocpProblem::validate() const {
  if (n_vars <= 0) throw ValidationError("SocpProblem: n_vars must be positive");
  if (objective.size() != n_vars) throw ValidationError("SocpProblem: objective size mismatch");
  if (cones.empty()) throw ValidationError("SocpProblem: at least one cone constraint required");
  for (const auto& c : cones) {
    if (c.c.size() != n_vars || (c.a.rows() > 0 && c.a.cols() != n_vars) ||
        c.b.size() != c.a.rows()) {
      throw ValidationError("SocpProblem: cone constraint dimension mismatch");
    }
  }
  for (const auto& e : equalities) {
    if (e.a.size() != n_vars) throw ValidationError("SocpProblem: equality dimension mismatch");
  }
}

void SdpProblem::validate() const {
  if (dim <= 0) throw ValidationError("SdpProblem: dim must be positive");
  auto check_herm = [&](const CMatrix& m, const char* what) {
    if (m.rows() != dim || m.cols() != dim) {
      throw ValidationError(std::string("SdpProblem: ") + what + " has wrong dimensions");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw ValidationError(std::string("SdpProblem: ") + what + " is not Hermitian");
    }
  };
  check_herm(objective, "objective");
  for (const auto& c : constraints) check_herm(c.a, "constraint matrix");
}

namespace {

SolveStatusCode map_exit(ipm::ExitCode code, bool infeasible_means_primal) {
  switch (code) {
    case ipm::ExitCode::Optimal:
      return SolveStatusCode::Optimal;
    case ipm::ExitCode::PrimalInfeasible:
      return infeasible_means_primal ? SolveStatusCode::Infeasible
                                     : SolveStatusCode::NumericalTrouble;
    case ipm::ExitCode::DualInfeasible:
      return infeasible_means_primal ? SolveStatusCode::NumericalTrouble
                                     : SolveStatusCode::Infeasible;
    case ipm::ExitCode::IterationLimit:
      return SolveStatusCode::IterationLimit;
    case ipm::ExitCode::NumericalTrouble:
      return SolveStatusCode::NumericalTrouble;
  }
  return SolveStatusCode::NumericalTrouble;
}

}  // namespace

SocpSolution solve_socp(const SocpProblem& p, double tol) {
  p.validate();
  const int n = p.n_vars;

  // Split pure linear inequalities (empty A) from genuine cones; the cone
  // vector is laid out LP block first.
  std::vector<int> lp_idx, soc_idx;
  for (std::size_t i = 0; i < p.cones.size(); ++i) {
    (p.cones[i].a.rows() == 0 ? lp_idx : soc_idx).push_back(static_cast<int>(i));
  }

  int m = static_cast<int>(lp_idx.size());
  ipm::ConeDims dims;
  dims.nonneg = m;
  for (int i : soc_idx) {
    dims.soc.push_back(static_cast<int>(p.cones[i].a.rows()) + 1);
    m += static_cast<int>(p.cones[i].a.rows()) + 1;
  }

  RMatrix G = RMatrix::Zero(m, n);
  RVector h = RVector::Zero(m);
  auto row_scale = [](const SocConstraint& c) {
    double s = std::max(std::abs(c.d), c.c.cwiseAbs().maxCoeff());
    if (c.a.rows() > 0) {
      s = std::max({s, c.a.cwiseAbs().maxCoeff(), c.b.cwiseAbs().maxCoeff()});
    }
    return s > 0.0 ? s : 1.0;
  };
  int row = 0;
  for (int i : lp_idx) {
    const auto& c = p.cones[i];
    const double s = row_scale(c);
    G.row(row) = -c.c.transpose() / s;
    h[row] = c.d / s;
    ++row;
  }
  for (int i : soc_idx) {
    const auto& c = p.cones[i];
    const double s = row_scale(c);
    G.row(row) = -c.c.transpose() / s;
    h[row] = c.d / s;
    G.block(row + 1, 0, c.a.rows(), n) = -c.a / s;
    h.segment(row + 1, c.a.rows()) = c.b / s;
    row += static_cast<int>(c.a.rows()) + 1;
  }

  const int pe = static_cast<int>(p.equalities.size());
  RMatrix A(pe, n);
  RVector b(pe);
  for (int i = 0; i < pe; ++i) {
    double s = std::max(p.equalities[i].a.cwiseAbs().maxCoeff(), std::abs(p.equalities[i].b));
    if (s <= 0.0) s = 1.0;
    A.row(i) = p.equalities[i].a.transpose() / s;
    b[i] = p.equalities[i].b / s;
  }

  ipm::Options opts;
  opts.feastol = opts.abstol = opts.reltol = tol;
  const ipm::Result r = ipm::solve(p.objective, G, h, A, b, dims, opts);

  SocpSolution sol;
  sol.x = r.x;
  sol.status.code = map_exit(r.code, /*infeasible_means_primal=*/true);
  sol.status.iterations = r.iterations;
  sol.status.objective = sol.x.size() == n ? p.objective.dot(sol.x) : 0.0;
  // Worst violation of the (row-normalized) constraints at the returned point.
  double viol = 0.0;
  if (sol.status.code == SolveStatusCode::Optimal ||
      sol.status.code == SolveStatusCode::IterationLimit) {
    for (const auto& c : p.cones) {
      const double s = row_scale(c);
      const double rhs = c.c.dot(sol.x) + c.d;
      const double lhs = c.a.rows() > 0 ? (c.a * sol.x + c.b).norm() : 0.0;
      viol = std::max(viol, (lhs - rhs) / s);
    }
    for (const auto& e : p.equalities) {
      double s = std::max(e.a.cwiseAbs().maxCoeff(), std::abs(e.b));
      if (s <= 0.0) s = 1.0;
      viol = std::max(viol, std::abs(e.a.dot(sol.x) - e.b) / s);
    }
  }
  sol.status.primal_residual = std::max(viol, 0.0);
  return sol;
}

RMatrix embed_hermitian(const CMatrix& x) {
  const int n = static_cast<int>(x.rows());
  RMatrix y(2 * n, 2 * n);
  y.topLeftCorner(n, n) = x.real();
  y.bottomRightCorner(n, n) = x.real();
  y.topRightCorner(n, n) = -x.imag();
  y.bottomLeftCorner(n, n) = x.imag();
  return y;
}

CMatrix unembed_hermitian(const RMatrix& y) {
  const int n = static_cast<int>(y.rows()) / 2;
  const RMatrix re = 0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
  const RMatrix im = 0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
  CMatrix x = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
  return 0.5 * (x + x.adjoint()).eval();
}

SdpSolution solve_sdp(const SdpProblem& p, double tol) {
  p.validate();
  const int nc = static_cast<int>(p.constraints.size());
  const int d2 = 2 * p.dim;
  const int sd = ipm::svec_len(d2);

  // Row-normalized, exactly Hermitian copies of the constraint data.
  std::vector<CMatrix> as(nc);
  RVector bounds(nc);
  std::vector<int> ineq;
  for (int i = 0; i < nc; ++i) {
    const auto& c = p.constraints[i];
    CMatrix a = 0.5 * (c.a + c.a.adjoint());
    double s = std::max(a.cwiseAbs().maxCoeff(), std::abs(c.bound));
    if (s <= 0.0) s = 1.0;
    as[i] = a / s;
    bounds[i] = c.bound / s;
    if (c.sense == ConstraintSense::LessEqual) ineq.push_back(i);
  }
  const CMatrix cobj = 0.5 * (p.objective + p.objective.adjoint());

  // Lagrangian dual:  min 2 b'y  s.t.  C + sum_i y_i A_i >= 0,  y_ineq >= 0,
  // fed through the real embedding (hence the factor 2 on b). The PSD slack's
  // dual multiplier recovers X.
  const int n_ineq = static_cast<int>(ineq.size());
  const int m = n_ineq + sd;
  RMatrix G = RMatrix::Zero(m, nc);
  RVector h = RVector::Zero(m);
  for (int r = 0; r < n_ineq; ++r) G(r, ineq[r]) = -1.0;
  RVector col(sd);
  for (int i = 0; i < nc; ++i) {
    const RMatrix emb = embed_hermitian(as[i]);
    ipm::svec(emb, col.data());
    G.block(n_ineq, i, sd, 1) = -col;
  }
  {
    const RMatrix emb = embed_hermitian(cobj);
    ipm::svec(emb, col.data());
    h.segment(n_ineq, sd) = col;
  }
  const RVector c_fed = 2.0 * bounds;

  ipm::ConeDims dims;
  dims.nonneg = n_ineq;
  dims.psd = {d2};

  ipm::Options opts;
  opts.feastol = opts.abstol = opts.reltol = tol;
  const ipm::Result r = ipm::solve(c_fed, G, h, RMatrix(0, nc), RVector(0), dims, opts);

  SdpSolution sol;
  // We feed the dual, so infeasibility of the original SDP surfaces as a
  // dual-infeasibility (unboundedness) certificate of the fed problem.
  sol.status.code = map_exit(r.code, /*infeasible_means_primal=*/false);
  sol.status.iterations = r.iterations;
  if (r.z.size() == m) {
    RMatrix zm;
    ipm::smat(r.z.data() + n_ineq, d2, zm);
    sol.x = unembed_hermitian(zm);
  } else {
    sol.x = CMatrix::Zero(p.dim, p.dim);
  }
  if (sol.status.code == SolveStatusCode::Optimal ||
      sol.status.code == SolveStatusCode::IterationLimit) {
    sol.status.objective = (cobj.adjoint() * sol.x).trace().real();
    double viol = 0.0;
    for (int i = 0; i < nc; ++i) {
      const double val = (as[i].adjoint() * sol.x).trace().real();
      const double err = val - bounds[i];
      viol = std::max(viol, p.constraints[i].sense == ConstraintSense::Equal ? std::abs(err) : err);
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sol.x, Eigen::EigenvaluesOnly);
    viol = std::max(viol, -es.eigenvalues().minCoeff());
    sol.status.primal_residual = std::max(viol, 0.0);
  }
  return sol;
}

namespace {

void write_vec(std::ostringstream& os, const RVector& v) {
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << " ";
    os << v[i];
  }
  os << "]";
}

}  // namespace

std::string dump(const SocpProblem& p) {
  std::ostringstream os;
  os << "socp n=" << p.n_vars << " minimize ";
  write_vec(os, p.objective);
  os << "\n";
  for (const auto& c : p.cones) {
    os << "cone ||A x + b|| <= c'x + d : rows=" << c.a.rows() << " c=";
    write_vec(os, c.c);
    os << " d=" << c.d << " b=";
    write_vec(os, c.b);
    os << " A=[";
    for (Eigen::Index i = 0; i < c.a.rows(); ++i) {
      if (i) os << "; ";
      for (Eigen::Index j = 0; j < c.a.cols(); ++j) {
        if (j) os << " ";
        os << c.a(i, j);
      }
    }
    os << "]\n";
  }
  for (const auto& e : p.equalities) {
    os << "eq a'x = b : a=";
    write_vec(os, e.a);
    os << " b=" << e.b << "\n";
  }
  return os.str();
}

std::string dump(const SdpProblem& p) {
  std::ostringstream os;
  auto write_herm = [&os](const CMatrix& m) {
    os << "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i) os << "; ";
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) os << " ";
        os << m(i, j).real() << (m(i, j).imag() < 0 ? "-" : "+") << std::abs(m(i, j).imag())
           << "i";
      }
    }
    os << "]";
  };
  os << "sdp dim=" << p.dim << " minimize <C,X>, C=";
  write_herm(p.objective);
  os << "\n";
  for (const auto& c : p.constraints) {
    os << "tr(A X) " << (c.sense == ConstraintSense::Equal ? "=" : "<=") << " " << c.bound
       << " : A=";
    write_herm(c.a);
    os << "\n";
  }
  return os.str();
}

}  // namespace riscr
