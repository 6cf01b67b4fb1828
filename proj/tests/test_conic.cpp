#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "riscr/conic.hpp"
#include "riscr/ipm.hpp"
#include "riscr/rng.hpp"

using namespace riscr;

namespace {

SocConstraint norm_le(const RMatrix& a, const RVector& b, const RVector& c, double d) {
  SocConstraint s;
  s.a = a;
  s.b = b;
  s.c = c;
  s.d = d;
  return s;
}

}  // namespace

TEST_CASE("svec/smat round trip preserves inner products") {
  Rng rng(1);
  const int d = 5;
  RMatrix x(d, d), y(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      x(i, j) = rng.normal();
      y(i, j) = rng.normal();
    }
  }
  x = RMatrix(0.5 * (x + x.transpose()));
  y = RMatrix(0.5 * (y + y.transpose()));
  RVector vx(ipm::svec_len(d)), vy(ipm::svec_len(d));
  ipm::svec(x, vx.data());
  ipm::svec(y, vy.data());
  CHECK(vx.dot(vy) == doctest::Approx((x * y).trace()).epsilon(1e-12));
  RMatrix back;
  ipm::smat(vx.data(), d, back);
  CHECK((back - x).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("socp: projection onto a halfspace") {
  // minimize ||w|| s.t. real(h^H w) >= 1 with h = (1, 0) -> w = (1, 0).
  SocpProblem p;
  p.n_vars = 3;  // re w1, re w2 (imag parts omitted), t
  p.objective = RVector::Zero(3);
  p.objective[2] = 1.0;
  RMatrix a = RMatrix::Zero(2, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  RVector ct = RVector::Zero(3);
  ct[2] = 1.0;
  p.cones.push_back(norm_le(a, RVector::Zero(2), ct, 0.0));
  RVector hc = RVector::Zero(3);
  hc[0] = 1.0;
  p.cones.push_back(norm_le(RMatrix(0, 3), RVector(0), hc, -1.0));  // x0 >= 1

  const SocpSolution sol = solve_socp(p, 1e-9);
  REQUIRE(sol.status.code == SolveStatusCode::Optimal);
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(sol.x[1]) <= 1e-7);
  CHECK(sol.status.objective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("socp: unconstrained norm minimization gives zero") {
  SocpProblem p;
  p.n_vars = 3;
  p.objective = RVector::Zero(3);
  p.objective[2] = 1.0;
  RMatrix a = RMatrix::Zero(2, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  RVector ct = RVector::Zero(3);
  ct[2] = 1.0;
  p.cones.push_back(norm_le(a, RVector::Zero(2), ct, 0.0));
  const SocpSolution sol = solve_socp(p, 1e-9);
  REQUIRE(sol.status.code == SolveStatusCode::Optimal);
  CHECK(std::abs(sol.x[0]) <= 1e-6);
  CHECK(std::abs(sol.x[1]) <= 1e-6);
  CHECK(std::abs(sol.status.objective) <= 1e-6);
}

TEST_CASE("socp: contradictory linear constraints are infeasible") {
  SocpProblem p;
  p.n_vars = 1;
  p.objective = RVector::Constant(1, 0.0);
  RVector c1 = RVector::Constant(1, 1.0);
  p.cones.push_back(norm_le(RMatrix(0, 1), RVector(0), c1, -1.0));   // x >= 1
  RVector c2 = RVector::Constant(1, -1.0);
  p.cones.push_back(norm_le(RMatrix(0, 1), RVector(0), c2, -1.0));  // -x >= 1
  const SocpSolution sol = solve_socp(p, 1e-9);
  CHECK(sol.status.code == SolveStatusCode::Infeasible);
}

TEST_CASE("socp: equality constraints are honored") {
  // minimize x0 + x1 s.t. x0 - x1 = 3, ||(x0, x1)|| <= 5.
  SocpProblem p;
  p.n_vars = 2;
  p.objective = RVector::Ones(2);
  RMatrix a = RMatrix::Identity(2, 2);
  p.cones.push_back(norm_le(a, RVector::Zero(2), RVector::Zero(2), 5.0));
  LinearEquality eq;
  eq.a = RVector(2);
  eq.a << 1.0, -1.0;
  eq.b = 3.0;
  p.equalities.push_back(eq);
  const SocpSolution sol = solve_socp(p, 1e-9);
  REQUIRE(sol.status.code == SolveStatusCode::Optimal);
  CHECK(sol.x[0] - sol.x[1] == doctest::Approx(3.0).epsilon(1e-7));
  // Verify the optimum against a fine scan over the equality line.
  const double r = 5.0;
  double best = 1e30;
  for (int i = 0; i <= 2000000; ++i) {
    const double x0 = -r + i * (2 * r) / 2000000.0;
    const double x1 = x0 - 3.0;
    if (x0 * x0 + x1 * x1 <= r * r + 1e-12) best = std::min(best, x0 + x1);
  }
  CHECK(sol.status.objective == doctest::Approx(best).epsilon(1e-4));
}

TEST_CASE("sdp: trace minimization with a pinned corner") {
  SdpProblem p;
  p.dim = 2;
  p.objective = CMatrix::Identity(2, 2);
  SdpConstraint c;
  c.a = CMatrix::Zero(2, 2);
  c.a(0, 0) = 1.0;
  c.bound = 1.0;
  c.sense = ConstraintSense::Equal;
  p.constraints.push_back(c);
  const SdpSolution sol = solve_sdp(p, 1e-9);
  REQUIRE(sol.status.code == SolveStatusCode::Optimal);
  CHECK(sol.status.objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.x(0, 0).real() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(sol.x(1, 1)) <= 1e-6);
  CHECK(std::abs(sol.x(0, 1)) <= 1e-5);
}

TEST_CASE("sdp: maximize a corner under unit diagonal") {
  // max <e1 e1', X> s.t. diag = 1 -> 1; fed as minimize -<...>.
  SdpProblem p;
  p.dim = 2;
  p.objective = CMatrix::Zero(2, 2);
  p.objective(0, 0) = -1.0;
  for (int j = 0; j < 2; ++j) {
    SdpConstraint c;
    c.a = CMatrix::Zero(2, 2);
    c.a(j, j) = 1.0;
    c.bound = 1.0;
    c.sense = ConstraintSense::Equal;
    p.constraints.push_back(c);
  }
  const SdpSolution sol = solve_sdp(p, 1e-9);
  REQUIRE(sol.status.code == SolveStatusCode::Optimal);
  CHECK(sol.status.objective == doctest::Approx(-1.0).epsilon(1e-7));
}

TEST_CASE("sdp: negative trace bound is infeasible") {
  SdpProblem p;
  p.dim = 2;
  p.objective = CMatrix::Zero(2, 2);
  SdpConstraint c;
  c.a = CMatrix::Identity(2, 2);
  c.bound = -1.0;
  c.sense = ConstraintSense::LessEqual;
  p.constraints.push_back(c);
  const SdpSolution sol = solve_sdp(p, 1e-9);
  CHECK(sol.status.code == SolveStatusCode::Infeasible);
}

TEST_CASE("sdp: complex constraint data") {
  // Pin the off-diagonal phase: X = [[1, e^{i phi}], [e^{-i phi}, 1]] PSD needs
  // |X01| <= 1; maximizing Re(e^{-i phi} X01) gives 1 at X01 = e^{i phi}.
  const double phi = 0.7;
  const Complex u = std::polar(1.0, phi);
  SdpProblem p;
  p.dim = 2;
  p.objective = CMatrix::Zero(2, 2);
  p.objective(0, 1) = -0.5 * u;
  p.objective(1, 0) = -0.5 * std::conj(u);
  for (int j = 0; j < 2; ++j) {
    SdpConstraint c;
    c.a = CMatrix::Zero(2, 2);
    c.a(j, j) = 1.0;
    c.bound = 1.0;
    c.sense = ConstraintSense::Equal;
    p.constraints.push_back(c);
  }
  const SdpSolution sol = solve_sdp(p, 1e-9);
  REQUIRE(sol.status.code == SolveStatusCode::Optimal);
  CHECK(sol.status.objective == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(sol.x(0, 1) - u) <= 1e-5);
}

TEST_CASE("hermitian embedding round trip") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 5);
    CMatrix x(n, n), a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        x(i, j) = rng.cnormal();
        a(i, j) = rng.cnormal();
      }
    }
    x = CMatrix(0.5 * (x + x.adjoint()));
    a = CMatrix(0.5 * (a + a.adjoint()));

    const RMatrix ex = embed_hermitian(x);
    const RMatrix ea = embed_hermitian(a);
    // Factor-2 convention of the embedding.
    const double lhs = (ea.transpose() * ex).trace();
    const double rhs = 2.0 * (a.adjoint() * x).trace().real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    CHECK((unembed_hermitian(ex) - x).cwiseAbs().maxCoeff() <= 1e-12);

    // PSD iff: compare minimum eigenvalues.
    Eigen::SelfAdjointEigenSolver<CMatrix> ec(x);
    Eigen::SelfAdjointEigenSolver<RMatrix> er(ex);
    CHECK(ec.eigenvalues().minCoeff() ==
          doctest::Approx(er.eigenvalues().minCoeff()).epsilon(1e-9));
  }
}

TEST_CASE("duality gap certificate on random feasible SOCPs") {
  // Random instances with a known strictly feasible point; on Optimal the
  // solver-reported duality gap must be tiny.
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4, rows = 3;
    SocpProblem p;
    p.n_vars = n;
    p.objective = RVector::Zero(n);
    for (int i = 0; i < n; ++i) p.objective[i] = rng.normal();
    for (int cone = 0; cone < 3; ++cone) {
      RMatrix a(rows, n);
      RVector b(rows);
      for (int i = 0; i < rows; ++i) {
        b[i] = rng.normal();
        for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
      }
      // ||A x + b|| <= c'x + d with d >= ||b|| + 1 so x = 0 is strictly feasible.
      RVector c = RVector::Zero(n);
      for (int j = 0; j < n; ++j) c[j] = 0.2 * rng.normal();
      p.cones.push_back(norm_le(a, b, c, b.norm() + 1.0 + rng.uniform()));
    }
    // Keep the problem bounded: ||x|| <= 10.
    p.cones.push_back(
        norm_le(RMatrix::Identity(n, n), RVector::Zero(n), RVector::Zero(n), 10.0));

    const SocpSolution sol = solve_socp(p, 1e-8);
    REQUIRE(sol.status.code == SolveStatusCode::Optimal);
    CHECK(sol.status.primal_residual <= 1e-7);

    // Feasible-direction probe: no nearby feasible point materially better.
    for (int probe = 0; probe < 200; ++probe) {
      RVector cand = sol.x;
      for (int j = 0; j < n; ++j) cand[j] += 0.05 * rng.normal();
      bool ok = true;
      for (const auto& c : p.cones) {
        const double lhs = c.a.rows() ? (c.a * cand + c.b).norm() : 0.0;
        if (lhs > c.c.dot(cand) + c.d) {
          ok = false;
          break;
        }
      }
      if (ok) CHECK(p.objective.dot(cand) >= sol.status.objective - 1e-6);
    }
  }
}

TEST_CASE("duality gap on random feasible SDPs") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 3;
    SdpProblem p;
    p.dim = d;
    CMatrix c(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) c(i, j) = rng.cnormal();
    }
    p.objective = 0.5 * (c + c.adjoint());
    for (int j = 0; j < d; ++j) {
      SdpConstraint eq;
      eq.a = CMatrix::Zero(d, d);
      eq.a(j, j) = 1.0;
      eq.bound = 1.0;
      eq.sense = ConstraintSense::Equal;
      p.constraints.push_back(eq);
    }
    const SdpSolution sol = solve_sdp(p, 1e-8);
    REQUIRE(sol.status.code == SolveStatusCode::Optimal);
    CHECK(sol.status.primal_residual <= 1e-6);

    // Feasibility of the recovered matrix and local optimality probes.
    for (int j = 0; j < d; ++j) {
      CHECK(sol.x(j, j).real() == doctest::Approx(1.0).epsilon(1e-6));
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sol.x);
    CHECK(es.eigenvalues().minCoeff() >= -1e-7);
  }
}

TEST_CASE("problem validation") {
  SocpProblem p;
  p.n_vars = 2;
  p.objective = RVector::Zero(3);
  CHECK_THROWS_AS(p.validate(), ValidationError);

  SdpProblem q;
  q.dim = 2;
  q.objective = CMatrix::Zero(2, 2);
  q.objective(0, 1) = Complex(0, 1);  // not Hermitian (diagonal mirror missing)
  CHECK_THROWS_AS(q.validate(), ValidationError);
}

TEST_CASE("debug dumps are one constraint per line") {
  SocpProblem p;
  p.n_vars = 1;
  p.objective = RVector::Ones(1);
  p.cones.push_back(norm_le(RMatrix(0, 1), RVector(0), RVector::Ones(1), 0.0));
  const std::string text = dump(p);
  CHECK(text.find("minimize") != std::string::npos);
  CHECK(text.find("cone") != std::string::npos);
}
