#pragma once

#include <string>
#include <vector>

#include "riscr/types.hpp"

namespace riscr {

enum class SolveStatusCode { Optimal, Infeasible, IterationLimit, NumericalTrouble };

const char* to_string(SolveStatusCode code);

struct SolveStatus {
  SolveStatusCode code = SolveStatusCode::NumericalTrouble;
  double primal_residual = 0.0;
  double objective = 0.0;
  int iterations = 0;
};

/// ||A x + b|| <= c'x + d over real variables x.
struct SocConstraint {
  RMatrix a;
  RVector b;
  RVector c;
  double d = 0.0;
};

/// a'x = b.
struct LinearEquality {
  RVector a;
  double b = 0.0;
};

struct SocpProblem {
  int n_vars = 0;
  RVector objective;  // minimize objective' x
  std::vector<SocConstraint> cones;
  std::vector<LinearEquality> equalities;

  void validate() const;
};

struct SocpSolution {
  SolveStatus status;
  RVector x;
};

enum class ConstraintSense { LessEqual, Equal };

/// <a, X> sense bound for a Hermitian coefficient matrix a, where
/// <a, X> = Re tr(a^H X).
struct SdpConstraint {
  CMatrix a;
  double bound = 0.0;
  ConstraintSense sense = ConstraintSense::LessEqual;
};

/// minimize <objective, X>  s.t.  constraints, X Hermitian PSD.
struct SdpProblem {
  int dim = 0;
  CMatrix objective;
  std::vector<SdpConstraint> constraints;

  void validate() const;
};

struct SdpSolution {
  SolveStatus status;
  CMatrix x;  // Hermitian
};

/// Interior-point solve of an SOCP. On Optimal all cone constraints hold
/// within tol and the objective is within tol of the optimum.
SocpSolution solve_socp(const SocpProblem& p, double tol = 1e-8);

/// Interior-point solve of a Hermitian SDP via the real symmetric embedding;
/// the (M+1)-dim complex problem is solved through its Lagrangian dual, so
/// per-iteration cost scales with the number of scalar constraints.
SdpSolution solve_sdp(const SdpProblem& p, double tol = 1e-8);

/// [[Re X, -Im X], [Im X, Re X]]: PSD iff X is; doubles inner products,
/// i.e. <embed(A), embed(X)> = 2 <A, X>.
RMatrix embed_hermitian(const CMatrix& x);

/// Projects a 2n x 2n real symmetric matrix back onto the embedding image and
/// returns the Hermitian n x n preimage.
CMatrix unembed_hermitian(const RMatrix& y);

/// Human-readable dump: objective line, then one constraint per line.
std::string dump(const SocpProblem& p);
std::string dump(const SdpProblem& p);

}  // namespace riscr
