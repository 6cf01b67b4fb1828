#pragma once

#include <vector>

#include "riscr/types.hpp"

namespace riscr::ipm {

/// Cone product R^l_+ x Q^{q_1} x ... x S^{d_1}_+ x ... ; PSD blocks are
/// given by matrix dimension d and occupy d(d+1)/2 svec coordinates.
struct ConeDims {
  int nonneg = 0;
  std::vector<int> soc;
  std::vector<int> psd;

  int vec_dim() const;
  int degree() const;  // l + #soc + sum of psd dims
};

struct Options {
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  int max_iters = 100;
  int refine_steps = 2;
  double step_fraction = 0.99;
  double min_step = 1e-9;
};

enum class ExitCode { Optimal, PrimalInfeasible, DualInfeasible, IterationLimit, NumericalTrouble };

struct Result {
  ExitCode code = ExitCode::NumericalTrouble;
  RVector x, y, z, s;  // scaled by 1/tau on exit; certificates are normalized
  double tau = 0, kappa = 0;
  double primal_obj = 0, dual_obj = 0;
  double gap = 0, relgap = 0, pres = 0, dres = 0;
  int iterations = 0;
};

/// Solves   min c'x  s.t.  A x = b,  G x + s = h,  s in K
/// with a homogeneous self-dual embedding, Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector, using dense linear algebra throughout.
/// Infeasibility and unboundedness are certified through the embedding.
Result solve(const RVector& c, const RMatrix& G, const RVector& h, const RMatrix& A,
             const RVector& b, const ConeDims& dims, const Options& opts = {});

/// svec/smat with the sqrt(2) off-diagonal convention, so that
/// <svec(X), svec(Y)> = <X, Y>_F for symmetric X, Y.
int svec_len(int d);
void smat(const double* v, int d, RMatrix& out);
void svec(const RMatrix& m, double* v);

}  // namespace riscr::ipm
