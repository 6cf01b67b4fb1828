#pragma once

#include <stdexcept>

#include "riscr/types.hpp"

namespace riscr {

/// Square complex matrix validated to be Hermitian: entries(i,j) == conj(entries(j,i))
/// within 1e-12 absolute and a real diagonal. Construction symmetrizes the
/// stored copy so downstream algebra sees an exactly Hermitian matrix.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(CMatrix m, double tol = 1e-12);

  const CMatrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }
  double trace() const { return mat_.trace().real(); }

 private:
  CMatrix mat_;
};

/// Eigenvalues sorted descending; eigenvector column i pairs with eigenvalue i.
struct EigenDecomposition {
  RVector eigenvalues;
  CMatrix eigenvectors;
};

struct NotRankOneError : std::runtime_error {
  explicit NotRankOneError(double residual_);
  double residual;
};

/// Full eigendecomposition of a Hermitian matrix, eigenvalues descending.
EigenDecomposition hermitian_eig(const HermitianMatrix& m);

/// phi1 * phi1^H for the unit eigenvector phi1 of the largest eigenvalue; a
/// subgradient of the spectral norm at m. Ties within 1e-10 * lambda1 are
/// broken deterministically: among tied eigenvectors pick the one whose first
/// component above 1e-9 in modulus is largest (earlier index wins ties), then
/// rotate the global phase so that component is real positive.
HermitianMatrix leading_rank_one(const HermitianMatrix& m);

/// Tr(m) - ||m||_2. Zero (within tolerance) exactly when a PSD m with
/// positive trace is rank one.
double rank_one_residual(const HermitianMatrix& m);

/// Factor v with v v^H ~= m for a near-rank-one PSD m; throws NotRankOneError
/// when rank_one_residual(m) > tol * Tr(m). v = sqrt(lambda1) * phi1 with the
/// first component of modulus > 1e-9 rotated to be real nonnegative.
CVector rank_one_factor(const HermitianMatrix& m, double tol);

}  // namespace riscr
