#include "riscr/numerics.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace riscr {

HermitianMatrix::HermitianMatrix(CMatrix m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ValidationError("HermitianMatrix: matrix must be square and nonempty");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double err = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (err > tol * std::max(1.0, scale)) {
    throw ValidationError("HermitianMatrix: not Hermitian, max asymmetry " + std::to_string(err));
  }
  mat_ = 0.5 * (m + m.adjoint());
  mat_.diagonal() = mat_.diagonal().real().cast<Complex>();
}

NotRankOneError::NotRankOneError(double residual_)
    : std::runtime_error("matrix is not rank-one within tolerance, residual " +
                         std::to_string(residual_)),
      residual(residual_) {}

EigenDecomposition hermitian_eig(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m.mat());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eig: eigensolver failed to converge");
  }
  EigenDecomposition out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = es.eigenvectors().rowwise().reverse();
  return out;
}

namespace {

// Index of the first component with modulus above the phase threshold.
Eigen::Index first_significant(const CVector& v, double thresh = 1e-9) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > thresh) return i;
  }
  return v.size() - 1;
}

// Rotate the global phase so component idx is real nonnegative.
CVector phase_normalized(const CVector& v, Eigen::Index idx) {
  const Complex pivot = v[idx];
  const double mag = std::abs(pivot);
  if (mag <= 0.0) return v;
  return v * (std::conj(pivot) / mag);
}

}  // namespace

HermitianMatrix leading_rank_one(const HermitianMatrix& m) {
  const EigenDecomposition ed = hermitian_eig(m);
  const double lam1 = ed.eigenvalues[0];
  const double tie_tol = 1e-10 * std::max(std::abs(lam1), 1e-300);

  Eigen::Index best = 0;
  Eigen::Index best_first = first_significant(ed.eigenvectors.col(0));
  double best_mod = std::abs(ed.eigenvectors.col(0)[best_first]);
  for (Eigen::Index i = 1; i < ed.eigenvalues.size(); ++i) {
    if (lam1 - ed.eigenvalues[i] > tie_tol) break;
    const Eigen::Index fi = first_significant(ed.eigenvectors.col(i));
    const double mod = std::abs(ed.eigenvectors.col(i)[fi]);
    if (mod > best_mod + 1e-15 || (std::abs(mod - best_mod) <= 1e-15 && fi < best_first)) {
      best = i;
      best_first = fi;
      best_mod = mod;
    }
  }

  const CVector phi = phase_normalized(ed.eigenvectors.col(best), best_first);
  return HermitianMatrix(phi * phi.adjoint(), 1e-9);
}

double rank_one_residual(const HermitianMatrix& m) {
  const EigenDecomposition ed = hermitian_eig(m);
  return m.trace() - ed.eigenvalues[0];
}

CVector rank_one_factor(const HermitianMatrix& m, double tol) {
  const EigenDecomposition ed = hermitian_eig(m);
  const double trace = m.trace();
  double lam1 = ed.eigenvalues[0];
  const double residual = trace - lam1;
  if (residual > tol * trace) {
    throw NotRankOneError(residual);
  }
  // Interior-point iterates can carry slightly negative spectra; clamp.
  if (lam1 < 0.0) lam1 = 0.0;
  CVector v = std::sqrt(lam1) * ed.eigenvectors.col(0);
  return phase_normalized(v, first_significant(v));
}

}  // namespace riscr
