#include <doctest.h>

#include <cmath>

#include "riscr/numerics.hpp"
#include "riscr/rng.hpp"

using namespace riscr;

namespace {

CMatrix random_psd(int n, Rng& rng, int rank = -1) {
  if (rank < 0) rank = n;
  CMatrix f(n, rank);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < rank; ++j) f(i, j) = rng.cnormal();
  }
  return f * f.adjoint();
}

}  // namespace

TEST_CASE("hermitian matrix validation") {
  CMatrix bad(2, 2);
  bad << Complex(1, 0), Complex(2, 1), Complex(2, 1), Complex(3, 0);
  CHECK_THROWS_AS(HermitianMatrix{bad}, ValidationError);

  CMatrix good(2, 2);
  good << Complex(1, 0), Complex(2, 1), Complex(2, -1), Complex(3, 0);
  CHECK_NOTHROW(HermitianMatrix{good});

  CHECK_THROWS_AS(HermitianMatrix{CMatrix(2, 3)}, ValidationError);
}

TEST_CASE("hermitian_eig diagonal case") {
  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 0) = 1;
  m(1, 1) = 3;
  m(2, 2) = 2;
  const auto ed = hermitian_eig(HermitianMatrix(m));
  CHECK(ed.eigenvalues[0] == doctest::Approx(3.0));
  CHECK(ed.eigenvalues[1] == doctest::Approx(2.0));
  CHECK(ed.eigenvalues[2] == doctest::Approx(1.0));
  CHECK(std::abs(ed.eigenvectors.col(0)[1]) == doctest::Approx(1.0));
  CHECK(std::abs(ed.eigenvectors.col(1)[2]) == doctest::Approx(1.0));
  CHECK(std::abs(ed.eigenvectors.col(2)[0]) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig symmetric 2x2") {
  CMatrix m(2, 2);
  m << 2, 1, 1, 2;
  const auto ed = hermitian_eig(HermitianMatrix(m));
  CHECK(ed.eigenvalues[0] == doctest::Approx(3.0));
  CHECK(ed.eigenvalues[1] == doctest::Approx(1.0));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(ed.eigenvectors.col(0)[0]) == doctest::Approx(inv_sqrt2));
  CHECK(std::abs(ed.eigenvectors.col(0)[1]) == doctest::Approx(inv_sqrt2));
}

TEST_CASE("hermitian_eig rank-one complex outer product") {
  CVector x(2);
  x << Complex(1, 0), Complex(0, 1);
  const auto ed = hermitian_eig(HermitianMatrix(x * x.adjoint()));
  CHECK(ed.eigenvalues[0] == doctest::Approx(2.0));
  CHECK(ed.eigenvalues[1] == doctest::Approx(0.0).epsilon(1e-12));
  // Leading eigenvector equals x/sqrt(2) up to a global phase.
  const Complex ip = (x.adjoint() * ed.eigenvectors.col(0))(0, 0);
  CHECK(std::abs(ip) == doctest::Approx(x.norm()));
}

TEST_CASE("eigendecomposition reconstruction and orthonormality on random PSD") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 7);
    const CMatrix m = random_psd(n, rng);
    const HermitianMatrix hm(m, 1e-9);
    const auto ed = hermitian_eig(hm);
    CMatrix rec = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      rec += ed.eigenvalues[i] * ed.eigenvectors.col(i) * ed.eigenvectors.col(i).adjoint();
    }
    CHECK((rec - hm.mat()).norm() <= 1e-9 * std::max(1.0, hm.mat().norm()));
    const CMatrix gram = ed.eigenvectors.adjoint() * ed.eigenvectors;
    CHECK((gram - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
    // Trace and spectral norm identities.
    CHECK(hm.trace() == doctest::Approx(ed.eigenvalues.sum()).epsilon(1e-9));
    CHECK(ed.eigenvalues.minCoeff() >= -1e-10 * std::max(1.0, hm.trace()));
  }
}

TEST_CASE("leading_rank_one basics") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  CHECK((leading_rank_one(HermitianMatrix(d)).mat() -
         (CMatrix(2, 2) << 1, 0, 0, 0).finished())
            .norm() <= 1e-12);

  CVector x(2);
  x << 1, 1;
  const CMatrix expected = 0.5 * (CMatrix(2, 2) << 1, 1, 1, 1).finished();
  CHECK((leading_rank_one(HermitianMatrix(x * x.adjoint())).mat() - expected).norm() <= 1e-12);

  // Degenerate spectrum: deterministic tie rule picks e1.
  const CMatrix id = CMatrix::Identity(2, 2);
  CHECK((leading_rank_one(HermitianMatrix(id)).mat() -
         (CMatrix(2, 2) << 1, 0, 0, 0).finished())
            .norm() <= 1e-12);
}

TEST_CASE("leading_rank_one subgradient properties") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 5);
    const HermitianMatrix m(random_psd(n, rng), 1e-9);
    const CMatrix y = leading_rank_one(m).mat();
    const auto ed = hermitian_eig(m);
    // Rank one, PSD, trace 1, <m, y> = lambda1.
    const auto yed = hermitian_eig(HermitianMatrix(y, 1e-9));
    CHECK(yed.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(std::abs(yed.eigenvalues.tail(n - 1).cwiseAbs().maxCoeff()) <= 1e-10);
    CHECK((m.mat() * y).trace().real() ==
          doctest::Approx(ed.eigenvalues[0]).epsilon(1e-9));
  }
}

TEST_CASE("spectral norm subgradient inequality on random PSD pairs") {
  // ||B||_2 >= ||A||_2 + <B - A, phi phi^H(A)> for the convex spectral norm.
  Rng rng(13);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 4);
    const HermitianMatrix a(random_psd(n, rng), 1e-9);
    const HermitianMatrix b(random_psd(n, rng), 1e-9);
    const CMatrix g = leading_rank_one(a).mat();
    const double na = hermitian_eig(a).eigenvalues[0];
    const double nb = hermitian_eig(b).eigenvalues[0];
    const double inner = ((b.mat() - a.mat()) * g).trace().real();
    CHECK(nb >= na + inner - 1e-9);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("rank_one_residual") {
  Rng rng(17);
  CVector x(3);
  x << Complex(0.3, -1.1), Complex(2.0, 0.4), Complex(-0.5, 0.2);
  CHECK(rank_one_residual(HermitianMatrix(x * x.adjoint(), 1e-9)) ==
        doctest::Approx(0.0).epsilon(1e-9));

  CHECK(rank_one_residual(HermitianMatrix(CMatrix::Identity(2, 2))) == doctest::Approx(1.0));

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  CHECK(rank_one_residual(HermitianMatrix(d)) == doctest::Approx(1.0));

  // Residual zero iff exactly one eigenvalue above 1e-9 * trace.
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 4);
    const int rank = 1 + static_cast<int>(rng.next_u64() % n);
    const HermitianMatrix m(random_psd(n, rng, rank), 1e-9);
    const auto ed = hermitian_eig(m);
    const int big = static_cast<int>((ed.eigenvalues.array() > 1e-9 * m.trace()).count());
    const double res = rank_one_residual(m);
    if (big == 1) {
      CHECK(res <= 1e-9 * m.trace());
    } else {
      CHECK(res > 1e-9 * m.trace());
    }
  }
}

TEST_CASE("rank_one_factor round trips and errors") {
  SUBCASE("real axis vector") {
    CVector x(2);
    x << 2, 0;
    const CVector v = rank_one_factor(HermitianMatrix(x * x.adjoint(), 1e-9), 1e-9);
    CHECK((v - x).norm() <= 1e-9);
  }
  SUBCASE("complex vector recovered up to phase, normalized first component") {
    CVector x(2);
    x << Complex(1, 0) / std::sqrt(2.0), Complex(0, 1) / std::sqrt(2.0);
    const CMatrix m = 4.0 * (x * x.adjoint());
    const CVector v = rank_one_factor(HermitianMatrix(m, 1e-9), 1e-9);
    CHECK(v.norm() == doctest::Approx(2.0));
    CHECK(std::abs((x.adjoint() * v)(0, 0)) == doctest::Approx(2.0 * x.norm()));
    CHECK(v[0].imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v[0].real() >= 0.0);
  }
  SUBCASE("identity rejected") {
    CHECK_THROWS_AS(rank_one_factor(HermitianMatrix(CMatrix::Identity(2, 2)), 1e-6),
                    NotRankOneError);
    try {
      rank_one_factor(HermitianMatrix(CMatrix::Identity(2, 2)), 1e-6);
    } catch (const NotRankOneError& e) {
      CHECK(e.residual == doctest::Approx(1.0));
    }
  }
  SUBCASE("factor of outer product preserves direction on random vectors") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + static_cast<int>(rng.next_u64() % 6);
      CVector x(n);
      for (int i = 0; i < n; ++i) x[i] = rng.cnormal();
      const CVector v = rank_one_factor(HermitianMatrix(x * x.adjoint(), 1e-9), 1e-8);
      CHECK(std::abs((x.adjoint() * v)(0, 0)) ==
            doctest::Approx(x.norm() * v.norm()).epsilon(1e-9));
      CHECK((v * v.adjoint() - x * x.adjoint()).norm() <= 1e-8 * x.squaredNorm() + 1e-12);
    }
  }
}

TEST_CASE("factor error bound for near-rank-one matrices") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_u64() % 4);
    CVector x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.cnormal();
    const double eps = 1e-8;
    const CMatrix m = x * x.adjoint() + eps * random_psd(n, rng);
    const HermitianMatrix hm(m, 1e-9);
    const double tol = rank_one_residual(hm) / hm.trace() + 1e-12;
    const CVector v = rank_one_factor(hm, tol * 1.01);
    const auto ed = hermitian_eig(hm);
    const double bound =
        std::sqrt(2.0 * tol * 1.01 * hm.trace() * ed.eigenvalues[0]) + 1e-9;
    CHECK((v * v.adjoint() - hm.mat()).norm() <= bound);
  }
}
