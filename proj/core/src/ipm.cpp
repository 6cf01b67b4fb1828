#include "riscr/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace riscr::ipm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int svec_len(int d) { return d * (d + 1) / 2; }

void smat(const double* v, int d, RMatrix& out) {
  out.resize(d, d);
  int idx = 0;
  const double inv_sqrt2 = 1.0 / M_SQRT2;
  for (int j = 0; j < d; ++j) {
    out(j, j) = v[idx++];
    for (int i = j + 1; i < d; ++i) {
      const double val = v[idx++] * inv_sqrt2;
      out(i, j) = val;
      out(j, i) = val;
    }
  }
}

void svec(const RMatrix& m, double* v) {
  const int d = static_cast<int>(m.rows());
  int idx = 0;
  for (int j = 0; j < d; ++j) {
    v[idx++] = m(j, j);
    for (int i = j + 1; i < d; ++i) {
      v[idx++] = 0.5 * (m(i, j) + m(j, i)) * M_SQRT2;
    }
  }
}

int ConeDims::vec_dim() const {
  int n = nonneg;
  for (int q : soc) n += q;
  for (int d : psd) n += svec_len(d);
  return n;
}

int ConeDims::degree() const {
  int deg = nonneg + static_cast<int>(soc.size());
  for (int d : psd) deg += d;
  return deg;
}

namespace {

struct SocScale {
  double eta = 1.0;
  RVector wbar;  // unit hyperbolic norm
};

struct PsdScale {
  RMatrix R, Rinv;
  RMatrix Winv2;  // Rinv' * Rinv; (W'W)^{-1} v = svec(Winv2 smat(v) Winv2)
  RVector lam;    // diagonal of the scaled point
};

struct Scaling {
  RVector lp_w;  // sqrt(s/z)
  std::vector<SocScale> soc;
  std::vector<PsdScale> psd;
  RVector lambda;  // scaled point, full cone vector
};

struct Layout {
  int lp_off = 0, lp_len = 0;
  std::vector<std::pair<int, int>> soc;      // (offset, len)
  std::vector<std::pair<int, int>> psd;      // (offset, matrix dim)
  int total = 0;
};

Layout make_layout(const ConeDims& dims) {
  Layout lay;
  int off = 0;
  lay.lp_off = off;
  lay.lp_len = dims.nonneg;
  off += dims.nonneg;
  for (int q : dims.soc) {
    lay.soc.emplace_back(off, q);
    off += q;
  }
  for (int d : dims.psd) {
    lay.psd.emplace_back(off, d);
    off += svec_len(d);
  }
  lay.total = off;
  return lay;
}

Scaling identity_scaling(const Layout& lay) {
  Scaling sc;
  sc.lp_w = RVector::Ones(lay.lp_len);
  for (const auto& [off, q] : lay.soc) {
    (void)off;
    SocScale s;
    s.eta = 1.0;
    s.wbar = RVector::Zero(q);
    s.wbar[0] = 1.0;
    sc.soc.push_back(std::move(s));
  }
  for (const auto& [off, d] : lay.psd) {
    (void)off;
    PsdScale p;
    p.R = RMatrix::Identity(d, d);
    p.Rinv = RMatrix::Identity(d, d);
    p.Winv2 = RMatrix::Identity(d, d);
    p.lam = RVector::Ones(d);
    sc.psd.push_back(std::move(p));
  }
  sc.lambda = RVector::Ones(lay.total);  // placeholder; unused before first update
  return sc;
}

// Nesterov-Todd scaling at (s, z); returns false if either point is not
// strictly interior.
bool compute_scaling(const RVector& s, const RVector& z, const Layout& lay, Scaling& sc) {
  sc.lambda.resize(lay.total);
  // LP block
  sc.lp_w.resize(lay.lp_len);
  for (int i = 0; i < lay.lp_len; ++i) {
    const double si = s[lay.lp_off + i], zi = z[lay.lp_off + i];
    if (si <= 0.0 || zi <= 0.0) return false;
    sc.lp_w[i] = std::sqrt(si / zi);
    sc.lambda[lay.lp_off + i] = std::sqrt(si * zi);
  }
  // SOC blocks
  sc.soc.resize(lay.soc.size());
  for (std::size_t k = 0; k < lay.soc.size(); ++k) {
    const auto [off, q] = lay.soc[k];
    const auto sb = s.segment(off, q);
    const auto zb = z.segment(off, q);
    const double s_res = sb[0] * sb[0] - sb.tail(q - 1).squaredNorm();
    const double z_res = zb[0] * zb[0] - zb.tail(q - 1).squaredNorm();
    if (s_res <= 0.0 || z_res <= 0.0 || sb[0] <= 0.0 || zb[0] <= 0.0) return false;
    const double gs = std::sqrt(s_res), gz = std::sqrt(z_res);
    RVector st = sb / gs, zt = zb / gz;
    double dot = st[0] * zt[0] + st.tail(q - 1).dot(zt.tail(q - 1));
    const double gamma = std::sqrt(0.5 * (1.0 + dot));
    SocScale& w = sc.soc[k];
    w.eta = std::sqrt(gs / gz);
    w.wbar.resize(q);
    w.wbar[0] = (st[0] + zt[0]) / (2.0 * gamma);
    w.wbar.tail(q - 1) = (st.tail(q - 1) - zt.tail(q - 1)) / (2.0 * gamma);
    // lambda = W z
    const double a = w.wbar.tail(q - 1).dot(zb.tail(q - 1));
    sc.lambda[off] = w.eta * (w.wbar[0] * zb[0] + a);
    sc.lambda.segment(off + 1, q - 1) =
        w.eta * (zb[0] * w.wbar.tail(q - 1) + zb.tail(q - 1) +
                 (a / (1.0 + w.wbar[0])) * w.wbar.tail(q - 1));
  }
  // PSD blocks
  sc.psd.resize(lay.psd.size());
  RMatrix S, Z;
  for (std::size_t k = 0; k < lay.psd.size(); ++k) {
    const auto [off, d] = lay.psd[k];
    smat(s.data() + off, d, S);
    smat(z.data() + off, d, Z);
    Eigen::LLT<RMatrix> lls(S);
    Eigen::LLT<RMatrix> llz(Z);
    if (lls.info() != Eigen::Success || llz.info() != Eigen::Success) return false;
    const RMatrix Ls = lls.matrixL();
    const RMatrix Lz = llz.matrixL();
    Eigen::JacobiSVD<RMatrix> svd(Lz.transpose() * Ls,
                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector sig = svd.singularValues();
    if (sig.minCoeff() <= 0.0) return false;
    PsdScale& p = sc.psd[k];
    const RVector isq = sig.cwiseSqrt().cwiseInverse();
    p.R = Ls * svd.matrixV() * isq.asDiagonal();
    p.Rinv = isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
    p.Winv2 = p.Rinv.transpose() * p.Rinv;
    p.lam = sig;
    // lambda block = svec(diag(sig))
    RMatrix lam_m = sig.asDiagonal();
    svec(lam_m, sc.lambda.data() + off);
  }
  return true;
}

// ---- cone-wise linear operators on full cone vectors ----

enum class Op { W, WT, WinvT, Winv2 };

void apply_soc(const SocScale& w, Op op, const double* in, double* out, int q) {
  Eigen::Map<const RVector> x(in, q);
  Eigen::Map<RVector> y(out, q);
  const auto w1 = w.wbar.tail(q - 1);
  auto apply_once = [&](const RVector& v, double sign, double scale) {
    RVector r(q);
    const double a = w1.dot(v.tail(q - 1));
    r[0] = scale * (w.wbar[0] * v[0] + sign * a);
    r.tail(q - 1) =
        scale * (sign * v[0] * w1 + v.tail(q - 1) + (a / (1.0 + w.wbar[0])) * w1);
    return r;
  };
  switch (op) {
    case Op::W:
    case Op::WT:
      y = apply_once(x, +1.0, w.eta);
      break;
    case Op::WinvT:
      y = apply_once(x, -1.0, 1.0 / w.eta);
      break;
    case Op::Winv2: {
      RVector t = apply_once(x, -1.0, 1.0 / w.eta);
      y = apply_once(t, -1.0, 1.0 / w.eta);
      break;
    }
  }
}

void apply_psd(const PsdScale& p, Op op, const double* in, double* out, int d) {
  RMatrix M;
  smat(in, d, M);
  RMatrix R;
  switch (op) {
    case Op::W:
      R = p.R.transpose() * M * p.R;
      break;
    case Op::WT:
      R = p.R * M * p.R.transpose();
      break;
    case Op::WinvT:
      R = p.Rinv * M * p.Rinv.transpose();
      break;
    case Op::Winv2:
      R = p.Winv2 * M * p.Winv2;
      break;
  }
  R = 0.5 * (R + R.transpose()).eval();
  svec(R, out);
}

void apply_op(const Scaling& sc, const Layout& lay, Op op, const RVector& in, RVector& out) {
  out.resize(lay.total);
  for (int i = 0; i < lay.lp_len; ++i) {
    const double w = sc.lp_w[i];
    double f = 1.0;
    switch (op) {
      case Op::W:
      case Op::WT:
        f = w;
        break;
      case Op::WinvT:
        f = 1.0 / w;
        break;
      case Op::Winv2:
        f = 1.0 / (w * w);
        break;
    }
    out[lay.lp_off + i] = f * in[lay.lp_off + i];
  }
  for (std::size_t k = 0; k < lay.soc.size(); ++k) {
    const auto [off, q] = lay.soc[k];
    apply_soc(sc.soc[k], op, in.data() + off, out.data() + off, q);
  }
  for (std::size_t k = 0; k < lay.psd.size(); ++k) {
    const auto [off, d] = lay.psd[k];
    apply_psd(sc.psd[k], op, in.data() + off, out.data() + off, d);
  }
}

// ---- Jordan algebra pieces ----

RVector cone_identity(const Layout& lay) {
  RVector e = RVector::Zero(lay.total);
  e.segment(lay.lp_off, lay.lp_len).setOnes();
  for (const auto& [off, q] : lay.soc) {
    (void)q;
    e[off] = 1.0;
  }
  for (const auto& [off, d] : lay.psd) {
    RMatrix I = RMatrix::Identity(d, d);
    svec(I, e.data() + off);
  }
  return e;
}

RVector jordan_mul(const Layout& lay, const RVector& u, const RVector& v) {
  RVector out(lay.total);
  for (int i = 0; i < lay.lp_len; ++i) {
    out[lay.lp_off + i] = u[lay.lp_off + i] * v[lay.lp_off + i];
  }
  for (const auto& [off, q] : lay.soc) {
    const auto ub = u.segment(off, q), vb = v.segment(off, q);
    out[off] = ub.dot(vb);
    out.segment(off + 1, q - 1) = ub[0] * vb.tail(q - 1) + vb[0] * ub.tail(q - 1);
  }
  RMatrix U, V;
  for (const auto& [off, d] : lay.psd) {
    smat(u.data() + off, d, U);
    smat(v.data() + off, d, V);
    RMatrix P = 0.5 * (U * V + V * U);
    svec(P, out.data() + off);
  }
  return out;
}

// Solves lambda o x = v for x at the current scaled point.
RVector jordan_div_lambda(const Layout& lay, const Scaling& sc, const RVector& v) {
  RVector out(lay.total);
  for (int i = 0; i < lay.lp_len; ++i) {
    out[lay.lp_off + i] = v[lay.lp_off + i] / sc.lambda[lay.lp_off + i];
  }
  for (std::size_t k = 0; k < lay.soc.size(); ++k) {
    const auto [off, q] = lay.soc[k];
    const auto lb = sc.lambda.segment(off, q);
    const auto vb = v.segment(off, q);
    const double det = lb[0] * lb[0] - lb.tail(q - 1).squaredNorm();
    const double x0 = (lb[0] * vb[0] - lb.tail(q - 1).dot(vb.tail(q - 1))) / det;
    out[off] = x0;
    out.segment(off + 1, q - 1) = (vb.tail(q - 1) - x0 * lb.tail(q - 1)) / lb[0];
  }
  RMatrix V;
  for (std::size_t k = 0; k < lay.psd.size(); ++k) {
    const auto [off, d] = lay.psd[k];
    smat(v.data() + off, d, V);
    const RVector& lam = sc.psd[k].lam;
    RMatrix X(d, d);
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < d; ++i) {
        X(i, j) = 2.0 * V(i, j) / (lam[i] + lam[j]);
      }
    }
    X = 0.5 * (X + X.transpose()).eval();
    svec(X, out.data() + off);
  }
  return out;
}

// Largest alpha with v + alpha dv staying in the cone (both in unscaled space).
double step_to_boundary(const Layout& lay, const RVector& v, const RVector& dv) {
  double alpha = kInf;
  for (int i = 0; i < lay.lp_len; ++i) {
    const double d = dv[lay.lp_off + i];
    if (d < 0.0) alpha = std::min(alpha, -v[lay.lp_off + i] / d);
  }
  for (const auto& [off, q] : lay.soc) {
    const auto vb = v.segment(off, q);
    const auto db = dv.segment(off, q);
    const double a = db[0] * db[0] - db.tail(q - 1).squaredNorm();
    const double b = 2.0 * (vb[0] * db[0] - vb.tail(q - 1).dot(db.tail(q - 1)));
    const double c = vb[0] * vb[0] - vb.tail(q - 1).squaredNorm();
    // c > 0 in the interior; find the smallest positive root of a t^2 + b t + c.
    double root = kInf;
    const double disc = b * b - 4.0 * a * c;
    if (std::abs(a) < 1e-14 * std::max(1.0, std::abs(b))) {
      if (b < 0.0) root = -c / b;
    } else if (a < 0.0) {
      root = (-b - std::sqrt(std::max(disc, 0.0))) / (2.0 * a);
    } else if (disc >= 0.0 && b < 0.0) {
      root = 2.0 * c / (-b + std::sqrt(disc));
    }
    if (root >= 0.0) alpha = std::min(alpha, root);
    // Keep the cone head nonnegative as well.
    if (db[0] < 0.0) alpha = std::min(alpha, -vb[0] / db[0]);
  }
  RMatrix V, D;
  for (const auto& [off, d] : lay.psd) {
    smat(v.data() + off, d, V);
    smat(dv.data() + off, d, D);
    Eigen::LLT<RMatrix> llt(V);
    if (llt.info() != Eigen::Success) {
      // Barely interior; regularize before factoring.
      RMatrix Vr = V + 1e-14 * std::max(1.0, V.trace()) * RMatrix::Identity(d, d);
      llt.compute(Vr);
      if (llt.info() != Eigen::Success) return 0.0;
    }
    const RMatrix L = llt.matrixL();
    RMatrix Mtmp = L.triangularView<Eigen::Lower>().solve(D);
    RMatrix M = L.triangularView<Eigen::Lower>().solve(Mtmp.transpose()).transpose();
    M = 0.5 * (M + M.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<RMatrix> es(M, Eigen::EigenvaluesOnly);
    const double emin = es.eigenvalues().minCoeff();
    if (emin < 0.0) alpha = std::min(alpha, -1.0 / emin);
  }
  return alpha;
}

// Most negative "eigenvalue" across cones, for the initial interior shift.
double min_eig(const Layout& lay, const RVector& v) {
  double me = kInf;
  for (int i = 0; i < lay.lp_len; ++i) me = std::min(me, v[lay.lp_off + i]);
  for (const auto& [off, q] : lay.soc) {
    me = std::min(me, v[off] - v.segment(off + 1, q - 1).norm());
  }
  RMatrix V;
  for (const auto& [off, d] : lay.psd) {
    smat(v.data() + off, d, V);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(V, Eigen::EigenvaluesOnly);
    me = std::min(me, es.eigenvalues().minCoeff());
  }
  if (lay.total == 0) me = 1.0;
  return me;
}

// ---- reduced KKT solver ----
//
//   [ 0   A'   G'  ] [dx]   [r1]
//   [ A   0    0   ] [dy] = [r2]
//   [ G   0  -W'W  ] [dz]   [r3]
//
// solved by eliminating dz through H = G'(W'W)^{-1}G, with iterative
// refinement against the unreduced system.
class KktSolver {
 public:
  KktSolver(const RMatrix& G, const RMatrix& A, const Layout& lay, int refine_steps)
      : G_(G), A_(A), lay_(lay), refine_(refine_steps) {}

  bool factor(const Scaling& sc) {
    sc_ = &sc;
    const int n = static_cast<int>(G_.cols());
    const int p = static_cast<int>(A_.rows());
    GW_.resize(G_.rows(), n);
    RVector col(G_.rows()), colw;
    for (int j = 0; j < n; ++j) {
      col = G_.col(j);
      apply_op(sc, lay_, Op::Winv2, col, colw);
      GW_.col(j) = colw;
    }
    RMatrix H = G_.transpose() * GW_;
    H = 0.5 * (H + H.transpose()).eval();
    double reg = 0.0;
    const double scale = 1.0 + H.diagonal().cwiseAbs().mean();
    for (int attempt = 0; attempt < 8; ++attempt) {
      llt_h_.compute(H + reg * RMatrix::Identity(n, n));
      if (llt_h_.info() == Eigen::Success) break;
      reg = reg == 0.0 ? 1e-13 * scale : reg * 100.0;
    }
    if (llt_h_.info() != Eigen::Success) return false;
    if (p > 0) {
      B_ = llt_h_.solve(A_.transpose());
      RMatrix S = A_ * B_;
      S = 0.5 * (S + S.transpose()).eval();
      double sreg = 0.0;
      const double sscale = 1.0 + S.diagonal().cwiseAbs().mean();
      for (int attempt = 0; attempt < 8; ++attempt) {
        llt_s_.compute(S + sreg * RMatrix::Identity(p, p));
        if (llt_s_.info() == Eigen::Success) break;
        sreg = sreg == 0.0 ? 1e-13 * sscale : sreg * 100.0;
      }
      if (llt_s_.info() != Eigen::Success) return false;
    }
    return true;
  }

  void solve(const RVector& r1, const RVector& r2, const RVector& r3, RVector& dx, RVector& dy,
             RVector& dz) const {
    raw_solve(r1, r2, r3, dx, dy, dz);
    RVector e1, e2, e3, cx, cy, cz;
    for (int it = 0; it < refine_; ++it) {
      residual(dx, dy, dz, r1, r2, r3, e1, e2, e3);
      const double err = e1.norm() + e2.norm() + e3.norm();
      const double rhs = 1.0 + r1.norm() + r2.norm() + r3.norm();
      if (err < 1e-14 * rhs) break;
      raw_solve(e1, e2, e3, cx, cy, cz);
      dx += cx;
      if (dy.size() > 0) dy += cy;
      dz += cz;
    }
  }

 private:
  void raw_solve(const RVector& r1, const RVector& r2, const RVector& r3, RVector& dx,
                 RVector& dy, RVector& dz) const {
    RVector t3;
    apply_op(*sc_, lay_, Op::Winv2, r3, t3);
    const RVector rhs1 = r1 + G_.transpose() * t3;
    const int p = static_cast<int>(A_.rows());
    if (p > 0) {
      const RVector u = llt_h_.solve(rhs1);
      dy = llt_s_.solve(A_ * u - r2);
      dx = u - B_ * dy;
    } else {
      dy.resize(0);
      dx = llt_h_.solve(rhs1);
    }
    RVector gx = G_ * dx - r3;
    apply_op(*sc_, lay_, Op::Winv2, gx, dz);
  }

  void residual(const RVector& dx, const RVector& dy, const RVector& dz, const RVector& r1,
                const RVector& r2, const RVector& r3, RVector& e1, RVector& e2,
                RVector& e3) const {
    RVector wz, wwz;
    apply_op(*sc_, lay_, Op::W, dz, wz);
    apply_op(*sc_, lay_, Op::WT, wz, wwz);
    e1 = r1 - G_.transpose() * dz;
    if (dy.size() > 0) e1 -= A_.transpose() * dy;
    e2 = r2 - A_ * dx;
    e3 = r3 - (G_ * dx - wwz);
  }

  const RMatrix& G_;
  const RMatrix& A_;
  Layout lay_;
  int refine_;
  const Scaling* sc_ = nullptr;
  RMatrix GW_, B_;
  Eigen::LLT<RMatrix> llt_h_;
  Eigen::LLT<RMatrix> llt_s_;
};

}  // namespace

Result solve(const RVector& c, const RMatrix& G, const RVector& h, const RMatrix& A,
             const RVector& b, const ConeDims& dims, const Options& opts) {
  const int n = static_cast<int>(c.size());
  const int p = static_cast<int>(A.rows());
  const int m = dims.vec_dim();
  if (G.rows() != m || G.cols() != n || h.size() != m || (p > 0 && A.cols() != n) ||
      b.size() != p) {
    throw ValidationError("ipm::solve: inconsistent problem dimensions");
  }
  const Layout lay = make_layout(dims);
  const double deg = dims.degree() + 1;

  Result res;
  res.x = RVector::Zero(n);
  res.y = RVector::Zero(p);
  res.z = RVector::Zero(m);
  res.s = RVector::Zero(m);

  KktSolver kkt(G, A, lay, opts.refine_steps);
  Scaling sc = identity_scaling(lay);
  if (!kkt.factor(sc)) {
    res.code = ExitCode::NumericalTrouble;
    return res;
  }

  // Initial point: least-squares primal/dual solves, shifted into the cone.
  RVector x, y, z, s, dx, dy, dz;
  {
    RVector zero_n = RVector::Zero(n);
    kkt.solve(zero_n, b, h, x, y, dz);
    s = -(G * x - h);
    kkt.solve(-c, RVector::Zero(p), RVector::Zero(m), dx, y, z);
    const double ts = -min_eig(lay, s);
    if (ts >= -1e-8 * std::max(1.0, s.norm())) {
      s += (1.0 + ts) * cone_identity(lay);
    }
    const double tz = -min_eig(lay, z);
    if (tz >= -1e-8 * std::max(1.0, z.norm())) {
      z += (1.0 + tz) * cone_identity(lay);
    }
  }
  double tau = 1.0, kappa = 1.0;

  const double resx0 = std::max(1.0, c.norm());
  const double resy0 = std::max(1.0, b.norm());
  const double resz0 = std::max(1.0, h.norm());

  double mu = (s.dot(z) + tau * kappa) / deg;

  RVector rx(n), ry(p), rz(m);
  RVector d1x, d1y, d1z, d2x, d2y, d2z;
  RVector lam_div, wt_part, ds_aff(m), dz_aff(m), corr, e = cone_identity(lay);

  for (int iter = 0; iter <= opts.max_iters; ++iter) {
    // Residuals of the self-dual system.
    rx = G.transpose() * z + c * tau;
    if (p > 0) rx += A.transpose() * y;
    ry = p > 0 ? RVector(A * x - b * tau) : RVector(0);
    rz = G * x + s - h * tau;
    const double rt = kappa + c.dot(x) + (p > 0 ? b.dot(y) : 0.0) + h.dot(z);

    const double pcost = c.dot(x) / tau;
    const double dcost = -((p > 0 ? b.dot(y) : 0.0) + h.dot(z)) / tau;
    const double gap = s.dot(z) / (tau * tau);
    double relgap = kInf;
    if (pcost < 0.0) {
      relgap = gap / (-pcost);
    } else if (dcost > 0.0) {
      relgap = gap / dcost;
    }
    const double pres = std::max(p > 0 ? ry.norm() / resy0 : 0.0, rz.norm() / resz0) / tau;
    const double dres = rx.norm() / resx0 / tau;

    res.iterations = iter;
    res.primal_obj = pcost;
    res.dual_obj = dcost;
    res.gap = gap;
    res.relgap = relgap;
    res.pres = pres;
    res.dres = dres;

    if (pres <= opts.feastol && dres <= opts.feastol &&
        (gap <= opts.abstol || relgap <= opts.reltol)) {
      res.code = ExitCode::Optimal;
      res.x = x / tau;
      res.y = y / tau;
      res.z = z / tau;
      res.s = s / tau;
      res.tau = tau;
      res.kappa = kappa;
      return res;
    }
    // Infeasibility certificates.
    const double hzby = -((p > 0 ? b.dot(y) : 0.0) + h.dot(z));
    if (hzby > 0.0) {
      RVector dual_res = G.transpose() * z;
      if (p > 0) dual_res += A.transpose() * y;
      if (dual_res.norm() / resx0 / hzby <= opts.feastol) {
        res.code = ExitCode::PrimalInfeasible;
        res.y = y / hzby;
        res.z = z / hzby;
        res.x.setZero();
        res.s.setZero();
        return res;
      }
    }
    const double mcx = -c.dot(x);
    if (mcx > 0.0) {
      const double unb1 = p > 0 ? (A * x).norm() / resy0 : 0.0;
      const double unb2 = (G * x + s).norm() / resz0;
      if (std::max(unb1, unb2) / mcx <= opts.feastol) {
        res.code = ExitCode::DualInfeasible;
        res.x = x / mcx;
        res.s = s / mcx;
        res.y.setZero();
        res.z.setZero();
        return res;
      }
    }
    if (iter == opts.max_iters) break;

    if (!compute_scaling(s, z, lay, sc) || !kkt.factor(sc)) {
      res.code = ExitCode::NumericalTrouble;
      res.x = x / tau;
      res.y = y / tau;
      res.z = z / tau;
      res.s = s / tau;
      return res;
    }

    // Direction proportional to tau (reused by both predictor and corrector).
    kkt.solve(-c, b, h, d1x, d1y, d1z);
    const double cbh1 =
        c.dot(d1x) + (p > 0 ? b.dot(d1y) : 0.0) + h.dot(d1z);

    auto compute_direction = [&](double resid_scale, const RVector& ds_target, double dtk_target,
                                 RVector& ox, RVector& oy, RVector& oz, RVector& os, double& otau,
                                 double& okappa) {
      lam_div = jordan_div_lambda(lay, sc, ds_target);
      apply_op(sc, lay, Op::WT, lam_div, wt_part);
      kkt.solve(-resid_scale * rx, -resid_scale * ry, -resid_scale * rz - wt_part, d2x, d2y, d2z);
      const double cbh2 = c.dot(d2x) + (p > 0 ? b.dot(d2y) : 0.0) + h.dot(d2z);
      otau = (-resid_scale * rt - cbh2 - dtk_target / tau) / (cbh1 - kappa / tau);
      ox = d2x + otau * d1x;
      oy = p > 0 ? RVector(d2y + otau * d1y) : RVector(0);
      oz = d2z + otau * d1z;
      RVector wdz, wwdz;
      apply_op(sc, lay, Op::W, oz, wdz);
      apply_op(sc, lay, Op::WT, wdz, wwdz);
      os = wt_part - wwdz;
      okappa = (dtk_target - kappa * otau) / tau;
    };

    // Predictor (affine) direction.
    RVector lam_sq = jordan_mul(lay, sc.lambda, sc.lambda);
    RVector dxa, dya, dza, dsa;
    double dtaua, dkappaa;
    compute_direction(1.0, RVector(-lam_sq), -tau * kappa, dxa, dya, dza, dsa, dtaua, dkappaa);

    double alpha = step_to_boundary(lay, s, dsa);
    alpha = std::min(alpha, step_to_boundary(lay, z, dza));
    if (dtaua < 0.0) alpha = std::min(alpha, -tau / dtaua);
    if (dkappaa < 0.0) alpha = std::min(alpha, -kappa / dkappaa);
    alpha = std::min(alpha, 1.0);

    const double mu_aff = ((s + alpha * dsa).dot(z + alpha * dza) +
                           (tau + alpha * dtaua) * (kappa + alpha * dkappaa)) /
                          deg;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector (combined) direction.
    apply_op(sc, lay, Op::WinvT, dsa, ds_aff);
    apply_op(sc, lay, Op::W, dza, dz_aff);
    corr = jordan_mul(lay, ds_aff, dz_aff);
    RVector ds_target = -lam_sq - corr + sigma * mu * e;
    const double dtk_target = -tau * kappa - dtaua * dkappaa + sigma * mu;

    RVector dxc, dyc, dzc, dsc;
    double dtauc, dkappac;
    compute_direction(1.0 - sigma, ds_target, dtk_target, dxc, dyc, dzc, dsc, dtauc, dkappac);

    double step = step_to_boundary(lay, s, dsc);
    step = std::min(step, step_to_boundary(lay, z, dzc));
    if (dtauc < 0.0) step = std::min(step, -tau / dtauc);
    if (dkappac < 0.0) step = std::min(step, -kappa / dkappac);
    step = std::min(1.0, opts.step_fraction * step);
    if (step < opts.min_step) {
      res.code = ExitCode::NumericalTrouble;
      res.x = x / tau;
      res.y = y / tau;
      res.z = z / tau;
      res.s = s / tau;
      return res;
    }

    x += step * dxc;
    if (p > 0) y += step * dyc;
    z += step * dzc;
    s += step * dsc;
    tau += step * dtauc;
    kappa += step * dkappac;
    mu = (s.dot(z) + tau * kappa) / deg;
  }

  res.code = ExitCode::IterationLimit;
  res.x = x / tau;
  res.y = y / tau;
  res.z = z / tau;
  res.s = s / tau;
  res.tau = tau;
  res.kappa = kappa;
  return res;
}

}  // namespace riscr::ipm
