#include <timps/llt.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace timps {

namespace {

void check_3x3(const CMat& b, const char* who) {
  if (b.rows() != 3 || b.cols() != 3)
    throw ValidationError(std::string(who) + ": b must be 3x3");
}

// scale reference for the (T, v, offsets) data of one member
double inv_scale(const LltInvariants& inv) {
  return 1.0 + std::abs(inv.b00) + std::abs(inv.b10) + inv.T.norm();
}

bool v_is_zero(const LltInvariants& inv, double tol) {
  return inv.v.norm() <= tol * inv_scale(inv);
}

bool jordan_valid(const LltInvariants& inv) {
  // compute_T_v leaves scale = 0 when T is singular (det b = 0)
  return inv.jordan.scale != cplx(0.0);
}

bool tv_parallel(const LltInvariants& inv, double tol) {
  CVec tv = inv.T * inv.v;
  cplx lam = inv.v.dot(tv) / inv.v.squaredNorm();
  return (tv - lam * inv.v).norm() <=
         std::max(tol, 1e-12) * std::max(1.0, inv.T.norm()) * inv.v.norm();
}

Box classify_box(const LltInvariants& inv, double tol) {
  bool vz = v_is_zero(inv, tol);
  bool diag = inv.jordan.diagonalizable;
  bool torsion = inv.m.has_value();
  if (vz) return diag ? (torsion ? Box::I : Box::III) : Box::IIa;
  if (!diag) return tv_parallel(inv, tol) ? Box::IIb : Box::V;
  if (!torsion) return Box::VI;
  if (tv_parallel(inv, tol)) return Box::IV;
  return *inv.m == 2 ? Box::VII : Box::VIII;
}

// rep-level virtual completion of a qubit operator g on the LLT representative:
//   sum_j g_ij x Abar^j y = Abar^i  exactly (scale 1 for every invertible g)
void rep_xy(const CMat& g, CMat& x, CMat& y) {
  cplx det = g.determinant();
  cplx al = g(0, 0), be = g(0, 1), ga = g(1, 0), de = g(1, 1);
  x = CMat::Zero(3, 3);
  y = CMat::Zero(3, 3);
  x(0, 0) = det;
  x(1, 1) = al;
  x(1, 2) = -be;
  x(2, 1) = -ga;
  x(2, 2) = de;
  y(0, 0) = al;
  y(0, 1) = -ga;
  y(1, 0) = -be;
  y(1, 1) = de;
  y(2, 2) = det;
  x /= det;
  y /= det;
}

// the representative's stabilizer pair: B(p) Abar^j C(p) = Abar^j for
// p = (B01, B02, B11); C is the inverse-like completion, K = C^{-1}
CMat stab_B(const cplx& b01, const cplx& b02, const cplx& b11) {
  CMat m = CMat::Zero(3, 3);
  m(0, 0) = 1;
  m(0, 1) = b01;
  m(0, 2) = b02;
  m(1, 1) = b11;
  m(2, 2) = b11;
  return m;
}

CMat stab_C(const cplx& b01, const cplx& b02, const cplx& b11) {
  CMat m = CMat::Zero(3, 3);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(0, 2) = -b01 / b11;
  m(1, 2) = -b02 / b11;
  m(2, 2) = 1.0 / b11;
  return m;
}

// K(r) = r0*(E00+E11) + r1*E02 + r2*E12 + r3*E22, the C^{-1} family, linear in r
CMat stab_K(const CVec& r) {
  CMat m = CMat::Zero(3, 3);
  m(0, 0) = r(0);
  m(1, 1) = r(0);
  m(0, 2) = r(1);
  m(1, 2) = r(2);
  m(2, 2) = r(3);
  return m;
}

cplx csqrt(const cplx& z) { return std::sqrt(z); }

// flip sign so that Re > 0, or Re = 0 and Im > 0 (deterministic half-plane)
bool needs_sign_flip(const cplx& z) {
  double eps = 1e-9 * std::abs(z);
  if (z.real() < -eps) return true;
  if (std::abs(z.real()) <= eps && z.imag() < 0) return true;
  return false;
}

// chained link solve shared by llt_cycle_spec / llt_transport_cycle: find the
// stabilizer data r_k with  C(r_k) y(g_k) b x(g_{k+1}) B(r_{k+1}) = nu_k c.
std::optional<CycleSpec> solve_chain(const CMat& b, const CMat& c,
                                     const std::vector<CMat>& gs, double tol) {
  const int n = static_cast<int>(gs.size());
  if (n == 0) throw ValidationError("llt cycle solve: empty operator list");
  check_3x3(b, "llt cycle solve");
  check_3x3(c, "llt cycle solve");
  double bs = b.cwiseAbs().maxCoeff(), cs = c.cwiseAbs().maxCoeff();
  if (bs == 0 || cs == 0 || std::abs(b.determinant()) <= 1e-12 * bs * bs * bs ||
      std::abs(c.determinant()) <= 1e-12 * cs * cs * cs)
    throw ValidationError("llt cycle solve: singular family member");

  std::vector<CMat> xg(static_cast<std::size_t>(n)), yg(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const CMat& g = gs[static_cast<std::size_t>(k)];
    if (g.rows() != 2 || g.cols() != 2)
      throw ValidationError("llt cycle solve: qubit ops must be 2x2");
    double gn = g.norm();
    if (gn == 0 || std::abs(g.determinant()) <= 1e-12 * gn * gn) return std::nullopt;
    rep_xy(g, xg[static_cast<std::size_t>(k)], yg[static_cast<std::size_t>(k)]);
  }

  // per-link transfer r_{k+1} = pinv(VB_k) VK_k r_k  (projective; LS residuals
  // are re-checked on the final chain, so rank deficiencies only cost retries)
  auto vec9 = [](const CMat& m) {
    CVec v(9);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) v(3 * j + i) = m(i, j);
    return v;
  };
  std::vector<CMat> L(static_cast<std::size_t>(n)), VBL(static_cast<std::size_t>(n)),
      VKs(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    CMat M = yg[static_cast<std::size_t>(k)] * b * xg[static_cast<std::size_t>((k + 1) % n)];
    CMat VB(9, 4), VK(9, 4);
    for (int j = 0; j < 4; ++j) {
      CVec e = CVec::Zero(4);
      e(j) = 1;
      CMat Bj = CMat::Zero(3, 3);  // basis of the B(r) family
      if (j == 0) Bj(0, 0) = 1;
      if (j == 1) Bj(0, 1) = 1;
      if (j == 2) Bj(0, 2) = 1;
      if (j == 3) {
        Bj(1, 1) = 1;
        Bj(2, 2) = 1;
      }
      VB.col(j) = vec9(M * Bj);
      VK.col(j) = vec9(stab_K(e) * c);
    }
    Eigen::JacobiSVD<CMat> svd(VB, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    L[static_cast<std::size_t>(k)] = svd.solve(VK);
    VBL[static_cast<std::size_t>(k)] = VB * L[static_cast<std::size_t>(k)];
    VKs[static_cast<std::size_t>(k)] = VK;
  }

  // prefix_k = L_{k-1} ... L_0 carries r_0 to site k; after absorbing the nu's
  // into the scale of r, every link must satisfy (VB_k L_k - VK_k) prefix_k r = 0
  // and closure means r is an eigenvector of the full loop map F = prefix_n.
  std::vector<CMat> prefix(static_cast<std::size_t>(n) + 1);
  prefix[0] = CMat::Identity(4, 4);
  for (int k = 0; k < n; ++k)
    prefix[static_cast<std::size_t>(k) + 1] =
        L[static_cast<std::size_t>(k)] * prefix[static_cast<std::size_t>(k)];
  const CMat& F = prefix[static_cast<std::size_t>(n)];
  CMat consist(9 * n, 4);
  for (int k = 0; k < n; ++k) {
    CMat lhs = VBL[static_cast<std::size_t>(k)] * prefix[static_cast<std::size_t>(k)];
    CMat rhs = VKs[static_cast<std::size_t>(k)] * prefix[static_cast<std::size_t>(k)];
    // scale by the link magnitude, not the residual norm: an identically
    // satisfied link must contribute ~zero rows, not normalized noise
    double den = std::max(lhs.norm() + rhs.norm(), 1e-300);
    consist.block(9 * k, 0, 9, 4) = (lhs - rhs) / den;
  }

  // one linear solve per distinct closure eigenvalue handles degenerate
  // eigenspaces exactly (only a subspace of them satisfies the link conditions)
  Eigen::ComplexEigenSolver<CMat> es(F);
  std::vector<CVec> cands;
  std::vector<cplx> seen;
  for (int i = 0; i < 4; ++i) {
    cplx lam = es.eigenvalues()(i);
    bool dup = false;
    for (const cplx& s : seen)
      if (std::abs(s - lam) <= 1e-9 * std::max(1.0, std::abs(s))) dup = true;
    if (dup) continue;
    seen.push_back(lam);
    CMat sys(9 * n + 4, 4);
    sys.topRows(9 * n) = consist;
    CMat cl = F - lam * CMat::Identity(4, 4);
    double cn = cl.norm();
    if (cn > 1e-300) cl /= cn;
    sys.bottomRows(4) = cl;
    CMat ns = nullspace(sys, 1e-8);
    for (int j = 0; j < ns.cols(); ++j) cands.push_back(ns.col(j));
    if (ns.cols() > 1) {
      CVec sum = CVec::Zero(4);
      for (int j = 0; j < ns.cols(); ++j) sum += ns.col(j);
      cands.push_back(sum.normalized());
      cands.push_back((ns.col(0) + cplx(0.37, 0.41) * ns.col(1)).normalized());
    }
  }

  const CMat cinv = c.inverse();
  auto try_r0 = [&](const CVec& r0) -> std::optional<CycleSpec> {
    if (r0.norm() <= 0) return std::nullopt;
    std::vector<CVec> r(static_cast<std::size_t>(n));
    r[0] = r0;
    for (int k = 0; k + 1 < n; ++k)
      r[static_cast<std::size_t>(k) + 1] = L[static_cast<std::size_t>(k)] * r[static_cast<std::size_t>(k)];
    // stabiliser data must stay nondegenerate at every site
    for (int k = 0; k < n; ++k) {
      double mx = r[static_cast<std::size_t>(k)].norm();
      if (mx <= 0) return std::nullopt;
      if (std::abs(r[static_cast<std::size_t>(k)](0)) < 1e-7 * mx) return std::nullopt;
      if (std::abs(r[static_cast<std::size_t>(k)](3)) < 1e-7 * mx) return std::nullopt;
    }
    CycleSpec spec;
    spec.physical_ops = gs;
    spec.virtual_ops.resize(static_cast<std::size_t>(n));
    spec.diag_params.resize(static_cast<std::size_t>(n));
    spec.scales.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      CVec p = r[static_cast<std::size_t>(k)] / r[static_cast<std::size_t>(k)](0);
      CMat B = stab_B(p(1), p(2), p(3));
      spec.diag_params[static_cast<std::size_t>(k)] = B;
      spec.virtual_ops[static_cast<std::size_t>(k)] = {
          xg[static_cast<std::size_t>(k)] * B,
          stab_C(p(1), p(2), p(3)) * yg[static_cast<std::size_t>(k)]};
    }
    for (int k = 0; k < n; ++k) {
      CMat lhs = spec.virtual_ops[static_cast<std::size_t>(k)].second * b *
                 spec.virtual_ops[static_cast<std::size_t>((k + 1) % n)].first;
      cplx nu = (cinv * lhs).trace() / 3.0;
      double den = std::max(lhs.norm(), (nu * c).norm());
      if (den <= 0 || std::abs(nu) < 1e-12) return std::nullopt;
      if ((lhs - nu * c).norm() > 20 * tol * den) return std::nullopt;
      spec.scales[static_cast<std::size_t>(k)] = nu;
    }
    return spec;
  };

  for (const CVec& cand : cands) {
    auto s = try_r0(cand);
    if (s) return s;
  }
  return std::nullopt;
}

CMat det1(const CMat& g) { return g / csqrt(g.determinant()); }

// det-1 SL(2) element from three free parameters, kept away from the
// singular slice of the chart
CMat sl2_from_params(const std::vector<cplx>& p) {
  cplx a = 1.0 + (p.size() > 0 ? p[0] : cplx(0));
  if (std::abs(a) < 0.2) a += 1.0;
  cplx b = p.size() > 1 ? p[1] : cplx(0);
  cplx c = p.size() > 2 ? p[2] : cplx(0);
  CMat g(2, 2);
  g << a, b, c, (1.0 + b * c) / a;
  return g;
}

std::string box_note(Box box) {
  switch (box) {
    case Box::I:
      return "non-normal (v = 0): the state vanishes at odd N";
    case Box::IIa:
      return "non-normal (v = 0): the state vanishes at odd N";
    case Box::III:
      return "non-normal (v = 0): the state vanishes at odd N";
    case Box::V:
    case Box::VI:
    case Box::VIII:
      return "trivial symmetry group: scalar multiples of the identity only";
    case Box::VII:
      return "odd N: the single global element listed; even N: the 2-cycle family";
    default:
      return "";
  }
}

}  // namespace

TvResult compute_T_v(const CMat& b, int m_max, double tol) {
  check_3x3(b, "compute_T_v");
  double scale = b.cwiseAbs().maxCoeff();
  if (scale == 0) throw ValidationError("compute_T_v: zero matrix");
  TvResult out;
  out.inv.T = CMat::Zero(2, 2);
  out.inv.v = CVec::Zero(2);
  out.inv.jordan.scale = 0;  // marker: no Jordan data
  out.b20_is_zero = std::abs(b(2, 0)) <= std::max(tol, 1e-12) * scale;
  if (out.b20_is_zero) return out;

  CMat c = b / b(2, 0);
  CMat T(2, 2);
  T << c(0, 2) - c(0, 0) * c(2, 2), c(1, 0) * c(2, 2) - c(1, 2),
      c(0, 1) - c(0, 0) * c(2, 1), c(1, 0) * c(2, 1) - c(1, 1);
  out.inv.T = T;
  out.inv.v.resize(2);
  out.inv.v << c(1, 0) + c(2, 2), c(0, 0) + c(2, 1);
  out.inv.b00 = c(0, 0);
  out.inv.b10 = c(1, 0);

  double tn = T.norm();
  if (tn > 0 && std::abs(T.determinant()) > std::max(tol, 1e-12) * tn * tn) {
    out.inv.jordan = jordan_2x2(T, tol);
    if (out.inv.jordan.diagonalizable) {
      cplx chi2 = out.inv.jordan.chi * out.inv.jordan.chi;
      out.inv.m = unit_root_order(chi2, m_max, std::max(tol, 1e-9));
      if (out.inv.m) {
        int m = *out.inv.m;
        double ang = std::arg(chi2);
        int r = static_cast<int>(std::lround(ang * m / (2.0 * kPi)));
        r = ((r % m) + m) % m;
        out.inv.r = r;
      }
    }
  }
  return out;
}

CMat b_from_T_v(const CMat& T, const CVec& v, const cplx& b00, const cplx& b10) {
  if (T.rows() != 2 || T.cols() != 2 || v.size() != 2)
    throw ValidationError("b_from_T_v: T must be 2x2 and v length 2");
  cplx det = T.determinant();
  double tn = std::max(T.norm(), 1e-300);
  if (std::abs(det) <= 1e-12 * tn * tn)
    throw ValidationError("b_from_T_v: singular T");
  CVec col(3), row(3);
  col << b00, b10, 1.0;
  row << 1.0, v(1) - b00, v(0) - b10;
  CMat b = col * row.transpose();
  CMat sx(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  CMat block = -det * sx * T.inverse() * sz;
  b.block(0, 1, 2, 2) += block;
  return b;
}

NormalityVerdict llt_normality(const CMat& b, double tol) {
  check_3x3(b, "llt_normality");
  double scale = b.cwiseAbs().maxCoeff();
  if (scale == 0) return {false, std::nullopt, "zero matrix"};
  TvResult tv = compute_T_v(b, 64, tol);
  if (tv.b20_is_zero)
    return {false, std::nullopt, "b20 = 0: the state is a sum of two product terms"};
  if (std::abs(b.determinant()) <= std::max(tol, 1e-12) * scale * scale * scale)
    return {false, std::nullopt, "det b = 0"};
  if (v_is_zero(tv.inv, tol))
    return {false, std::nullopt, "v = 0: the state vanishes at odd N"};
  return {true, 4, "b20 != 0, v != 0, det b != 0"};
}

const char* to_string(Box b) {
  switch (b) {
    case Box::I: return "I";
    case Box::IIa: return "IIa";
    case Box::IIb: return "IIb";
    case Box::III: return "III";
    case Box::IV: return "IV";
    case Box::V: return "V";
    case Box::VI: return "VI";
    case Box::VII: return "VII";
    case Box::VIII: return "VIII";
  }
  return "?";
}

LltSymmetryReport classify_symmetry(const CMat& b, int m_max, double tol) {
  check_3x3(b, "classify_symmetry");
  TvResult tv = compute_T_v(b, m_max, tol);
  if (tv.b20_is_zero)
    throw ValidationError("classify_symmetry: b20 = 0, see special_states");
  if (!jordan_valid(tv.inv))
    throw OutOfScopeError("classify_symmetry: det b = 0 (degenerate member)");
  const LltInvariants& inv = tv.inv;

  LltSymmetryReport rep;
  rep.box = classify_box(inv, tol);
  rep.normal = llt_normality(b, tol).normal;
  rep.note = box_note(rep.box);

  const Jordan2& jd = inv.jordan;
  CMat R = jd.S;
  CMat Rinv = R.inverse();
  CMat Tunit = R * jd.J * Rinv;  // scale-free copy of T for conjugations

  switch (rep.box) {
    case Box::I: {
      int m = *inv.m;
      if (m == 1) {
        // T ~ 1: every qubit operator lifts (Majumdar-Ghosh-type member)
        rep.descriptors.push_back(
            {1, 3, "g arbitrary with det g = 1", "N even",
             [](const std::vector<cplx>& p) { return std::vector<CMat>{sl2_from_params(p)}; }});
        rep.note = "T ~ 1, v = 0: g^{(x)N} is a symmetry for every g (dimer superposition)";
        break;
      }
      rep.descriptors.push_back(
          {1, 1, "g = R diag(x, 1/x) R^{-1}", "N even",
           [R, Rinv](const std::vector<cplx>& p) {
             cplx x = p.empty() || std::abs(p[0]) < 0.1 ? cplx(1.5) : p[0];
             CMat d(2, 2);
             d << x, 0, 0, 1.0 / x;
             return std::vector<CMat>{R * d * Rinv};
           }});
      rep.descriptors.push_back(
          {m, 3, "g_k = T^k g0 T^{-k}, any g0 with det g0 = 1",
           "N = 0 (mod m), N even",
           [Tunit, m](const std::vector<cplx>& p) {
             CMat g0 = sl2_from_params(p);
             std::vector<CMat> out;
             CMat Tk = CMat::Identity(2, 2);
             CMat Tkinv = CMat::Identity(2, 2);
             CMat Tinv = Tunit.inverse();
             for (int k = 0; k < m; ++k) {
               out.push_back(Tk * g0 * Tkinv);
               Tk = Tunit * Tk;
               Tkinv = Tkinv * Tinv;
             }
             return out;
           }});
      if (m % 4 == 2) {
        // antidiagonal l-cycle, l = m/2. The link equations force the step
        // z_{k+1} = chi^2 z_k and the wrap picks up chi^m = -1, so the scalar
        // chain B_{k+1} B_k = s_k closes iff l is odd; for m = 0 (mod 4) the
        // antidiagonal seeds only close at full length m, inside the m-cycle
        // family above.
        int l = m / 2;
        cplx w = jd.chi * jd.chi;
        rep.descriptors.push_back(
            {l, 1,
             "g_k = R [[0, i x s^{2k}],[i s^{-2k}/x, 0]] R^{-1}, "
             "l = m/2, s = sigma",
             "N = 0 (mod m/2), N even",
             [R, Rinv, w, l](const std::vector<cplx>& p) {
               cplx x = p.empty() || std::abs(p[0]) < 0.1 ? cplx(1.5) : p[0];
               std::vector<CMat> out;
               cplx wk = 1;
               for (int k = 0; k < l; ++k) {
                 CMat a(2, 2);
                 a << 0, cplx(0, 1) * x * wk, cplx(0, 1) / (x * wk), 0;
                 out.push_back(R * a * Rinv);
                 wk *= w;
               }
               return out;
             }});
      }
      break;
    }
    case Box::IIa:
    case Box::IIb: {
      std::string constraint = rep.box == Box::IIa ? "N even" : "all N";
      rep.descriptors.push_back(
          {1, 1, "g = R [[1, x],[0, 1]] R^{-1}", constraint,
           [R, Rinv](const std::vector<cplx>& p) {
             CMat u(2, 2);
             u << 1, p.empty() ? cplx(1) : p[0], 0, 1;
             return std::vector<CMat>{R * u * Rinv};
           }});
      break;
    }
    case Box::III: {
      rep.descriptors.push_back(
          {1, 1, "g = R diag(x, 1/x) R^{-1}", "N even",
           [R, Rinv](const std::vector<cplx>& p) {
             cplx x = p.empty() || std::abs(p[0]) < 0.1 ? cplx(1.5) : p[0];
             CMat d(2, 2);
             d << x, 0, 0, 1.0 / x;
             return std::vector<CMat>{R * d * Rinv};
           }});
      break;
    }
    case Box::IV: {
      int m = *inv.m;
      // order the eigenbasis as (v-direction, complement)
      CVec vn = inv.v.normalized();
      CVec s0 = R.col(0), s1 = R.col(1);
      cplx mu;
      CMat S0(2, 2);
      if (m == 1) {
        // T ~ 1: any completion of v works, mu = 1
        S0.col(0) = vn;
        S0.col(1) = CVec(2);
        S0(0, 1) = -std::conj(vn(1));
        S0(1, 1) = std::conj(vn(0));
        mu = 1;
      } else if (std::abs(s0.normalized().dot(vn)) >= std::abs(s1.normalized().dot(vn))) {
        S0.col(0) = s0;
        S0.col(1) = s1;
        mu = jd.chi * jd.chi;
      } else {
        S0.col(0) = s1;
        S0.col(1) = s0;
        mu = 1.0 / (jd.chi * jd.chi);
      }
      CMat S0inv = S0.inverse();
      rep.descriptors.push_back(
          {m, 1, "g_k = S0 [[1, x mu^k],[0, 1]] S0^{-1}, mu = T-eigenvalue ratio",
           m == 1 ? "all N" : "N = 0 (mod m)",
           [S0, S0inv, mu, m](const std::vector<cplx>& p) {
             cplx x = p.empty() ? cplx(1) : p[0];
             std::vector<CMat> out;
             cplx muk = 1;
             for (int k = 0; k < m; ++k) {
               CMat u(2, 2);
               u << 1, x * muk, 0, 1;
               out.push_back(S0 * u * S0inv);
               muk *= mu;
             }
             return out;
           }});
      break;
    }
    case Box::VII: {
      CMat S(2, 2);
      S.col(0) = inv.v;
      S.col(1) = inv.T * inv.v;
      CMat Sinv = S.inverse();
      CMat dd(2, 2);
      dd << cplx(0, 1), 0, 0, cplx(0, -1);
      rep.finite_elements.push_back(S * dd * Sinv);
      rep.descriptors.push_back(
          {2, 1, "g0 = S diag(x, 1/x) S^{-1}, g1 = g0^{-1}, S = (v | Tv)", "N even",
           [S, Sinv](const std::vector<cplx>& p) {
             cplx x = p.empty() || std::abs(p[0]) < 0.1 ? cplx(1.5) : p[0];
             if (std::abs(x - cplx(0, 1)) < 0.05 || std::abs(x + cplx(0, 1)) < 0.05)
               x += 0.3;  // stay off the global element where g1 = -g0
             CMat d(2, 2);
             d << x, 0, 0, 1.0 / x;
             CMat g0 = S * d * Sinv;
             return std::vector<CMat>{g0, g0.inverse()};
           }});
      break;
    }
    case Box::V:
    case Box::VI:
    case Box::VIII:
      break;
  }
  return rep;
}

std::optional<CycleSpec> llt_cycle_spec(const CMat& b, const std::vector<CMat>& gs,
                                        double tol) {
  return solve_chain(b, b, gs, tol);
}

std::optional<CycleSpec> llt_transport_cycle(const CMat& b, const CMat& c,
                                             const std::vector<CMat>& gs, double tol) {
  return solve_chain(b, c, gs, tol);
}

ChiData chi_data(const CycleSpec& cycle) {
  if (cycle.length() == 0) throw ValidationError("chi_data: empty cycle");
  ChiData out;
  out.chi = jordan_2x2(cycle.physical_ops[0]).chi;
  for (const CMat& d : cycle.diag_params) out.b11_seq.push_back(d(1, 1));
  return out;
}

StandardForm standard_form(const CMat& b, double tol) {
  check_3x3(b, "standard_form");
  TvResult tv = compute_T_v(b, 64, tol);
  if (tv.b20_is_zero)
    throw ValidationError("standard_form: b20 = 0, see special_states");
  if (!jordan_valid(tv.inv))
    throw OutOfScopeError("standard_form: det b = 0 (degenerate member)");
  const LltInvariants& inv = tv.inv;
  const Jordan2& jd = inv.jordan;

  StandardForm out;
  out.box = classify_box(inv, tol);

  // stage 1: move T to its normal form J; B11^2 carries the scale, so that
  // T_hat = g T g^{-1} / B11^2 = J with det T_hat = 1
  CMat g = det1(jd.S.inverse());
  cplx B11 = csqrt(jd.scale);
  out.T = jd.J;
  CVec v1 = (g * inv.v) / B11;
  bool vz = v_is_zero(inv, tol);

  CVec vhat = CVec::Zero(2);
  if (!vz) {
    switch (out.box) {
      case Box::IIb: {
        cplx x = v1(0);
        if (needs_sign_flip(x)) {
          B11 = -B11;
          x = -x;
        }
        vhat << x, 0;
        break;
      }
      case Box::V: {
        CMat sh(2, 2);
        sh << 1, -v1(0) / v1(1), 0, 1;
        g = sh * g;
        v1 = sh * v1;
        cplx q = v1(1);
        if (needs_sign_flip(q)) {
          B11 = -B11;
          q = -q;
        }
        vhat << 0, q;
        break;
      }
      case Box::IV: {
        if (*inv.m == 1) {
          // T ~ 1: rotate v onto e0, then scale to (1, 0)
          CMat M(2, 2);
          M.col(0) = v1;
          M(0, 1) = -std::conj(v1(1));
          M(1, 1) = std::conj(v1(0));
          CMat rot = det1(M.inverse());
          g = rot * g;
          v1 = rot * v1;
        } else if (*inv.m == 2 && std::abs(v1(0)) < std::abs(v1(1))) {
          // sigma = i: the twist swaps the eigenvectors of T
          CMat tw(2, 2);
          tw << 0, 1, -1, 0;
          g = tw * g;
          v1 = (tw * v1) / cplx(0, 1);
          B11 *= cplx(0, 1);
        }
        if (std::abs(v1(0)) >= std::abs(v1(1))) {
          cplx al = 1.0 / v1(0);
          CMat d(2, 2);
          d << al, 0, 0, 1.0 / al;
          g = d * g;
          vhat << 1, 0;
        } else {
          cplx al = v1(1);
          CMat d(2, 2);
          d << al, 0, 0, 1.0 / al;
          g = d * g;
          vhat << 0, 1;
        }
        break;
      }
      case Box::VI:
      case Box::VII:
      case Box::VIII: {
        cplx a = v1(0), bb = v1(1);
        double vn = v1.norm();
        if (std::abs(a) <= 1e-8 * vn) {
          CMat d(2, 2);
          d << bb, 0, 0, 1.0 / bb;
          g = d * g;
          vhat << 0, 1;
        } else if (std::abs(bb) <= 1e-8 * vn) {
          CMat d(2, 2);
          d << 1.0 / a, 0, 0, a;
          g = d * g;
          vhat << 1, 0;
        } else {
          cplx J = a * bb;
          cplx s = std::sqrt(std::abs(J));
          cplx al = s / a;
          CMat d(2, 2);
          d << al, 0, 0, 1.0 / al;
          g = d * g;
          vhat << s, J / s;
        }
        break;
      }
      default:
        vhat = v1;  // not reached: v != 0 excludes I/IIa/III
        break;
    }
  }
  out.v = vhat;
  g = det1(g);

  // defensive residual gate on the canonicalization
  CVec chk = (g * inv.v) / B11;
  if ((chk - vhat).norm() > 1e-6 * std::max(1.0, inv.v.norm()))
    throw ValidationError("standard_form: canonicalization residual too large");

  out.transform.g = g;
  out.transform.B11 = B11;
  out.transform.B01 = -inv.b00;
  out.transform.B02 = -inv.b10;
  return out;
}

std::optional<CMat> slocc_equivalent(const CMat& b, const CMat& c, double tol) {
  NormalityVerdict nb = llt_normality(b), nc = llt_normality(c);
  if (!nb.normal)
    throw OutOfScopeError("slocc_equivalent: first member non-normal (" + nb.reason +
                          "); see special_states / vzero_global_equiv");
  if (!nc.normal)
    throw OutOfScopeError("slocc_equivalent: second member non-normal (" + nc.reason +
                          "); see special_states / vzero_global_equiv");
  StandardForm sb = standard_form(b), sc = standard_form(c);
  if (sb.box != sc.box) return std::nullopt;
  if ((sb.T - sc.T).norm() > tol * (1.0 + sb.T.norm())) return std::nullopt;
  if ((sb.v - sc.v).norm() > tol * (1.0 + sb.v.norm())) return std::nullopt;
  CMat g = sb.transform.g.inverse() * sc.transform.g;
  return det1(g);
}

std::optional<CMat> vzero_global_equiv(const CMat& b, const CMat& c, double tol) {
  TvResult tb = compute_T_v(b), tc = compute_T_v(c);
  if (tb.b20_is_zero || tc.b20_is_zero)
    throw ValidationError("vzero_global_equiv: expects b20 != 0 members");
  if (!v_is_zero(tb.inv, kDefaultTol) || !v_is_zero(tc.inv, kDefaultTol))
    throw ValidationError("vzero_global_equiv: expects v = 0 members");
  if (!jordan_valid(tb.inv) || !jordan_valid(tc.inv))
    throw OutOfScopeError("vzero_global_equiv: det b = 0 (degenerate member)");
  if (tb.inv.jordan.diagonalizable != tc.inv.jordan.diagonalizable) return std::nullopt;
  if (tb.inv.jordan.diagonalizable &&
      chordal(tb.inv.jordan.chi, tc.inv.jordan.chi) > std::max(tol, 1e-9))
    return std::nullopt;
  CMat g = tb.inv.jordan.S * tc.inv.jordan.S.inverse();
  return det1(g);
}

StateVector dimer_superposition(int n, int sign) {
  if (n < 2 || n % 2 != 0)
    throw ValidationError("dimer_superposition: n must be even and >= 2");
  if (sign != 1 && sign != -1)
    throw ValidationError("dimer_superposition: sign must be +1 or -1");
  StateVector out;
  out.n_sites = n;
  out.amplitudes = CVec::Zero(1L << n);
  auto eps = [](int a, int bbit) { return a == bbit ? 0 : (a == 0 ? 1 : -1); };
  for (long idx = 0; idx < (1L << n); ++idx) {
    auto bit = [&](int s) { return static_cast<int>((idx >> (n - 1 - s)) & 1); };
    int ampA = 1, ampB = 1;
    for (int t = 0; t < n / 2 && ampA != 0; ++t) ampA *= eps(bit(2 * t), bit(2 * t + 1));
    for (int t = 0; t < n / 2 && ampB != 0; ++t)
      ampB *= eps(bit(2 * t + 1), bit((2 * t + 2) % n));
    out.amplitudes(idx) = cplx(ampA + sign * ampB, 0);
  }
  return out;
}

SpecialVerdict special_states(const CMat& b, int n, double tol) {
  check_3x3(b, "special_states");
  double scale = b.cwiseAbs().maxCoeff();
  if (scale == 0) throw ValidationError("special_states: zero matrix");
  TvResult tv = compute_T_v(b, std::max(64, 4 * std::max(n, 1)), tol);

  SpecialVerdict out{};
  if (tv.b20_is_zero) {
    out.kind = SpecialVerdict::Kind::B20Zero;
    out.permutation_invariant = true;
    // Psi = u^{(x)N} + w^{(x)N} with u, w read off the remaining rows
    CVec u(2), w(2);
    u << b(2, 2), b(2, 1);
    w << b(1, 0), b(0, 0);
    double un = u.norm(), wn = w.norm(), zt = std::max(tol, 1e-12) * scale;
    std::ostringstream note;
    note << "b20 = 0: Psi = u^N + w^N with u = (" << u(0) << ", " << u(1)
         << "), w = (" << w(0) << ", " << w(1) << ")";
    if (un <= zt && wn <= zt) {
      out.b20_class = SpecialVerdict::B20Class::Other;
      note << "; both terms vanish (zero state)";
    } else if (un <= zt || wn <= zt) {
      out.b20_class = SpecialVerdict::B20Class::Product;
      note << "; single product term";
    } else if (std::abs(u(0) * w(1) - u(1) * w(0)) > std::max(tol, 1e-9) * un * wn) {
      out.b20_class = SpecialVerdict::B20Class::Ghz;
      note << "; independent directions (GHZ-type)";
    } else {
      cplx mu = (std::abs(u(0)) >= std::abs(u(1))) ? w(0) / u(0) : w(1) / u(1);
      cplx fac = 1.0 + std::pow(mu, n);
      if (std::abs(fac) <= std::max(tol, 1e-9)) {
        out.b20_class = SpecialVerdict::B20Class::Other;
        note << "; parallel terms cancel at N = " << n << " (zero state)";
      } else {
        out.b20_class = SpecialVerdict::B20Class::Product;
        note << "; parallel directions (product state)";
      }
    }
    out.note = note.str();
    return out;
  }

  if (!v_is_zero(tv.inv, tol))
    throw ValidationError("special_states: b20 != 0 and v != 0 (not a special regime)");

  out.kind = SpecialVerdict::Kind::VZero;
  out.odd_n_vanishes = true;
  std::ostringstream note;
  note << "v = 0: the state vanishes at odd N";
  if (!jordan_valid(tv.inv)) {
    note << "; det b = 0 (degenerate member)";
    out.note = note.str();
    return out;
  }
  out.box = classify_box(tv.inv, tol);
  if (out.box == Box::I) {
    int m = *tv.inv.m;
    int r = tv.inv.r.value_or(0);
    out.mg_sign = (m == 1) ? 1 : (m == 2 ? -1 : 0);
    if (out.mg_sign == 1) note << "; T ~ 1 (Majumdar-Ghosh, + sign)";
    if (out.mg_sign == -1) note << "; T ~ i sigma_z (Majumdar-Ghosh, - sign)";
    if (n >= 2 && n % 2 == 0 && n % m == 0) {
      long rN = static_cast<long>(r) * (n / m);
      if (rN % 2 == 0) {
        // even phase index: site-dependent phases carry the member to T = 1
        CMat t1 = CMat::Identity(2, 2);
        CMat mg = b_from_T_v(t1, CVec::Zero(2), 0, 0);
        CMat ga = det1(tv.inv.jordan.S.inverse());
        CMat gainv = ga.inverse();
        cplx chi = tv.inv.jordan.chi;
        std::vector<CMat> ops;
        cplx ph = 1;
        for (int k = 0; k < n; ++k) {
          CMat d(2, 2);
          d << ph, 0, 0, 1.0 / ph;
          ops.push_back(gainv * d);
          ph *= chi;
        }
        auto spec = llt_transport_cycle(b, mg, ops, 1e-8);
        if (spec) {
          out.equivalent_to_T1 = true;
          out.nonglobal_ops = cycle_to_ops(*spec, n);
          note << "; equivalent to the T = 1 member at N = " << n
               << " via a site-dependent phase string";
        }
      }
    }
  }
  out.note = note.str();
  return out;
}

}  // namespace timps
