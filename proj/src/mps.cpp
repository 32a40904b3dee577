#include <timps/mps.hpp>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace timps {

namespace {

CMat unit3(int i, int j) {
  CMat m = CMat::Zero(3, 3);
  m(i, j) = 1.0;
  return m;
}

double tensor_scale(const MpsTensor& t) {
  double s = 0;
  for (const CMat& m : t.mats) s = std::max(s, m.norm());
  return s;
}

void check_tensor(const MpsTensor& a) {
  if (a.d < 1 || a.D < 1 || static_cast<int>(a.mats.size()) != a.d)
    throw ValidationError("tensor: mats size must equal d");
  for (const CMat& m : a.mats)
    if (m.rows() != a.D || m.cols() != a.D)
      throw ValidationError("tensor: every A^i must be D x D");
}

void build_rec(const MpsTensor& a, int site, int n, const CMat& prefix,
               std::size_t idx, CVec& amps) {
  if (site == n) {
    amps(static_cast<Eigen::Index>(idx)) = prefix.trace();
    return;
  }
  for (int j = 0; j < a.d; ++j)
    build_rec(a, site + 1, n, prefix * a.mats[j], idx * a.d + j, amps);
}

}  // namespace

MpsTensor class_representative(ClassLabel cls) {
  MpsTensor t;
  t.d = 2;
  t.D = 3;
  CMat a0, a1;
  switch (cls) {
    case ClassLabel::Momega:
      a0 = CMat::Zero(3, 3);
      a0(0, 0) = 1;
      a0(1, 1) = omega;
      a0(2, 2) = omega2;
      a1 = CMat::Identity(3, 3);
      break;
    case ClassLabel::DiagDegenerate:
      a0 = unit3(2, 2);
      a1 = CMat::Zero(3, 3);
      a1(0, 0) = 1;
      a1(1, 1) = 1;
      break;
    case ClassLabel::Jordan3:
      a0 = unit3(0, 1) + unit3(1, 2);
      a1 = CMat::Identity(3, 3);
      break;
    case ClassLabel::Jordan2plus1:
      a0 = unit3(0, 1);
      a1 = CMat::Identity(3, 3);
      break;
    case ClassLabel::Jordan2plus1Variant:
      a0 = unit3(0, 1) + unit3(2, 2);
      a1 = CMat::Zero(3, 3);
      a1(0, 0) = 1;
      a1(1, 1) = 1;
      break;
    case ClassLabel::LLT:
      a0 = unit3(0, 1) + unit3(2, 2);
      a1 = unit3(0, 0) + unit3(1, 2);
      break;
    default:
      throw ValidationError("unsupported class");
  }
  t.mats = {a0, a1};
  return t;
}

MpsTensor tensor_from_b(ClassLabel cls, const CMat& b) {
  if (b.rows() != 3 || b.cols() != 3) throw ValidationError("b must be 3x3");
  Eigen::JacobiSVD<CMat> svd(b);
  const auto& sv = svd.singularValues();
  if (!(sv(2) > 1e-12 * sv(0))) throw ValidationError("b must be invertible");
  MpsTensor t = class_representative(cls);
  if (cls == ClassLabel::Momega) {
    // row-scaled family: A^0_{ij} = w^i b_{ij}, A^1 = b
    t.mats[0] = t.mats[0] * b;
    t.mats[1] = b;
  } else {
    t.mats[0] = b * t.mats[0];
    t.mats[1] = b * t.mats[1];
  }
  return t;
}

StateVector build_state(const MpsTensor& a, int n) {
  check_tensor(a);
  if (n < 2) throw ValidationError("n_sites must be >= 2");
  double logdim = n * std::log2(static_cast<double>(a.d));
  if (logdim > 20.5) throw ValidationError("d^N exceeds the memory cap (d^N <= 2^20)");
  std::size_t total = 1;
  for (int s = 0; s < n; ++s) total *= static_cast<std::size_t>(a.d);
  StateVector psi;
  psi.n_sites = n;
  psi.amplitudes = CVec::Zero(static_cast<Eigen::Index>(total));
  build_rec(a, 0, n, CMat::Identity(a.D, a.D), 0, psi.amplitudes);
  return psi;
}

std::optional<int> injectivity_length(const MpsTensor& a, int l_max, double tol) {
  check_tensor(a);
  const int dim = a.D * a.D;
  std::vector<CMat> words = {CMat::Identity(a.D, a.D)};
  for (int len = 1; len <= l_max; ++len) {
    std::vector<CMat> next;
    next.reserve(words.size() * a.mats.size());
    for (const CMat& w : words)
      for (int j = 0; j < a.d; ++j) next.push_back(w * a.mats[j]);
    words = std::move(next);
    if (static_cast<int>(words.size()) < dim) continue;
    CMat m(static_cast<Eigen::Index>(words.size()), dim);
    for (std::size_t r = 0; r < words.size(); ++r)
      m.row(static_cast<Eigen::Index>(r)) = vec_cm(words[r]).transpose();
    Eigen::JacobiSVD<CMat> svd(m);
    const auto& sv = svd.singularValues();
    if (sv(0) > 0 && sv(dim - 1) > tol * sv(0)) return len;
  }
  return std::nullopt;
}

std::optional<GaugeRelation> gauge_relation(const MpsTensor& a, const MpsTensor& b,
                                            double tol) {
  check_tensor(a);
  check_tensor(b);
  if (a.d != b.d || a.D != b.D) return std::nullopt;
  const int D = a.D;
  const int dim = D * D;
  const double sa = tensor_scale(a), sb = tensor_scale(b);
  if (sa <= 0 || sb <= 0) return std::nullopt;

  // candidate scales: det(A0 + x A1) = lambda^D det(B0 + x B1), so either both
  // pencil polynomials vanish (singular pencil) or they are proportional with
  // ratio lambda^D; the singular case falls back to word-trace ratios.
  std::vector<cplx> cands;
  auto pa = pencil_char_poly(a.mats[0], a.mats[1]);
  auto pb = pencil_char_poly(b.mats[0], b.mats[1]);
  auto poly_norm = [](const std::vector<cplx>& p) {
    double m = 0;
    for (cplx c : p) m = std::max(m, std::abs(c));
    return m;
  };
  const double za = 1e-10 * std::pow(sa, D), zb = 1e-10 * std::pow(sb, D);
  bool a_zero = poly_norm(pa) <= za, b_zero = poly_norm(pb) <= zb;
  if (a_zero != b_zero) return std::nullopt;
  if (!a_zero) {
    CMat va(static_cast<Eigen::Index>(pa.size()), 1), vb(static_cast<Eigen::Index>(pb.size()), 1);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      va(static_cast<Eigen::Index>(i), 0) = pa[i];
      vb(static_cast<Eigen::Index>(i), 0) = pb[i];
    }
    auto ratio = proportional(va, vb, 1e-7);
    if (!ratio || std::abs(*ratio) <= 0) return std::nullopt;
    cplx l0 = std::pow(*ratio, 1.0 / D);
    for (int k = 0; k < D; ++k)
      cands.push_back(l0 * std::exp(cplx(0, 2 * kPi * k / D)));
  } else {
    // compare traces of length-k words: tr(A_w) = lambda^k tr(B_w)
    for (int k = 1; k <= 6 && cands.empty(); ++k) {
      std::vector<CMat> wa = {CMat::Identity(D, D)}, wb = {CMat::Identity(D, D)};
      for (int s = 0; s < k; ++s) {
        std::vector<CMat> na, nb;
        for (std::size_t i = 0; i < wa.size(); ++i)
          for (int j = 0; j < a.d; ++j) {
            na.push_back(wa[i] * a.mats[j]);
            nb.push_back(wb[i] * b.mats[j]);
          }
        wa = std::move(na);
        wb = std::move(nb);
      }
      double best = 0;
      std::size_t best_i = 0;
      for (std::size_t i = 0; i < wb.size(); ++i) {
        double t = std::abs(wb[i].trace());
        if (t > best) {
          best = t;
          best_i = i;
        }
      }
      if (best <= 1e-9 * std::pow(sb, k)) continue;
      cplx ta = wa[best_i].trace(), tb = wb[best_i].trace();
      if (std::abs(ta) <= 1e-12 * std::pow(sa, k)) return std::nullopt;
      cplx r0 = std::pow(ta / tb, 1.0 / k);
      for (int t = 0; t < k; ++t)
        cands.push_back(r0 * std::exp(cplx(0, 2 * kPi * t / k)));
    }
    if (cands.empty()) return std::nullopt;
  }

  std::mt19937 rng(912881);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (cplx lam : cands) {
    // s A^j = lambda B^j s  as a stacked linear system on vec(s)
    CMat k(static_cast<Eigen::Index>(a.d) * dim, dim);
    CMat id = CMat::Identity(D, D);
    for (int j = 0; j < a.d; ++j)
      k.block(j * dim, 0, dim, dim) =
          kron(a.mats[j].transpose(), id) - lam * kron(id, b.mats[j]);
    CMat ns = nullspace(k, 1e-8);
    if (ns.cols() == 0) continue;
    std::vector<CVec> trials;
    trials.push_back(ns * (ns.adjoint() * vec_cm(CMat::Identity(D, D))));
    for (int t = 0; t < 12; ++t) {
      CVec r(ns.cols());
      for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = cplx(unif(rng), unif(rng));
      trials.push_back(ns * r);
    }
    for (const CVec& v : trials) {
      if (v.norm() <= 1e-10) continue;
      CMat s = unvec_cm(v, D, D);
      s = normalize_matrix(s);
      Eigen::JacobiSVD<CMat> svd(s);
      const auto& sv = svd.singularValues();
      if (!(sv(D - 1) > 1e-8 * sv(0))) continue;
      double resid = 0, scale = std::max(sa, sb);
      for (int j = 0; j < a.d; ++j)
        resid = std::max(resid, (s * a.mats[j] - lam * b.mats[j] * s).norm());
      if (resid <= 100 * tol * std::max(1.0, scale)) return GaugeRelation{lam, s};
    }
  }
  return std::nullopt;
}

}  // namespace timps
