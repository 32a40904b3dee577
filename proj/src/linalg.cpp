#include <timps/linalg.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace timps {

std::optional<cplx> proportional(const CMat& a, const CMat& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("proportional: dimension mismatch");
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 && nb == 0.0)
    throw ValidationError("proportional: both operands zero, scale ambiguous");
  if (nb == 0.0) return std::nullopt;  // a = lambda*0 is impossible for a != 0
  // least-squares scale <b,a>/<b,b>
  cplx lam = (b.conjugate().cwiseProduct(a)).sum() / cplx(nb * nb, 0);
  double resid = (a - lam * b).norm();
  if (resid <= tol * std::max(na, 1e-300)) return lam;
  return std::nullopt;
}

namespace {

// canonical representative among {l, 1/l, -l, -1/l}; see header for the domain
cplx choose_chi(cplx l, double tol) {
  std::array<cplx, 4> cand = {l, 1.0 / l, -l, -1.0 / l};
  auto in_domain = [tol](const cplx& c) {
    double r = std::abs(c);
    if (r < 1.0 - tol) return false;
    if (r > 1.0 + tol) {  // strictly outside the unit circle
      if (c.imag() > tol) return true;
      if (std::abs(c.imag()) <= tol && c.real() > 0) return true;
      return false;
    }
    // on the unit circle: closed first quadrant
    return c.real() >= -tol && c.imag() >= -tol;
  };
  // prefer strict membership; ties resolved by the fixed candidate order
  for (const auto& c : cand)
    if (in_domain(c)) return c;
  return l;  // numerically degenerate; caller's verification will catch trouble
}

// eigenvector of a 2x2 matrix for eigenvalue mu, via the adjugate of (m - mu)
CVec eigvec_2x2(const CMat& m, const cplx& mu) {
  CMat k = m - mu * CMat::Identity(2, 2);
  CMat adj(2, 2);
  adj << k(1, 1), -k(0, 1), -k(1, 0), k(0, 0);
  CVec c0 = adj.col(0), c1 = adj.col(1);
  CVec v = (c0.norm() >= c1.norm()) ? c0 : c1;
  if (v.norm() == 0.0) v = CVec::Unit(2, 0);
  // deterministic scaling: largest-modulus entry -> 1, then unit norm
  int idx = std::abs(v(0)) >= std::abs(v(1)) ? 0 : 1;
  v /= v(idx);
  v /= v.norm();
  return v;
}

}  // namespace

Jordan2 jordan_2x2(const CMat& g, double tol) {
  if (g.rows() != 2 || g.cols() != 2) throw ValidationError("jordan_2x2: need 2x2");
  cplx det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  if (std::abs(det) <= tol * tol * g.norm() * g.norm() || std::abs(det) == 0.0)
    throw ValidationError("jordan_2x2: matrix is singular");
  cplx s = std::sqrt(det);
  CMat gh = g / s;  // det 1, up to the sign freedom of s

  Jordan2 out;
  // proportional to identity?
  if (std::abs(gh(0, 1)) <= tol && std::abs(gh(1, 0)) <= tol &&
      std::abs(gh(0, 0) - gh(1, 1)) <= tol) {
    if (gh(0, 0).real() < 0) { s = -s; gh = -gh; }
    out.diagonalizable = true;
    out.chi = 1.0;
    out.S = CMat::Identity(2, 2);
    out.J = CMat::Identity(2, 2);
    out.scale = s;
    return out;
  }

  cplx tr = gh(0, 0) + gh(1, 1);
  cplx disc = tr * tr - 4.0;
  // a defective double eigenvalue splits like sqrt(perturbation), so after a
  // few conjugations disc carries ~1e-12 of noise; keep an absolute floor far
  // below the smallest genuine separation we care about (~1e-3 for unit roots
  // of order <= a few hundred) but far above that noise.
  if (std::abs(disc) <= std::max(tol * tol, 1e-10)) {
    // defective: eigenvalue tr/2 = +-1; flip sign so it is +1
    if (tr.real() < 0) { s = -s; gh = -gh; tr = -tr; }
    out.diagonalizable = false;
    out.chi = 1.0;
    out.J = CMat(2, 2);
    out.J << 1, 1, 0, 1;
    // S = (v | u) with v = (gh - 1)u != 0
    CMat k = gh - CMat::Identity(2, 2);
    CVec u = (k.col(0).norm() >= k.col(1).norm()) ? CVec::Unit(2, 0) : CVec::Unit(2, 1);
    CVec v = k * u;
    out.S = CMat(2, 2);
    out.S.col(0) = v;
    out.S.col(1) = u;
    out.scale = s;
    return out;
  }

  cplx root = std::sqrt(disc);
  cplx l = (tr + root) / 2.0;
  if (std::abs(l) < 1.0) l = (tr - root) / 2.0;  // want |l| >= 1 branch
  cplx chi = choose_chi(l, tol);
  // if chi came from the -g branch, fold the sign into the recorded scale
  if (std::abs(chi + l) <= tol * std::abs(l) || std::abs(chi + 1.0 / l) <= tol) {
    s = -s;
    gh = -gh;
  }
  out.diagonalizable = true;
  out.chi = chi;
  out.J = CMat::Zero(2, 2);
  out.J(0, 0) = chi;
  out.J(1, 1) = 1.0 / chi;
  out.S = CMat(2, 2);
  out.S.col(0) = eigvec_2x2(gh, chi);
  out.S.col(1) = eigvec_2x2(gh, 1.0 / chi);
  out.scale = s;
  return out;
}

CMat perm_matrix(const std::vector<int>& sigma) {
  int n = static_cast<int>(sigma.size());
  CMat p = CMat::Zero(n, n);
  std::vector<bool> seen(n, false);
  for (int i = 0; i < n; ++i) {
    if (sigma[i] < 0 || sigma[i] >= n || seen[sigma[i]])
      throw ValidationError("perm_matrix: not a permutation");
    seen[sigma[i]] = true;
    p(sigma[i], i) = 1.0;
  }
  return p;
}

MonomialEig monomial_eig(const std::vector<int>& sigma, const std::vector<cplx>& d) {
  int n = static_cast<int>(sigma.size());
  if (d.size() != sigma.size()) throw ValidationError("monomial_eig: size mismatch");
  for (const auto& z : d)
    if (std::abs(z) == 0.0)
      throw ValidationError("monomial_eig: zero diagonal entry (singular matrix)");
  perm_matrix(sigma);  // validates sigma

  MonomialEig out;
  out.vectors = CMat::Zero(n, n);
  std::vector<bool> used(n, false);
  int col = 0;
  for (int start = 0; start < n; ++start) {
    if (used[start]) continue;
    // collect the cycle through `start`
    std::vector<int> cyc;
    int i = start;
    do {
      cyc.push_back(i);
      used[i] = true;
      i = sigma[i];
    } while (i != start);
    int l = static_cast<int>(cyc.size());
    cplx p = 1.0;
    for (int j : cyc) p *= d[j];
    cplx base = std::pow(p, 1.0 / static_cast<double>(l));
    for (int k = 0; k < l; ++k) {
      cplx lam = base * std::polar(1.0, 2.0 * M_PI * k / l);
      out.values.push_back(lam);
      // (P D v)_{sigma(i)} = d_i v_i = lam v_{sigma(i)}
      CVec v = CVec::Zero(n);
      cplx c = 1.0;
      v(cyc[0]) = c;
      for (int t = 0; t + 1 < l; ++t) {
        c = c * d[cyc[t]] / lam;
        v(cyc[t + 1]) = c;
      }
      v /= v.norm();
      out.vectors.col(col++) = v;
    }
  }
  return out;
}

CMat Mobius::matrix() const {
  CMat m(2, 2);
  m << alpha, beta, gamma, delta;
  return m;
}

Mobius mobius_from_matrix(const CMat& m) {
  if (m.rows() != 2 || m.cols() != 2) throw ValidationError("mobius: need 2x2");
  return Mobius{m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}

cplx mobius_apply(const Mobius& m, const cplx& z) {
  if (is_inf(z)) {
    if (std::abs(m.gamma) == 0.0) return kInf;
    return m.alpha / m.gamma;
  }
  cplx den = m.gamma * z + m.delta;
  if (std::abs(den) == 0.0) return kInf;
  return (m.alpha * z + m.beta) / den;
}

double chordal(const cplx& u, const cplx& v) {
  bool iu = is_inf(u), iv = is_inf(v);
  if (iu && iv) return 0.0;
  if (iu) return 1.0 / std::sqrt(1.0 + std::norm(v));
  if (iv) return 1.0 / std::sqrt(1.0 + std::norm(u));
  return std::abs(u - v) / std::sqrt((1.0 + std::norm(u)) * (1.0 + std::norm(v)));
}

namespace {

// matrix of the Mobius map sending (z1, z2, z3) -> (0, 1, inf)
CMat three_to_std(const cplx& z1, const cplx& z2, const cplx& z3) {
  CMat t(2, 2);
  if (is_inf(z1)) {
    t << 0, z2 - z3, 1, -z3;
  } else if (is_inf(z2)) {
    t << 1, -z1, 1, -z3;
  } else if (is_inf(z3)) {
    t << 1, -z1, 0, z2 - z1;
  } else {
    t << z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1);
  }
  return t;
}

}  // namespace

std::optional<Mobius> mobius_solve(const std::vector<std::pair<cplx, cplx>>& pairs,
                                   double tol) {
  // pick the first three pairwise-distinct sources
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(pairs.size()) && idx.size() < 3; ++i) {
    bool dup = false;
    for (int j : idx)
      if (chordal(pairs[i].first, pairs[j].first) <= tol) dup = true;
    if (!dup) idx.push_back(i);
  }
  if (idx.size() < 3)
    throw ValidationError("mobius_solve: under-determined (need 3 distinct sources)");

  CMat tz = three_to_std(pairs[idx[0]].first, pairs[idx[1]].first, pairs[idx[2]].first);
  CMat tw = three_to_std(pairs[idx[0]].second, pairs[idx[1]].second, pairs[idx[2]].second);
  // m = tw^{-1} tz via the adjugate (scale is irrelevant)
  CMat adj(2, 2);
  adj << tw(1, 1), -tw(0, 1), -tw(1, 0), tw(0, 0);
  CMat m = adj * tz;
  // deterministic normalization by the largest entry
  cplx piv = m(0, 0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (std::abs(m(i, j)) > std::abs(piv)) piv = m(i, j);
  if (std::abs(piv) == 0.0) return std::nullopt;  // degenerate targets
  m /= piv;
  Mobius mob = mobius_from_matrix(m);
  for (const auto& [z, w] : pairs)
    if (chordal(mobius_apply(mob, z), w) > tol) return std::nullopt;
  return mob;
}

std::optional<int> unit_root_order(const cplx& z, int m_max, double tol) {
  if (std::abs(std::abs(z) - 1.0) > tol) return std::nullopt;
  cplx p = 1.0;
  for (int m = 1; m <= m_max; ++m) {
    p *= z;
    if (std::abs(p - 1.0) <= tol) return m;
  }
  return std::nullopt;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVec vec_cm(const CMat& m) {
  CVec v(m.size());
  int k = 0;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) v(k++) = m(i, j);
  return v;
}

CMat unvec_cm(const CVec& v, int rows, int cols) {
  if (v.size() != rows * cols) throw ValidationError("unvec_cm: size mismatch");
  CMat m(rows, cols);
  int k = 0;
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = v(k++);
  return m;
}

CMat nullspace(const CMat& m, double rtol) {
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double smax = s.size() ? s(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rtol * std::max(smax, 1e-300)) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

int svd_rank(const CMat& m, double rtol) {
  Eigen::JacobiSVD<CMat> svd(m);
  const auto& s = svd.singularValues();
  double smax = s.size() ? s(0) : 0.0;
  if (smax == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rtol * smax) ++rank;
  return rank;
}

std::vector<cplx> pencil_char_poly(const CMat& a0, const CMat& a1) {
  if (a0.rows() != a0.cols() || a1.rows() != a1.cols() || a0.rows() != a1.rows())
    throw ValidationError("pencil_char_poly: square matrices of equal size required");
  const int n = static_cast<int>(a0.rows());
  if (n > 4) throw ValidationError("pencil_char_poly: n <= 4 only");
  std::vector<cplx> c(n + 1, cplx(0, 0));
  for (int mask = 0; mask < (1 << n); ++mask) {
    CMat m(n, n);
    int k = 0;
    for (int j = 0; j < n; ++j) {
      bool from_a1 = (mask >> j) & 1;
      m.col(j) = from_a1 ? a1.col(j) : a0.col(j);
      k += from_a1;
    }
    c[k] += m.determinant();
  }
  return c;
}

CMat normalize_matrix(const CMat& m) {
  cplx piv = 0.0;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (std::abs(m(i, j)) > std::abs(piv) * (1.0 + 1e-12)) piv = m(i, j);
  if (std::abs(piv) == 0.0) return m;
  CMat out = m / piv;
  return out / out.norm();
}

}  // namespace timps
