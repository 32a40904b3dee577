#include <timps/oracle.hpp>

#include <timps/linalg.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <vector>

namespace timps {

namespace {

int state_local_dim(const StateVector& psi, int n_ops) {
  // d with d^N = len(amplitudes)
  if (n_ops <= 0) throw ValidationError("empty operator string");
  double d = std::pow(static_cast<double>(psi.amplitudes.size()), 1.0 / n_ops);
  int di = static_cast<int>(std::lround(d));
  std::size_t total = 1;
  for (int s = 0; s < n_ops; ++s) total *= static_cast<std::size_t>(di);
  if (di < 1 || total != static_cast<std::size_t>(psi.amplitudes.size()))
    throw ValidationError("operator string length does not match the state");
  return di;
}

}  // namespace

StateVector apply_local_ops(const StateVector& psi, const LocalOperatorString& s) {
  const int n = static_cast<int>(s.ops.size());
  if (n != psi.n_sites) throw ValidationError("one operator per site required");
  const int d = state_local_dim(psi, n);
  for (const CMat& op : s.ops)
    if (op.rows() != d || op.cols() != d)
      throw ValidationError("operator shape must match the local dimension");
  CVec cur = psi.amplitudes;
  CVec next(cur.size());
  std::size_t pre = 1, post = psi.amplitudes.size() / static_cast<std::size_t>(d);
  for (int site = 0; site < n; ++site) {
    const CMat& op = s.ops[static_cast<std::size_t>(site)];
    for (std::size_t a = 0; a < pre; ++a)
      for (std::size_t c = 0; c < post; ++c) {
        std::size_t base = a * static_cast<std::size_t>(d) * post + c;
        for (int i2 = 0; i2 < d; ++i2) {
          cplx acc = 0;
          for (int i = 0; i < d; ++i)
            acc += op(i2, i) * cur(static_cast<Eigen::Index>(base + static_cast<std::size_t>(i) * post));
          next(static_cast<Eigen::Index>(base + static_cast<std::size_t>(i2) * post)) = acc;
        }
      }
    cur.swap(next);
    pre *= static_cast<std::size_t>(d);
    post /= static_cast<std::size_t>(d);
  }
  StateVector out;
  out.n_sites = psi.n_sites;
  out.amplitudes = cur;
  return out;
}

SymmetryCheck is_symmetry(const StateVector& psi, const LocalOperatorString& s,
                          double tol) {
  double nrm = psi.amplitudes.norm();
  if (nrm == 0.0) throw ValidationError("is_symmetry: zero state");
  StateVector phi = apply_local_ops(psi, s);
  double resid = (phi.amplitudes - psi.amplitudes).norm() / nrm;
  return SymmetryCheck{resid <= tol, resid, cplx(1.0)};
}

SymmetryCheck is_symmetry_scaled(const StateVector& psi, const LocalOperatorString& s,
                                 double tol) {
  double nrm = psi.amplitudes.norm();
  if (nrm == 0.0) throw ValidationError("is_symmetry: zero state");
  StateVector phi = apply_local_ops(psi, s);
  double nphi = phi.amplitudes.norm();
  if (nphi <= 1e-14 * nrm) return SymmetryCheck{false, 1.0, cplx(0.0)};
  cplx lam = psi.amplitudes.dot(phi.amplitudes) / cplx(nrm * nrm, 0);
  double resid = (phi.amplitudes - lam * psi.amplitudes).norm() / std::max(nphi, nrm);
  return SymmetryCheck{resid <= tol && std::abs(lam) > 1e-12, resid, lam};
}

namespace {

// per-site deterministic normalization kills all scale freedom up to the
// global one, which group elements are counted modulo
std::vector<CMat> fingerprint(const std::vector<CMat>& ops) {
  std::vector<CMat> f;
  f.reserve(ops.size());
  for (const CMat& m : ops) f.push_back(normalize_matrix(m));
  return f;
}

bool same_element(const std::vector<CMat>& a, const std::vector<CMat>& b, double tol) {
  for (std::size_t s = 0; s < a.size(); ++s)
    if ((a[s] - b[s]).norm() > tol) return false;
  return true;
}

}  // namespace

GroupOrderResult group_order(const StateVector& psi,
                             const std::vector<LocalOperatorString>& generators,
                             int cap, double tol) {
  if (generators.empty()) throw ValidationError("group_order: no generators");
  const int n = psi.n_sites;
  for (const auto& g : generators) {
    SymmetryCheck chk = is_symmetry_scaled(psi, g, 1e-7);
    if (!chk.ok)
      throw ValidationError("group_order: generator is not a symmetry (residual " +
                            std::to_string(chk.residual) + ")");
  }
  const int d = state_local_dim(psi, n);

  std::vector<std::vector<CMat>> elems;
  std::deque<std::vector<CMat>> work;
  auto add = [&](const std::vector<CMat>& ops) {
    std::vector<CMat> f = fingerprint(ops);
    for (const auto& e : elems)
      if (same_element(e, f, tol)) return;
    elems.push_back(f);
    work.push_back(f);
  };

  std::vector<CMat> id(static_cast<std::size_t>(n), CMat::Identity(d, d));
  add(id);
  for (const auto& g : generators) add(g.ops);

  while (!work.empty()) {
    if (static_cast<int>(elems.size()) > cap) return GroupOrderResult{true, cap};
    std::vector<CMat> e = work.front();
    work.pop_front();
    // cyclic translation conjugate
    std::vector<CMat> t(e.begin() + 1, e.end());
    t.push_back(e.front());
    add(t);
    // products with everything known so far (both orders)
    std::size_t known = elems.size();
    for (std::size_t k = 0; k < known; ++k) {
      if (static_cast<int>(elems.size()) > cap) return GroupOrderResult{true, cap};
      std::vector<CMat> ab(e.size()), ba(e.size());
      for (std::size_t s = 0; s < e.size(); ++s) {
        ab[s] = e[s] * elems[k][s];
        ba[s] = elems[k][s] * e[s];
      }
      add(ab);
      add(ba);
    }
  }
  if (static_cast<int>(elems.size()) > cap) return GroupOrderResult{true, cap};
  return GroupOrderResult{false, static_cast<int>(elems.size())};
}

double conversion_probability(const ConversionProblem& p) {
  if (p.g_ops.ops.size() != p.h_ops.ops.size())
    throw ValidationError("conversion_probability: operator strings differ in length");
  if (p.psi_norm2 <= 0 || p.phi_norm2 <= 0)
    throw ValidationError("conversion_probability: norms must be positive");
  double lambda_max = 1.0;
  for (std::size_t s = 0; s < p.g_ops.ops.size(); ++s) {
    const CMat& g = p.g_ops.ops[s];
    const CMat& h = p.h_ops.ops[s];
    if (std::abs(g.determinant()) < 1e-14 || std::abs(h.determinant()) < 1e-14)
      throw ValidationError("conversion_probability: singular site operator");
    CMat G = g.adjoint() * g, H = h.adjoint() * h;
    Eigen::GeneralizedSelfAdjointEigenSolver<CMat> es(H, G);  // H v = lambda G v
    lambda_max *= es.eigenvalues().maxCoeff();
  }
  return (p.phi_norm2 / p.psi_norm2) / lambda_max;
}

std::optional<std::vector<double>> det_locc_feasible(const std::vector<CMat>& qubit_syms,
                                                     const CMat& h1, double tol) {
  if (qubit_syms.empty()) throw ValidationError("det_locc_feasible: no symmetries");
  const int K = static_cast<int>(qubit_syms.size());
  CMat HH = h1.adjoint() * h1;
  std::vector<CMat> M;
  double scale = 0;
  for (const CMat& g : qubit_syms) {
    if (g.rows() != 2 || g.cols() != 2)
      throw ValidationError("det_locc_feasible: qubit operators must be 2x2");
    M.push_back(g.adjoint() * HH * g);
    scale = std::max(scale, M.back().norm());
  }
  // sum_k p_k M_k = c * 1  <=>  three real linear constraints + normalization
  Eigen::MatrixXd A(4, K);
  for (int k = 0; k < K; ++k) {
    A(0, k) = M[k](0, 1).real();
    A(1, k) = M[k](0, 1).imag();
    A(2, k) = (M[k](0, 0) - M[k](1, 1)).real();
    A(3, k) = 1.0;
  }
  Eigen::Vector4d rhs(0, 0, 0, 1);

  auto verify = [&](const std::vector<double>& p) {
    CMat acc = CMat::Zero(2, 2);
    for (int k = 0; k < K; ++k) acc += p[k] * M[k];
    cplx c = acc.trace() / 2.0;
    return std::abs(c) > 0 &&
           (acc - c * CMat::Identity(2, 2)).norm() <= tol * std::max(scale, 1.0);
  };

  // enumerate supports of size <= 4 (basic feasible solutions)
  std::vector<int> idx;
  std::function<std::optional<std::vector<double>>(int, int)> rec =
      [&](int start, int want) -> std::optional<std::vector<double>> {
    if (want == 0) {
      Eigen::MatrixXd As(4, idx.size());
      for (std::size_t j = 0; j < idx.size(); ++j) As.col(j) = A.col(idx[j]);
      Eigen::VectorXd sol = As.colPivHouseholderQr().solve(rhs);
      if ((As * sol - rhs).norm() > 1e-9) return std::nullopt;
      std::vector<double> p(K, 0.0);
      double sum = 0;
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (sol(j) < -1e-9) return std::nullopt;
        p[idx[j]] = std::max(0.0, sol(j));
        sum += p[idx[j]];
      }
      if (std::abs(sum - 1.0) > 1e-9) return std::nullopt;
      if (!verify(p)) return std::nullopt;
      return p;
    }
    for (int k = start; k <= K - want; ++k) {
      idx.push_back(k);
      auto r = rec(k + 1, want - 1);
      idx.pop_back();
      if (r) return r;
    }
    return std::nullopt;
  };
  for (int support = 1; support <= std::min(4, K); ++support) {
    auto r = rec(0, support);
    if (r) return r;
  }
  return std::nullopt;
}

}  // namespace timps
