#include <timps/pencil.hpp>

#include <timps/momega.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

namespace timps {

namespace {

cplx poly_eval(const std::vector<cplx>& c, const cplx& x) {
  cplx acc = 0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

std::vector<cplx> poly_deriv(const std::vector<cplx>& c) {
  std::vector<cplx> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(double(k) * c[k]);
  return d;
}

// roots of sum c_k x^k via the companion matrix; c.back() must dominate noise
std::vector<cplx> poly_roots(const std::vector<cplx>& c) {
  int n = static_cast<int>(c.size()) - 1;
  if (n <= 0) return {};
  if (n == 1) return {-c[0] / c[1]};
  CMat comp = CMat::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(n)];
  Eigen::ComplexEigenSolver<CMat> es(comp);
  std::vector<cplx> out;
  for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

struct Cluster {
  cplx value;  // kInf allowed
  int alg;
  int geo = 0;
};

// eigenvalue structure of a regular 3x3 pencil det(A0 - x A1), multiplicities
// decided by polynomial residuals: companion roots of a triple eigenvalue
// split like eps^(1/3), so distance clustering alone cannot be trusted
std::vector<Cluster> eigen_structure(const std::vector<cplx>& q, double thr,
                                     double tol) {
  double qmax = 0;
  for (const cplx& c : q) qmax = std::max(qmax, std::abs(c));
  int deg = 3;
  while (deg > 0 && std::abs(q[static_cast<std::size_t>(deg)]) <= thr) --deg;
  std::vector<Cluster> cl;
  auto resid_at = [&](const cplx& x) {
    return std::abs(poly_eval(q, x)) / (qmax * std::pow(std::max(1.0, std::abs(x)), 3.0));
  };
  if (deg == 0) {
    cl.push_back({kInf, 3});
  } else if (deg == 1) {
    cl.push_back({-q[0] / q[1], 1});
    cl.push_back({kInf, 2});
  } else if (deg == 2) {
    cplx disc = q[1] * q[1] - 4.0 * q[2] * q[0];
    if (std::abs(disc) <= tol * qmax * qmax) {
      cl.push_back({-q[1] / (2.0 * q[2]), 2});
      cl.push_back({kInf, 1});
    } else {
      cplx s = std::sqrt(disc);
      cl.push_back({(-q[1] + s) / (2.0 * q[2]), 1});
      cl.push_back({(-q[1] - s) / (2.0 * q[2]), 1});
      cl.push_back({kInf, 1});
    }
  } else {
    cplx lam3 = -q[2] / (3.0 * q[3]);
    std::vector<cplx> dq = poly_deriv(q);
    double d_resid = std::abs(poly_eval(dq, lam3)) /
                     (qmax * std::pow(std::max(1.0, std::abs(lam3)), 2.0));
    if (resid_at(lam3) <= tol && d_resid <= std::pow(tol, 2.0 / 3.0)) {
      cl.push_back({lam3, 3});
    } else {
      // double root = root of q' with vanishing q-residual
      std::vector<cplx> dr = poly_roots(dq);
      std::optional<cplx> dbl;
      double best = tol;
      for (const cplx& mu : dr) {
        double r = resid_at(mu);
        if (r <= best) {
          best = r;
          dbl = mu;
        }
      }
      if (dbl) {
        cplx third = -q[2] / q[3] - 2.0 * (*dbl);
        if (chordal(third, *dbl) <= 1e-7) {
          cl.push_back({*dbl, 3});
        } else {
          cl.push_back({*dbl, 2});
          cl.push_back({third, 1});
        }
      } else {
        std::vector<cplx> roots = poly_roots(q);
        // chordal-merge backstop for near-equal simple roots
        for (const cplx& r : roots) {
          bool merged = false;
          for (Cluster& c : cl)
            if (chordal(c.value, r) <= 1e-7) {
              c.alg += 1;
              merged = true;
              break;
            }
          if (!merged) cl.push_back({r, 1});
        }
      }
    }
  }
  return cl;
}

bool value_is_inf(const cplx& v) { return is_inf(v); }

}  // namespace

MatrixPencil pencil_of(const MpsTensor& a) {
  if (a.d != 2) throw ValidationError("pencil_of: physical dimension must be 2");
  return MatrixPencil{a.mats[0], a.mats[1]};
}

std::pair<Mobius, MatrixPencil> regularize_qubit(const MatrixPencil& p) {
  const int n = static_cast<int>(p.A0.rows());
  std::vector<cplx> q = pencil_char_poly(p.A0, -p.A1);
  double sref = std::pow(p.A0.norm() + p.A1.norm() + 1e-300, n);
  double thr = 1e-7 * sref;
  double qmax = 0;
  for (const cplx& c : q) qmax = std::max(qmax, std::abs(c));
  if (qmax <= thr) return {Mobius{}, p};                      // singular: nothing to move
  if (std::abs(q[static_cast<std::size_t>(n)]) > thr) return {Mobius{}, p};  // already finite
  std::vector<cplx> cands = {0, 1, -1, 2, -2, cplx(0, 1), cplx(0, -1), cplx(1, 1), 0.5};
  for (int k = 0; k < 11; ++k)
    cands.push_back(0.7 * std::exp(cplx(0, 2.0 * kPi * k / 11.0)));
  cplx best_t = 0;
  double best = -1;
  for (const cplx& t : cands) {
    double v = std::abs(poly_eval(q, t));
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  // qubit op [[0,1],[1,-t]]: A0' = A1, A1' = A0 - t A1; eigenvalues x -> 1/(x - t)
  Mobius m;
  m.alpha = 0;
  m.beta = 1;
  m.gamma = 1;
  m.delta = -best_t;
  return {m, MatrixPencil{p.A1, p.A0 - best_t * p.A1}};
}

PencilClass classify_2x3x3(const MpsTensor& a, double tol) {
  if (a.d != 2 || a.D != 3)
    throw ValidationError("classify_2x3x3: tensor must be 2x3x3");
  const CMat& A0 = a.mats[0];
  const CMat& A1 = a.mats[1];
  std::vector<cplx> q = pencil_char_poly(A0, -A1);
  double sref = std::pow(A0.norm() + A1.norm() + 1e-300, 3.0);
  double thr = tol * sref;
  double qmax = 0;
  for (const cplx& c : q) qmax = std::max(qmax, std::abs(c));
  if (qmax <= thr) {
    CMat stack_v(6, 3), stack_h(3, 6);
    stack_v << A0, A1;
    stack_h << A0, A1;
    if (svd_rank(stack_v, 1e-8) == 3 && svd_rank(stack_h, 1e-8) == 3)
      return PencilClass{ClassLabel::LLT, {}, {}};
    throw OutOfScopeError("degenerate singular pencil (common kernel): biseparable input");
  }

  std::vector<Cluster> cl = eigen_structure(q, thr, tol);
  for (Cluster& c : cl) {
    CMat m = value_is_inf(c.value) ? A1 : CMat(A0 - c.value * A1);
    c.geo = 3 - svd_rank(m, 1e-6);
    if (c.geo < 1 || c.geo > c.alg)
      throw OutOfScopeError("unresolved pencil eigenstructure");
  }
  std::sort(cl.begin(), cl.end(), [](const Cluster& a_, const Cluster& b_) {
    if (a_.alg != b_.alg) return a_.alg > b_.alg;
    bool ia = value_is_inf(a_.value), ib = value_is_inf(b_.value);
    if (ia != ib) return ib;
    if (a_.value.real() != b_.value.real()) return a_.value.real() < b_.value.real();
    return a_.value.imag() < b_.value.imag();
  });

  PencilClass out;
  for (const Cluster& c : cl) {
    for (int i = 0; i < c.alg; ++i) out.eigenvalues.push_back(c.value);
    // Jordan block sizes from (algebraic, geometric) multiplicities
    if (c.alg == c.geo) {
      for (int i = 0; i < c.alg; ++i) out.signatures.push_back(1);
    } else if (c.alg == 2) {
      out.signatures.push_back(2);
    } else if (c.alg == 3 && c.geo == 1) {
      out.signatures.push_back(3);
    } else {  // alg 3, geo 2
      out.signatures.push_back(2);
      out.signatures.push_back(1);
    }
  }

  if (cl.size() == 3) {
    out.label = ClassLabel::Momega;
  } else if (cl.size() == 2) {
    if (cl[0].geo == 3) throw OutOfScopeError("biseparable input (rank-collapsed pencil)");
    out.label = (cl[0].geo == 2) ? ClassLabel::DiagDegenerate
                                 : ClassLabel::Jordan2plus1Variant;
  } else {
    if (cl[0].geo == 3) throw OutOfScopeError("biseparable input (pencil proportional to a point)");
    out.label = (cl[0].geo == 1) ? ClassLabel::Jordan3 : ClassLabel::Jordan2plus1;
  }
  return out;
}

CVec fiducial_state(const MpsTensor& a) {
  CVec v(static_cast<Eigen::Index>(a.d) * a.D * a.D);
  for (int i = 0; i < a.d; ++i)
    for (int al = 0; al < a.D; ++al)
      for (int be = 0; be < a.D; ++be)
        v((static_cast<Eigen::Index>(i) * a.D + al) * a.D + be) =
            a.mats[static_cast<std::size_t>(i)](al, be);
  return v;
}

double fiducial_residual(const MpsTensor& a, const FiducialSymmetry& h) {
  double scale = 0;
  for (const CMat& m : a.mats) scale = std::max(scale, m.norm());
  scale *= std::max(1.0, std::abs(h.rho));
  if (scale == 0) throw ValidationError("fiducial_residual: zero tensor");
  double worst = 0;
  for (int i = 0; i < a.d; ++i) {
    CMat lhs = CMat::Zero(a.D, a.D);
    for (int j = 0; j < a.d; ++j)
      lhs += h.g(i, j) * h.x * a.mats[static_cast<std::size_t>(j)] * h.y;
    worst = std::max(worst, (lhs - h.rho * a.mats[static_cast<std::size_t>(i)]).norm());
  }
  return worst / scale;
}

namespace {

// least-squares rho for the candidate (g, x, y) on the representative, then a
// residual gate
std::optional<FiducialSymmetry> finish_symmetry(ClassLabel cls, FiducialSymmetry h,
                                                double tol) {
  MpsTensor rep = class_representative(cls);
  cplx num = 0;
  double den = 0;
  for (int i = 0; i < rep.d; ++i) {
    CMat lhs = CMat::Zero(rep.D, rep.D);
    for (int j = 0; j < rep.d; ++j)
      lhs += h.g(i, j) * h.x * rep.mats[static_cast<std::size_t>(j)] * h.y;
    num += (rep.mats[static_cast<std::size_t>(i)].adjoint() * lhs).trace();
    den += std::pow(rep.mats[static_cast<std::size_t>(i)].norm(), 2.0);
  }
  h.rho = num / den;
  if (fiducial_residual(rep, h) > std::max(tol, 1e-9)) return std::nullopt;
  return h;
}

}  // namespace

std::optional<FiducialSymmetry> fiducial_symmetry(ClassLabel cls, const CMat& g,
                                                  double tol) {
  if (g.rows() != 2 || g.cols() != 2)
    throw ValidationError("fiducial_symmetry: g must be 2x2");
  double gn = g.norm();
  if (gn == 0 || std::abs(g.determinant()) <= 1e-12 * gn * gn) return std::nullopt;

  FiducialSymmetry h;
  h.g = g;
  switch (cls) {
    case ClassLabel::Momega: {
      CMat gn_ = normalize_matrix(g);
      for (Perm p : all_perms()) {
        const PermLabel& L = perm_label(p);
        if ((gn_ - normalize_matrix(L.g)).norm() <= 100 * std::max(tol, 1e-12)) {
          h.x = (L.D * L.P).inverse();  // P^-1 D^-1
          h.y = L.P;
          h.free_params =
              "x -> x diag(1,B11,B22), y -> diag(1,B11,B22)^-1 y (2 free params)";
          return finish_symmetry(cls, h, tol);
        }
      }
      return std::nullopt;
    }
    case ClassLabel::LLT: {
      cplx det = g.determinant();
      cplx al = g(0, 0), be = g(0, 1), ga = g(1, 0), de = g(1, 1);
      CMat x = CMat::Zero(3, 3), y = CMat::Zero(3, 3);
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
      h.x = x / det;
      h.y = y / det;
      h.free_params =
          "x -> x B with B = [[1,B01,B02],[0,B11,0],[0,0,B11]], y -> B^-1-type "
          "(3 free params)";
      return finish_symmetry(cls, h, tol);
    }
    case ClassLabel::Jordan3:
    case ClassLabel::Jordan2plus1: {
      if (std::abs(g(0, 1)) > tol * gn) return std::nullopt;
      if (std::abs(g(1, 1)) <= tol * gn) return std::nullopt;
      cplx al = g(0, 0) / g(1, 1), ga = g(1, 0) / g(1, 1);
      CMat x = CMat::Zero(3, 3), y = CMat::Zero(3, 3);
      if (cls == ClassLabel::Jordan3) {
        x(0, 0) = 1.0 / al;
        x(1, 1) = 1;
        x(1, 2) = -ga;
        x(2, 2) = al;
        y(0, 0) = al;
        y(0, 1) = -ga;
        y(1, 1) = 1;
        y(2, 2) = 1.0 / al;
        h.free_params = "B unipotent upper-triangular Toeplitz (2 free params)";
      } else {
        x(0, 0) = 1;
        x(1, 1) = al;
        x(2, 2) = 1;
        y(0, 0) = 1;
        y(0, 1) = -ga / al;
        y(1, 1) = 1.0 / al;
        y(2, 2) = 1;
        h.free_params =
            "B = [[1,B01,B02],[0,1,0],[0,B21,B22]] (4 free params)";
      }
      h.x = x;
      h.y = y;
      return finish_symmetry(cls, h, tol);
    }
    case ClassLabel::Jordan2plus1Variant:
    case ClassLabel::DiagDegenerate: {
      if (std::abs(g(0, 1)) > tol * gn || std::abs(g(1, 0)) > tol * gn)
        return std::nullopt;
      cplx al = g(0, 0) / g(1, 1);
      CMat x = CMat::Zero(3, 3), y = CMat::Identity(3, 3);
      if (cls == ClassLabel::Jordan2plus1Variant) {
        x(0, 0) = 1.0 / al;
        x(1, 1) = 1;
        x(2, 2) = 1.0 / al;
        y(0, 0) = al;
        h.free_params = "B = [[1,B01,0],[0,1,0],[0,0,B22]] (2 free params)";
      } else {
        x(0, 0) = 1;
        x(1, 1) = 1;
        x(2, 2) = 1.0 / al;
        h.free_params = "B = GL(2) block + B22 = 1 (4 free params)";
      }
      h.x = x;
      h.y = y;
      return finish_symmetry(cls, h, tol);
    }
  }
  return std::nullopt;
}

ConcatenationCheck check_concatenation(ClassLabel cls, const CMat& b,
                                       const CycleSpec& cycle, double tol) {
  const int n = cycle.length();
  if (n == 0) throw ValidationError("check_concatenation: empty cycle");
  if (static_cast<int>(cycle.virtual_ops.size()) != n ||
      static_cast<int>(cycle.scales.size()) != n)
    throw ValidationError("check_concatenation: inconsistent cycle arrays");
  if (b.rows() != 3 || b.cols() != 3)
    throw ValidationError("check_concatenation: b must be 3x3");
  for (int k = 0; k < n; ++k) {
    if (cycle.physical_ops[static_cast<std::size_t>(k)].rows() != 2 ||
        cycle.physical_ops[static_cast<std::size_t>(k)].cols() != 2)
      throw ValidationError("check_concatenation: physical ops must be 2x2");
    if (cycle.virtual_ops[static_cast<std::size_t>(k)].first.rows() != 3 ||
        cycle.virtual_ops[static_cast<std::size_t>(k)].second.rows() != 3)
      throw ValidationError("check_concatenation: virtual ops must be 3x3");
  }
  CMat binv = b.inverse();
  MpsTensor rep = class_representative(cls);

  ConcatenationCheck out;
  out.ok = true;
  std::vector<cplx> nu(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const CMat& yk = cycle.virtual_ops[static_cast<std::size_t>(k)].second;
    const CMat& xk1 = cycle.virtual_ops[static_cast<std::size_t>((k + 1) % n)].first;
    CMat m = yk * b * xk1 * binv;
    cplx v = m.trace() / 3.0;
    nu[static_cast<std::size_t>(k)] = v;
    double resid = (m - v * CMat::Identity(3, 3)).norm() /
                   std::max(m.norm(), 1e-300);
    out.link_residuals.push_back(resid);
    if (resid > tol || std::abs(v) < 1e-12) out.ok = false;
  }
  for (int k = 0; k < n; ++k) {
    FiducialSymmetry h;
    h.g = cycle.physical_ops[static_cast<std::size_t>(k)];
    h.x = cycle.virtual_ops[static_cast<std::size_t>(k)].first;
    h.y = cycle.virtual_ops[static_cast<std::size_t>(k)].second;
    cplx num = 0;
    double den = 0;
    for (int i = 0; i < rep.d; ++i) {
      CMat lhs = CMat::Zero(rep.D, rep.D);
      for (int j = 0; j < rep.d; ++j)
        lhs += h.g(i, j) * h.x * rep.mats[static_cast<std::size_t>(j)] * h.y;
      num += (rep.mats[static_cast<std::size_t>(i)].adjoint() * lhs).trace();
      den += std::pow(rep.mats[static_cast<std::size_t>(i)].norm(), 2.0);
    }
    h.rho = num / den;
    double resid = fiducial_residual(rep, h);
    // scales[k] must equal rho_k * nu_k for the operator string to be exact
    cplx lam = h.rho * nu[static_cast<std::size_t>(k)];
    double sresid = std::abs(lam - cycle.scales[static_cast<std::size_t>(k)]) /
                    std::max(std::abs(lam), 1e-300);
    resid = std::max(resid, sresid);
    out.sym_residuals.push_back(resid);
    if (resid > tol) out.ok = false;
  }
  return out;
}

std::vector<CMat> cycle_to_ops(const CycleSpec& cycle, int n) {
  const int k = cycle.length();
  if (k == 0 || n <= 0 || n % k != 0)
    throw ValidationError("cycle_to_ops: cycle length must divide n");
  std::vector<CMat> ops;
  ops.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s)
    ops.push_back(cycle.scales[static_cast<std::size_t>(s % k)] *
                  cycle.physical_ops[static_cast<std::size_t>(s % k)]);
  return ops;
}

DiagPencilSyms diag_pencil_syms(const std::vector<cplx>& eigenvalues, double tol) {
  // distinct values with multiplicities (chordal clustering)
  std::vector<cplx> vals;
  std::vector<int> mult;
  for (const cplx& e : eigenvalues) {
    bool found = false;
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (chordal(vals[i], e) <= std::max(tol, 1e-12)) {
        ++mult[i];
        found = true;
        break;
      }
    if (!found) {
      vals.push_back(e);
      mult.push_back(1);
    }
  }
  const int m = static_cast<int>(vals.size());
  if (m < 2)
    throw OutOfScopeError("diag_pencil_syms: fewer than 2 distinct eigenvalues");
  DiagPencilSyms out;
  if (m == 2) {
    out.continuum = true;
    out.note = "Mobius maps preserving a 2-point multiset form a continuum";
    return out;
  }
  double ctol = std::max(tol, 1e-9);
  auto image_ok = [&](const Mobius& mb) {
    // the induced map on distinct values must be a multiplicity-preserving bijection
    std::vector<bool> used(vals.size(), false);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      cplx w = mobius_apply(mb, vals[i]);
      bool hit = false;
      for (std::size_t j = 0; j < vals.size(); ++j) {
        if (used[j] || mult[j] != mult[i]) continue;
        if (chordal(w, vals[j]) <= 1e-7) {
          used[j] = true;
          hit = true;
          break;
        }
      }
      if (!hit) return false;
    }
    return true;
  };
  std::vector<CMat> seen;
  for (int i0 = 0; i0 < m; ++i0)
    for (int i1 = 0; i1 < m; ++i1)
      for (int i2 = 0; i2 < m; ++i2) {
        if (i0 == i1 || i1 == i2 || i0 == i2) continue;
        if (mult[static_cast<std::size_t>(i0)] != mult[0] ||
            mult[static_cast<std::size_t>(i1)] != mult[1] ||
            mult[static_cast<std::size_t>(i2)] != mult[2])
          continue;
        std::optional<Mobius> mb = mobius_solve(
            {{vals[0], vals[static_cast<std::size_t>(i0)]},
             {vals[1], vals[static_cast<std::size_t>(i1)]},
             {vals[2], vals[static_cast<std::size_t>(i2)]}},
            ctol);
        if (!mb || !image_ok(*mb)) continue;
        CMat f = normalize_matrix(mb->matrix());
        bool dup = false;
        for (const CMat& s : seen)
          if ((s - f).norm() <= 1e-8) {
            dup = true;
            break;
          }
        if (!dup) {
          seen.push_back(f);
          out.maps.push_back(*mb);
        }
      }
  out.note = "finite Mobius stabilizer of the eigenvalue multiset";
  return out;
}

}  // namespace timps
