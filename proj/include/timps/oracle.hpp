#pragma once
// Brute-force ground truth at small N: direct operator application on state
// vectors, symmetry-group closure counting, and the two LOCC formulas.
#include <timps/mps.hpp>
#include <timps/types.hpp>

#include <optional>
#include <vector>

namespace timps {

struct LocalOperatorString {
  std::vector<CMat> ops;  // one per site, each d x d
};

StateVector apply_local_ops(const StateVector& psi, const LocalOperatorString& s);

struct SymmetryCheck {
  bool ok;
  double residual;  // |S psi - psi| / |psi|  (resp. after optimal scale)
  cplx scale{1.0};  // best lambda for the up-to-scale variant
};

// exact-equality convention: S|psi> = |psi>
SymmetryCheck is_symmetry(const StateVector& psi, const LocalOperatorString& s,
                          double tol = kDefaultTol);
// up-to-scale variant: S|psi> = lambda|psi> (SLOCC witnesses only need this)
SymmetryCheck is_symmetry_scaled(const StateVector& psi, const LocalOperatorString& s,
                                 double tol = kDefaultTol);

struct GroupOrderResult {
  bool capped;
  int order;
};

// order of the group generated by the given symmetry strings under composition
// and cyclic translation, by breadth-first closure with scale-invariant
// fingerprint dedup; every generator must pass is_symmetry_scaled first
GroupOrderResult group_order(const StateVector& psi,
                             const std::vector<LocalOperatorString>& generators,
                             int cap = 2000, double tol = 1e-8);

struct ConversionProblem {
  LocalOperatorString g_ops, h_ops;
  double psi_norm2, phi_norm2;
};

// P(psi -> phi) = (|phi|^2/|psi|^2) / lambda_max(G^-1 H) with the per-site
// product structure of lambda_max
double conversion_probability(const ConversionProblem& p);

// probabilities p_k >= 0, sum 1, with sum_k p_k (g_1^k)^dag h1^dag h1 g_1^k ~ 1
std::optional<std::vector<double>> det_locc_feasible(const std::vector<CMat>& qubit_syms,
                                                     const CMat& h1,
                                                     double tol = kDefaultTol);

}  // namespace timps
