#pragma once
// Matrix-pencil classification of 2xDxD tensors, per-class fiducial symmetry
// generators, the generic cycle concatenation checker, and the D>3
// diagonal-pencil qubit-symmetry search.
#include <timps/linalg.hpp>
#include <timps/mps.hpp>
#include <timps/types.hpp>

#include <optional>
#include <string>
#include <vector>

namespace timps {

// P(x) = A0 - x A1 (eigenvalues are the roots of det, kInf on degree drop)
struct MatrixPencil {
  CMat A0, A1;
};

MatrixPencil pencil_of(const MpsTensor& a);

// classification result: label + eigenvalue data
struct PencilClass {
  ClassLabel label;
  std::vector<cplx> eigenvalues;  // with multiplicity; kInf allowed; empty for LLT
  std::vector<int> signatures;    // Jordan block sizes per eigenvalue cluster
};

// qubit operation g (2x2, acting as A'^i = sum_j g_ij A^j) moving all pencil
// eigenvalues to finite values; identity if they already are (or if the pencil
// is singular). Eigenvalues transform by the Mobius map of g itself.
std::pair<Mobius, MatrixPencil> regularize_qubit(const MatrixPencil& p);

// SLOCC class of a 2x3x3 tensor. Biseparable / degenerate inputs -> OutOfScopeError.
PencilClass classify_2x3x3(const MpsTensor& a, double tol = 1e-7);

// A fiducial symmetry of a class representative |A>:
//   sum_j g_ij x A^j y = rho * A^i   for all i
// (equivalently (g (x) x (x) y^T)|A> = rho |A>; the third tensor factor is y^T).
struct FiducialSymmetry {
  CMat g;  // 2x2
  CMat x;  // D x D, left virtual
  CMat y;  // D x D, right virtual (right multiplier in the relation above)
  cplx rho{1.0};
  std::string free_params;  // human-readable residual 1 (x) B (x) C freedom
};

// the 2*D*D amplitude vector of |A| (index = (i*D + alpha)*D + beta)
CVec fiducial_state(const MpsTensor& a);

// residual of the fiducial-symmetry relation, relative scale
double fiducial_residual(const MpsTensor& a, const FiducialSymmetry& h);

// closed-form fiducial symmetry of the class representative for a given qubit
// operator g. Succeeds for the class-specific admissible set only (see module
// notes); stabilizer parameters (diagonal/triangular B) default to identity.
std::optional<FiducialSymmetry> fiducial_symmetry(ClassLabel cls, const CMat& g,
                                                  double tol = kDefaultTol);

// A k-cycle of fiducial symmetries of a family member 1 (x) b (x) 1 |rep>.
// Virtual operators are stored at representative level; the link condition is
//   y_k b x_{k+1} b^{-1} = nu_k * 1   (indices mod k)
// and scales[k] = rho_k * nu_k, so that the operator string
//   site s |-> scales[s mod k] * g_{s mod k}
// is an exact (not just projective) symmetry of the length-N state, k | N.
struct CycleSpec {
  std::vector<CMat> physical_ops;               // g_k
  std::vector<std::pair<CMat, CMat>> virtual_ops;  // (x_k, y_k)
  std::vector<CMat> diag_params;                // the B_k stabilizer choices
  std::vector<cplx> scales;                     // lambda_k = rho_k * nu_k
  int length() const { return static_cast<int>(physical_ops.size()); }
};

struct ConcatenationCheck {
  bool ok;
  std::vector<double> link_residuals;  // per-link relative residuals
  std::vector<double> sym_residuals;   // per-element fiducial-symmetry residuals
};

// verify a cycle on the family member b of class cls (see CycleSpec contract)
ConcatenationCheck check_concatenation(ClassLabel cls, const CMat& b,
                                       const CycleSpec& cycle,
                                       double tol = 1e-8);

// per-site operator string of length n (cycle length must divide n)
std::vector<CMat> cycle_to_ops(const CycleSpec& cycle, int n);

// qubit-symmetry search for D>3 diagonal pencils via Mobius maps of the
// eigenvalue multiset (>=3 distinct values: finite list; exactly 2: continuum)
struct DiagPencilSyms {
  std::vector<Mobius> maps;  // empty when continuum = true
  bool continuum = false;
  std::string note;
};
DiagPencilSyms diag_pencil_syms(const std::vector<cplx>& eigenvalues,
                                double tol = kDefaultTol);

}  // namespace timps
