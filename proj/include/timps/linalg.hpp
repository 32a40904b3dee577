#pragma once
// Small dense-complex kernel used everywhere else: proportionality tests,
// 2x2 Jordan forms with a canonical eigenvalue representative, spectra of
// monomial (generalized permutation) matrices, Mobius maps on the sphere.
#include <timps/types.hpp>

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace timps {

// a ~ lambda * b ?  Returns lambda on success. Frobenius test: |a - lambda b| <= tol*|a|.
// Shape mismatch -> ValidationError. Both (numerically) zero -> ValidationError
// ("ambiguous scale"). b zero but a nonzero -> nullopt.
std::optional<cplx> proportional(const CMat& a, const CMat& b, double tol = kDefaultTol);

// Jordan data of an invertible 2x2 matrix g: g = scale * S J S^{-1} with det(g/scale)=1.
// chi lives in the canonical domain D: |chi|>=1; if |chi|>1 additionally Im>0 or
// (Im=0 and Re>0); if |chi|=1 additionally Re>=0 and Im>=0 (so i is in D, -1 is not).
// J = diag(chi, 1/chi) when diagonalizable, [[1,1],[0,1]] otherwise (chi = 1 there).
struct Jordan2 {
  bool diagonalizable;
  cplx chi;
  CMat S;      // columns: eigenvector(chi), eigenvector(1/chi)  (or generalized pair)
  CMat J;
  cplx scale;  // g = scale * S J S^{-1}
};
Jordan2 jordan_2x2(const CMat& g, double tol = kDefaultTol);

// Spectrum of P_sigma * D for sigma in S_n and D = diag(d). Eigenvalues come from the
// cycle decomposition: a cycle of length l with entry product p contributes the l-th
// roots p^{1/l} e^{2 pi i k/l}. Eigenvectors are returned as columns (unit norm).
// Any zero entry of d -> ValidationError.
struct MonomialEig {
  std::vector<cplx> values;
  CMat vectors;
};
MonomialEig monomial_eig(const std::vector<int>& sigma, const std::vector<cplx>& d);

// P_sigma = sum_i |sigma(i)><i|
CMat perm_matrix(const std::vector<int>& sigma);

// Mobius map z -> (alpha z + beta)/(gamma z + delta), total on the sphere.
struct Mobius {
  cplx alpha{1}, beta{0}, gamma{0}, delta{1};
  CMat matrix() const;
};
Mobius mobius_from_matrix(const CMat& m);
cplx mobius_apply(const Mobius& m, const cplx& z);

// chordal (sphere) distance; handles infinity on both sides
double chordal(const cplx& u, const cplx& v);

// Unique Mobius map through >=3 pairs (z_i -> w_i). Needs three pairwise-distinct
// sources (else ValidationError: under-determined); the map from the first three
// distinct sources is checked against all remaining pairs -> nullopt on mismatch.
std::optional<Mobius> mobius_solve(const std::vector<std::pair<cplx, cplx>>& pairs,
                                   double tol = kDefaultTol);

// smallest m in [1, m_max] with z^m = 1 (within tol); nullopt if none (incl. |z| != 1)
std::optional<int> unit_root_order(const cplx& z, int m_max, double tol = kDefaultTol);

// coefficients c_k of det(a0 + x a1) = sum_k c_k x^k for square a0, a1 (n <= 4),
// by expanding over column subsets; c has size n+1
std::vector<cplx> pencil_char_poly(const CMat& a0, const CMat& a1);

// --- generic helpers -------------------------------------------------------

CMat kron(const CMat& a, const CMat& b);
// column-major vectorization, so vec(A X B) = (B^T kron A) vec(X)
CVec vec_cm(const CMat& m);
CMat unvec_cm(const CVec& v, int rows, int cols);
// orthonormal basis of the (numerical) null space, via SVD; rtol relative to s_max
CMat nullspace(const CMat& m, double rtol = 1e-10);
// numerical rank via SVD with threshold rtol * s_max
int svd_rank(const CMat& m, double rtol = 1e-8);
// deterministic normalization: divide by the entry of largest modulus
// (first in column-major order on near-ties), then unit Frobenius norm
CMat normalize_matrix(const CMat& m);

}  // namespace timps
