#pragma once
// Translationally invariant MPS basics: representative tensors of the six
// 2x3x3 classes, the 1-by-b-by-1 transformed family tensors, brute-force
// state vectors, injectivity length, and gauge relations between tensors.
#include <timps/linalg.hpp>
#include <timps/types.hpp>

#include <optional>
#include <vector>

namespace timps {

struct MpsTensor {
  int d = 0;  // physical dimension
  int D = 0;  // bond dimension
  std::vector<CMat> mats;  // mats[j] is D x D
};

struct StateVector {
  int n_sites = 0;
  CVec amplitudes;  // index = sum_s j_s * d^{N-1-s}: site 0 is most significant
};

// A^j = lambda * x^{-1} B^j x
struct GaugeRelation {
  cplx lambda;
  CMat x;
};

// representative tensors (b = identity) of each class
MpsTensor class_representative(ClassLabel cls);

// the tensor of the class family member with parameter matrix b (3x3, invertible).
//   Momega:  A^0 = diag(1,w,w^2) * b,  A^1 = b          (row-scaled)
//   others:  A^j = b * Abar^j                           (left multiplication)
MpsTensor tensor_from_b(ClassLabel cls, const CMat& b);

// exact trace-evaluation of the TI MPS on N sites (2 <= N <= 20); zero vectors
// are a legal result and are not normalized away
StateVector build_state(const MpsTensor& a, int n);

// smallest L <= l_max such that the 2^L word matrices span all of C^{DxD}
// (numerical rank via singular values, threshold tol * s_max)
std::optional<int> injectivity_length(const MpsTensor& a, int l_max = 10,
                                      double tol = 1e-8);

// find (lambda, x) with A^j = lambda x^{-1} B^j x for all j, if one exists
std::optional<GaugeRelation> gauge_relation(const MpsTensor& a, const MpsTensor& b,
                                            double tol = kDefaultTol);

}  // namespace timps
