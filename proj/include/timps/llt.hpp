#pragma once
// Analysis of the singular-pencil (LLT) class: (T, v) invariants, flowchart
// symmetry classification, standard form, SLOCC decision, and the special
// non-normal states (b20 = 0 rows, v = 0 dimer-type states).
#include <timps/pencil.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace timps {

// invariants of an LLT family member b (internally rescaled to b20 = 1):
//   T = [[b02 - b00 b22, b10 b22 - b12],
//        [b01 - b00 b21, b10 b21 - b11]],   v = (b10 + b22, b00 + b21)
struct LltInvariants {
  CMat T;              // 2x2
  CVec v;              // 2
  cplx b00, b10;       // the two offset parameters of the parametrization
  Jordan2 jordan;      // Jordan data of T (chi = sigma in the canonical domain)
  std::optional<int> m;  // smallest m with T^m ~ 1 (unit_root_order of sigma^2)
  std::optional<int> r;  // phase index: sigma^2 = e^{2 pi i r/m}, gcd(r,m)=1
};

struct TvResult {
  bool b20_is_zero;
  LltInvariants inv;  // valid iff !b20_is_zero
};

TvResult compute_T_v(const CMat& b, int m_max = 64, double tol = kDefaultTol);

// inverse parametrization: the unique b with b20 = 1, given (T, v, b00, b10);
// the -det(T) sx T^-1 sz block occupies rows 0-1, columns 1-2
CMat b_from_T_v(const CMat& T, const CVec& v, const cplx& b00, const cplx& b10);

struct NormalityVerdict {
  bool normal;
  std::optional<int> L;  // 4 when normal
  std::string reason;
};
NormalityVerdict llt_normality(const CMat& b, double tol = kDefaultTol);

enum class Box { I, IIa, IIb, III, IV, V, VI, VII, VIII };
const char* to_string(Box b);

// A parametric family of symmetry cycles: gops(params) produces the qubit
// operator list of one cycle; the virtual completion comes from llt_cycle_spec.
struct LltDescriptor {
  int cycle_length;
  int n_params;          // continuous complex parameters
  std::string formula;   // display form of the generator
  std::string constraints_on_N;
  std::function<std::vector<CMat>(const std::vector<cplx>&)> gops;
};

struct LltSymmetryReport {
  Box box;
  bool normal;
  std::vector<LltDescriptor> descriptors;
  std::vector<CMat> finite_elements;  // nontrivial global qubit ops, discrete cases
  std::string note;
};

// flowchart classification; b20 must be nonzero (else see special_states)
LltSymmetryReport classify_symmetry(const CMat& b, int m_max = 64,
                                    double tol = kDefaultTol);

// Solve the chain B^{(k)} data for a given qubit-operator cycle on the family
// member b (c = b) or transporting c to b; returns the completed witness:
// per-link solve of the affine consistency conditions in (B01,B02,B11)_k.
std::optional<CycleSpec> llt_cycle_spec(const CMat& b, const std::vector<CMat>& gs,
                                        double tol = 1e-8);
std::optional<CycleSpec> llt_transport_cycle(const CMat& b, const CMat& c,
                                             const std::vector<CMat>& gs,
                                             double tol = 1e-8);

// shared eigenvalue chi of the cycle's qubit operators and the B11 sequence
struct ChiData {
  cplx chi;
  std::vector<cplx> b11_seq;
};
ChiData chi_data(const CycleSpec& cycle);

// standard form: T in JNF with det T = 1 and sigma in the canonical domain,
// offsets zeroed, v canonicalized per box; the record holds the applied ops
struct LltTransform {
  CMat g;          // qubit operator (det 1)
  cplx B11, B01, B02;
};
struct StandardForm {
  CMat T;   // canonical T (JNF, det 1)
  CVec v;   // canonical v
  Box box;
  LltTransform transform;
};
StandardForm standard_form(const CMat& b, double tol = kDefaultTol);

// SLOCC decision for two normal members: det-1 witness g such that
// Psi(A_b) ~ g^{(x)N} Psi(A_c) for every N; none if inequivalent
std::optional<CMat> slocc_equivalent(const CMat& b, const CMat& c,
                                     double tol = 1e-7);

// global equivalence for the v = 0 (non-normal) states: T matching up to the
// +/- twist; none means no global operation relates them at any N
std::optional<CMat> vzero_global_equiv(const CMat& b, const CMat& c,
                                       double tol = 1e-7);

// the dimer superposition |psi->_{01}|psi->_{23}... +/- |psi->_{12}...|psi->_{N-1 0}
StateVector dimer_superposition(int n, int sign);

// special non-normal regimes
struct SpecialVerdict {
  enum class Kind { B20Zero, VZero } kind;

  // b20 = 0: the state is a sum of two product states
  enum class B20Class { Product, Ghz, Other } b20_class = B20Class::Other;
  bool permutation_invariant = false;

  // v = 0
  Box box = Box::VI;             // I, IIa or III
  bool odd_n_vanishes = false;
  int mg_sign = 0;               // +1 -> T ~ 1, -1 -> T ~ i sz, 0 otherwise
  bool equivalent_to_T1 = false; // even-r non-global equivalence to T = 1
  std::vector<CMat> nonglobal_ops;  // length-N witness string when equivalent_to_T1
  std::string note;
};
SpecialVerdict special_states(const CMat& b, int n, double tol = kDefaultTol);

}  // namespace timps
