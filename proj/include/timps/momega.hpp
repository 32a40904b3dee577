#pragma once
// Symmetry and SLOCC machinery for the three-distinct-eigenvalue (Momega)
// class: pruned cycle-candidate enumeration, per-b realizable-cycle solving,
// closed-form family matching, and (b -> c) global-equivalence checks.
#include <timps/pencil.hpp>

#include <array>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace timps {

// the six letters: identity, the two 3-cycles, the three transpositions
enum class Perm : int { Id = 0, S = 1, S2 = 2, Tau = 3, Eps = 4, Kap = 5 };

struct PermLabel {
  Perm name;
  std::array<int, 3> sigma;  // i -> sigma[i]
  CMat g;        // 2x2 qubit operator
  CMat P;        // P_sigma = sum_i |sigma(i)><i|
  CMat D;        // D_sigma = diag(1,w,w^2) for odd sigma, identity otherwise
};

const PermLabel& perm_label(Perm p);
const std::array<Perm, 6>& all_perms();
const char* perm_name(Perm p);

// projective Cayley tables: mul(a,b) = letter c with g_a g_b ~ g_c
Perm perm_mul(Perm a, Perm b);
Perm perm_inv(Perm a);

using PermString = std::vector<Perm>;

// One row of the cycle table: a named sigma-string.
struct CycleLabel {
  std::string name;      // C0, T0^tau, ..., T7^kappa
  PermString sequence;
};

// the 27 named nontrivial cycle shapes (lengths 1,2,3,4,6) + trivial "1"
const std::vector<CycleLabel>& cycle_table();
// the unrealizable tilde candidates surviving enumeration
const std::vector<CycleLabel>& tilde_candidates();

// Tree-grown candidate cycle strings over the given generators, pruned by the
// three structural rules (no adjacent identities unless fully trivial; no
// mixing of transposition and 3-cycle letters; repeated pairs force repeated
// successors in the string and in all offset-product strings), terminated on
// pair repetition, deduplicated up to rotation.
std::vector<PermString> enumerate_candidates(const std::vector<Perm>& generators,
                                             int max_len = 38);

// strings derivable from s by translation and (inverse-)offset-products;
// used to match enumerated candidates against named table rows
std::set<PermString> generated_closure(const PermString& s);

// Solve the around-the-cycle diagonal consistency problem for the sigma-string
// on family members b (and c; c = b gives symmetry cycles):
//   P_{s_k} b P_{s_{k+1}}^{-1} D_{s_{k+1}}^{-1} B_{k+1}  ~  B_k c   (k mod n)
// Returns a full witness CycleSpec (representative-level operators) on success.
std::optional<CycleSpec> realize_cycle(const CMat& b, const CMat& c,
                                       const PermString& s, double tol = 1e-8);

struct RealizedCycle {
  CycleLabel label;
  CycleSpec witness;
};

// all realized nontrivial table rows for the family member b (the trivial
// 1-cycle exists for every b and is not listed)
std::vector<RealizedCycle> realizable_cycles(const CMat& b, double tol = 1e-8);

// Obs.-4 non-normality precheck: returns the triggering pattern description
// (generalized permutation, or an index whose row+column are purely diagonal)
// or nullopt if no pattern applies.
std::optional<std::string> obs4_pattern(const CMat& b, double tol = 1e-9);

// names of the closed-form families containing b (up to diagonal conjugation
// and the discrete row/phase choices)
std::set<std::string> family_membership(const CMat& b, double tol = 1e-8);

// random member of the named family (generic parameters, random diagonal
// conjugation, random discrete choices); obs4_safe avoids the degenerate
// parameter choices that make b a generalized permutation matrix
CMat sample_family(const std::string& name, std::mt19937& rng, bool obs4_safe = true);
std::vector<std::string> family_names();

// (b -> c) 1-cycles: searches the six qubit operators g_sigma, solving
//   b P_sigma^{-1} B D_sigma^{-1}  ~  P_sigma^{-1} B c
// for diagonal B. A witness (g, B) means Psi(A_b) ~ g^{(x)N} Psi(A_c) for all N.
struct GlobalEquiv {
  CMat g;  // 2x2
  CMat B;  // diagonal 3x3
  Perm sigma;
};
std::optional<GlobalEquiv> global_equiv(const CMat& b, const CMat& c,
                                        double tol = 1e-8);

// (b -> c) k-cycles for k in {1,2}: SLOCC witnesses usable when k | N; the
// returned CycleSpec's operator string maps Psi(A_c) onto Psi(A_b) up to scale
std::optional<CycleSpec> slocc_cycle(const CMat& b, const CMat& c, int k,
                                     double tol = 1e-8);

}  // namespace timps
