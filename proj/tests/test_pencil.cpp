#include "doctest.h"
#include "test_util.hpp"

#include <timps/momega.hpp>
#include <timps/mps.hpp>
#include <timps/oracle.hpp>
#include <timps/pencil.hpp>

#include <cmath>

using namespace timps;
using namespace timps::testutil;

namespace {

const std::array<ClassLabel, 6> kAllClasses = {
    ClassLabel::Momega,        ClassLabel::DiagDegenerate,
    ClassLabel::Jordan3,       ClassLabel::Jordan2plus1,
    ClassLabel::Jordan2plus1Variant, ClassLabel::LLT};

MpsTensor slocc_transform(const MpsTensor& t, const CMat& a, const CMat& l,
                          const CMat& r) {
  MpsTensor out = t;
  for (int i = 0; i < t.d; ++i) {
    CMat acc = CMat::Zero(t.D, t.D);
    for (int j = 0; j < t.d; ++j) acc += a(i, j) * t.mats[static_cast<std::size_t>(j)];
    out.mats[static_cast<std::size_t>(i)] = l * acc * r;
  }
  return out;
}

bool multiset_match(const std::vector<cplx>& got, const std::vector<cplx>& want) {
  if (got.size() != want.size()) return false;
  std::vector<bool> used(want.size(), false);
  for (const cplx& g : got) {
    bool hit = false;
    for (std::size_t i = 0; i < want.size(); ++i) {
      if (used[i]) continue;
      if (chordal(g, want[i]) <= 1e-6) {
        used[i] = true;
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("class representatives classify to their own labels") {
  PencilClass pm = classify_2x3x3(class_representative(ClassLabel::Momega));
  CHECK(pm.label == ClassLabel::Momega);
  CHECK(multiset_match(pm.eigenvalues, {1, omega, omega2}));
  CHECK(pm.signatures == std::vector<int>({1, 1, 1}));

  PencilClass pd = classify_2x3x3(class_representative(ClassLabel::DiagDegenerate));
  CHECK(pd.label == ClassLabel::DiagDegenerate);
  CHECK(multiset_match(pd.eigenvalues, {0, 0, kInf}));
  CHECK(pd.signatures == std::vector<int>({1, 1, 1}));

  PencilClass p3 = classify_2x3x3(class_representative(ClassLabel::Jordan3));
  CHECK(p3.label == ClassLabel::Jordan3);
  CHECK(multiset_match(p3.eigenvalues, {0, 0, 0}));
  CHECK(p3.signatures == std::vector<int>({3}));

  PencilClass p21 = classify_2x3x3(class_representative(ClassLabel::Jordan2plus1));
  CHECK(p21.label == ClassLabel::Jordan2plus1);
  CHECK(multiset_match(p21.eigenvalues, {0, 0, 0}));
  CHECK(p21.signatures == std::vector<int>({2, 1}));

  PencilClass pv = classify_2x3x3(class_representative(ClassLabel::Jordan2plus1Variant));
  CHECK(pv.label == ClassLabel::Jordan2plus1Variant);
  CHECK(multiset_match(pv.eigenvalues, {0, 0, kInf}));
  CHECK(pv.signatures == std::vector<int>({2, 1}));

  PencilClass pl = classify_2x3x3(class_representative(ClassLabel::LLT));
  CHECK(pl.label == ClassLabel::LLT);
  CHECK(pl.eigenvalues.empty());
}

TEST_CASE("classification is invariant under local invertible transformations") {
  for (ClassLabel cls : kAllClasses) {
    MpsTensor rep = class_representative(cls);
    for (int trial = 0; trial < 100; ++trial) {
      MpsTensor t = slocc_transform(rep, rand_invertible(2), rand_invertible(3),
                                    rand_invertible(3));
      CHECK(classify_2x3x3(t).label == cls);
    }
  }
}

TEST_CASE("biseparable and malformed inputs are rejected") {
  MpsTensor t;
  t.d = 2;
  t.D = 3;
  t.mats = {rand_invertible(3), CMat::Zero(3, 3)};
  CHECK_THROWS_AS(classify_2x3x3(t), OutOfScopeError);  // pure qubit factor

  CMat m = rand_invertible(3);
  t.mats = {m, 2.0 * m};
  CHECK_THROWS_AS(classify_2x3x3(t), OutOfScopeError);  // proportional pair

  CMat k0 = CMat::Zero(3, 3), k1 = CMat::Zero(3, 3);
  k0.col(0) = CVec::Random(3);
  k0.col(1) = CVec::Random(3);
  k1.col(0) = CVec::Random(3);
  k1.col(1) = CVec::Random(3);
  t.mats = {k0, k1};  // singular pencil with a common right kernel
  CHECK_THROWS_AS(classify_2x3x3(t), OutOfScopeError);

  MpsTensor bad;
  bad.d = 2;
  bad.D = 2;
  bad.mats = {rand_mat(2, 2), rand_mat(2, 2)};
  CHECK_THROWS_AS(classify_2x3x3(bad), ValidationError);
  CHECK_THROWS_AS(pencil_of(MpsTensor{3, 3, {rand_mat(3, 3), rand_mat(3, 3), rand_mat(3, 3)}}),
                  ValidationError);
}

TEST_CASE("printed example tensors classify as expected") {
  MpsTensor g1;
  g1.d = 2;
  g1.D = 3;
  CMat a0(3, 3), a1(3, 3);
  a0 << cplx(0), omega, omega2, omega, cplx(0), cplx(1), omega2, cplx(1), cplx(0);
  a1 << cplx(0), cplx(1), cplx(1), omega, cplx(0), omega, omega2, omega2, cplx(0);
  g1.mats = {a0, a1};
  PencilClass pc = classify_2x3x3(g1);
  CHECK(pc.label == ClassLabel::Momega);
  CHECK(multiset_match(pc.eigenvalues, {1, omega, omega2}));

  MpsTensor lt;
  lt.d = 2;
  lt.D = 3;
  CMat b0(3, 3), b1(3, 3);
  b0 << cplx(0), cplx(0), cplx(1), cplx(0), cplx(0), cplx(-1), cplx(0), cplx(1), cplx(1);
  b1 << cplx(0), cplx(0), cplx(0), cplx(0), cplx(0), cplx(-1), cplx(1), cplx(0), cplx(0);
  lt.mats = {b0, b1};
  CHECK(classify_2x3x3(lt).label == ClassLabel::LLT);
}

TEST_CASE("qubit regularization moves infinite eigenvalues and records the map") {
  auto [m0, p0] = regularize_qubit(pencil_of(class_representative(ClassLabel::Momega)));
  CHECK((m0.matrix() - CMat::Identity(2, 2)).norm() < 1e-15);
  CHECK((p0.A0 - class_representative(ClassLabel::Momega).mats[0]).norm() < 1e-15);

  auto [ml, pl] = regularize_qubit(pencil_of(class_representative(ClassLabel::LLT)));
  CHECK((ml.matrix() - CMat::Identity(2, 2)).norm() < 1e-15);
  (void)pl;

  for (ClassLabel cls : {ClassLabel::Jordan2plus1Variant, ClassLabel::DiagDegenerate}) {
    MpsTensor rep = class_representative(cls);
    auto [m, p] = regularize_qubit(pencil_of(rep));
    CHECK((m.matrix() - CMat::Identity(2, 2)).norm() > 0.1);
    MpsTensor t;
    t.d = 2;
    t.D = 3;
    t.mats = {p.A0, p.A1};
    PencilClass pc = classify_2x3x3(t);
    CHECK(pc.label == cls);
    for (const cplx& e : pc.eigenvalues) CHECK_FALSE(is_inf(e));
    // eigenvalues move by the recorded Mobius map: {0,0,inf} -> images
    CHECK(multiset_match(pc.eigenvalues,
                         {mobius_apply(m, 0), mobius_apply(m, 0), mobius_apply(m, kInf)}));
  }
}

TEST_CASE("fiducial state layout") {
  CVec v = fiducial_state(class_representative(ClassLabel::Momega));
  REQUIRE(v.size() == 18);
  CHECK(std::abs(v(0) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(v(4) - omega) < 1e-15);
  CHECK(std::abs(v(8) - omega2) < 1e-15);
  CHECK(std::abs(v(9) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(v(13) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(v(17) - cplx(1.0)) < 1e-15);
  CHECK(v.squaredNorm() == doctest::Approx(6.0));
}

TEST_CASE("the three-distinct-eigenvalue class admits exactly six qubit operators") {
  for (Perm p : all_perms()) {
    const PermLabel& L = perm_label(p);
    auto h = fiducial_symmetry(ClassLabel::Momega, L.g);
    REQUIRE(h.has_value());
    CHECK(approx_equal(h->x, CMat((L.D * L.P).inverse()), 1e-12));
    CHECK(approx_equal(h->y, L.P, 1e-12));
    CHECK(std::abs(h->rho - cplx(1.0)) < 1e-12);
    CHECK(fiducial_residual(class_representative(ClassLabel::Momega), *h) < 1e-12);
  }
  // scale covariance
  cplx c = 2.5 * omega;
  auto hs = fiducial_symmetry(ClassLabel::Momega, CMat(c * perm_label(Perm::Tau).g));
  REQUIRE(hs.has_value());
  CHECK(std::abs(hs->rho - c) < 1e-12);

  CMat shear = CMat::Identity(2, 2);
  shear(0, 1) = 1;
  CHECK_FALSE(fiducial_symmetry(ClassLabel::Momega, shear).has_value());
  for (int trial = 0; trial < 20; ++trial)
    CHECK_FALSE(fiducial_symmetry(ClassLabel::Momega, rand_invertible(2)).has_value());
  CHECK_FALSE(fiducial_symmetry(ClassLabel::Momega, CMat::Zero(2, 2)).has_value());
  CHECK_THROWS_AS(fiducial_symmetry(ClassLabel::Momega, rand_mat(3, 3)), ValidationError);
}

TEST_CASE("the singular-pencil class admits every invertible qubit operator") {
  MpsTensor rep = class_representative(ClassLabel::LLT);
  for (int trial = 0; trial < 10; ++trial) {
    CMat g = rand_invertible(2);
    auto h = fiducial_symmetry(ClassLabel::LLT, g);
    REQUIRE(h.has_value());
    CHECK(fiducial_residual(rep, *h) < 1e-9);
    cplx det = g.determinant();
    CHECK(std::abs(h->x(1, 1) - g(0, 0) / det) < 1e-12);
    CHECK(std::abs(h->x(1, 2) + g(0, 1) / det) < 1e-12);
    CHECK(std::abs(h->y(0, 1) + g(1, 0) / det) < 1e-12);
  }
}

TEST_CASE("triangular-class symmetry shapes") {
  auto lower = [&](cplx al, cplx ga, cplx de) {
    CMat g = CMat::Zero(2, 2);
    g(0, 0) = al;
    g(1, 0) = ga;
    g(1, 1) = de;
    return g;
  };
  for (ClassLabel cls : {ClassLabel::Jordan3, ClassLabel::Jordan2plus1}) {
    MpsTensor rep = class_representative(cls);
    for (int trial = 0; trial < 10; ++trial) {
      CMat g = lower(rand_cplx() + cplx(2, 0), rand_cplx(), rand_cplx() + cplx(2, 0));
      auto h = fiducial_symmetry(cls, g);
      REQUIRE(h.has_value());
      CHECK(fiducial_residual(rep, *h) < 1e-9);
    }
    CMat bad = lower(2, 0.3, 1);
    bad(0, 1) = 0.4;
    CHECK_FALSE(fiducial_symmetry(cls, bad).has_value());
  }
  for (ClassLabel cls : {ClassLabel::Jordan2plus1Variant, ClassLabel::DiagDegenerate}) {
    MpsTensor rep = class_representative(cls);
    for (int trial = 0; trial < 10; ++trial) {
      CMat g = CMat::Zero(2, 2);
      g(0, 0) = rand_cplx() + cplx(2, 0);
      g(1, 1) = rand_cplx() + cplx(2, 0);
      auto h = fiducial_symmetry(cls, g);
      REQUIRE(h.has_value());
      CHECK(fiducial_residual(rep, *h) < 1e-9);
    }
    CHECK_FALSE(fiducial_symmetry(cls, lower(2, 0.5, 1)).has_value());
  }
}

TEST_CASE("concatenation checker accepts valid cycles and rejects broken ones") {
  // trivial cycle on random invertible b, both family conventions
  for (ClassLabel cls : {ClassLabel::Momega, ClassLabel::LLT}) {
    CycleSpec triv;
    triv.physical_ops = {CMat::Identity(2, 2)};
    triv.virtual_ops = {{CMat::Identity(3, 3), CMat::Identity(3, 3)}};
    triv.scales = {cplx(1.0)};
    ConcatenationCheck c = check_concatenation(cls, rand_invertible(3), triv);
    CHECK(c.ok);
    CHECK(c.link_residuals[0] < 1e-12);
    CHECK(c.sym_residuals[0] < 1e-12);
  }

  // 3-cycle letter S on the representative member b = 1 is exact with scale 1
  const PermLabel& S = perm_label(Perm::S);
  CycleSpec sc;
  sc.physical_ops = {S.g};
  sc.virtual_ops = {{CMat(S.P.inverse()), S.P}};
  sc.scales = {cplx(1.0)};
  ConcatenationCheck cs = check_concatenation(ClassLabel::Momega, CMat::Identity(3, 3), sc);
  CHECK(cs.ok);

  MpsTensor t = tensor_from_b(ClassLabel::Momega, CMat::Identity(3, 3));
  for (int n : {3, 6}) {
    LocalOperatorString ops;
    ops.ops = cycle_to_ops(sc, n);
    SymmetryCheck chk = is_symmetry(build_state(t, n), ops, 1e-12);
    CHECK(chk.ok);
  }

  // transposition letter without a compensating stabilizer fails the link test
  const PermLabel& T = perm_label(Perm::Tau);
  CycleSpec tc;
  tc.physical_ops = {T.g};
  tc.virtual_ops = {{CMat((T.D * T.P).inverse()), T.P}};
  tc.scales = {cplx(1.0)};
  ConcatenationCheck ct = check_concatenation(ClassLabel::Momega, CMat::Identity(3, 3), tc);
  CHECK_FALSE(ct.ok);
  CHECK(ct.link_residuals[0] > 0.1);

  CycleSpec bad = sc;
  bad.physical_ops = {rand_mat(3, 3)};
  CHECK_THROWS_AS(check_concatenation(ClassLabel::Momega, CMat::Identity(3, 3), bad),
                  ValidationError);
  CHECK_THROWS_AS(cycle_to_ops(sc, 0), ValidationError);
  CycleSpec two;
  two.physical_ops = {CMat::Identity(2, 2), CMat::Identity(2, 2)};
  two.virtual_ops = {{CMat::Identity(3, 3), CMat::Identity(3, 3)},
                     {CMat::Identity(3, 3), CMat::Identity(3, 3)}};
  two.scales = {cplx(1.0), cplx(1.0)};
  CHECK_THROWS_AS(cycle_to_ops(two, 5), ValidationError);
}

TEST_CASE("diagonal-pencil qubit symmetry search") {
  DiagPencilSyms s3 = diag_pencil_syms({1, omega, omega2});
  CHECK_FALSE(s3.continuum);
  CHECK(s3.maps.size() == 6);
  for (const Mobius& m : s3.maps) {
    std::vector<cplx> img = {mobius_apply(m, 1), mobius_apply(m, omega),
                             mobius_apply(m, omega2)};
    CHECK(multiset_match(img, {1, omega, omega2}));
  }

  // Four distinct points always admit the Klein four-group: the three double
  // transpositions preserve the cross-ratio, so each is Mobius-realizable.
  // Five or more generic points admit only the identity.
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cplx> v4 = {rand_cplx(), rand_cplx(), rand_cplx(), rand_cplx()};
    DiagPencilSyms s = diag_pencil_syms(v4);
    CHECK_FALSE(s.continuum);
    CHECK(s.maps.size() == 4);
    int involutions = 0;
    for (const Mobius& m : s.maps) {
      std::vector<cplx> img;
      for (const cplx& e : v4) img.push_back(mobius_apply(m, e));
      CHECK(multiset_match(img, v4));
      CMat mm = m.matrix() * m.matrix();
      if (proportional(mm, CMat::Identity(2, 2), 1e-8).has_value()) ++involutions;
    }
    CHECK(involutions == 4);  // identity plus three swaps, all order <= 2
    std::vector<cplx> v5 = v4;
    v5.push_back(rand_cplx());
    CHECK(diag_pencil_syms(v5).maps.size() == 1);
  }

  DiagPencilSyms sm = diag_pencil_syms({1, 1, omega, omega2});
  CHECK(sm.maps.size() == 2);

  DiagPencilSyms s2 = diag_pencil_syms({1, -1});
  CHECK(s2.continuum);
  CHECK(s2.maps.empty());

  CHECK_THROWS_AS(diag_pencil_syms({1, 1}), OutOfScopeError);
  CHECK_THROWS_AS(diag_pencil_syms({}), OutOfScopeError);
}
