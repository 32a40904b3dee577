#include "doctest.h"
#include "test_util.hpp"

#include <timps/linalg.hpp>
#include <timps/mps.hpp>
#include <timps/oracle.hpp>

#include <cmath>

using namespace timps;
using namespace timps::testutil;

namespace {

LocalOperatorString uniform(const CMat& g, int n) {
  LocalOperatorString s;
  s.ops.assign(static_cast<std::size_t>(n), g);
  return s;
}

CMat pauli_x() {
  CMat m = CMat::Zero(2, 2);
  m(0, 1) = 1;
  m(1, 0) = 1;
  return m;
}

CMat pauli_z() {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = 1;
  m(1, 1) = -1;
  return m;
}

CMat diag2(cplx a, cplx b) {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// six-fold symmetric sample point of the three-row permutation family
CMat one_g_b() {
  CMat b(3, 3);
  b << cplx(0), cplx(1), cplx(1),
       omega, cplx(0), omega,
       omega2, omega2, cplx(0);
  return b;
}

StateVector ghz3() {
  return build_state(class_representative(ClassLabel::LLT), 3);
}

MpsTensor dimer_tensor() {
  MpsTensor t;
  t.d = 2;
  t.D = 2;
  CMat e01 = CMat::Zero(2, 2), e10 = CMat::Zero(2, 2);
  e01(0, 1) = 1;
  e10(1, 0) = 1;
  t.mats = {e01, e10};
  return t;
}

}  // namespace

TEST_CASE("apply_local_ops agrees with the dense kron product") {
  for (int trial = 0; trial < 10; ++trial) {
    StateVector psi;
    psi.n_sites = 3;
    psi.amplitudes = CVec::Zero(8);
    for (int i = 0; i < 8; ++i) psi.amplitudes(i) = rand_cplx();
    LocalOperatorString s;
    s.ops = {rand_mat(2, 2), rand_mat(2, 2), rand_mat(2, 2)};
    CMat big = kron(kron(s.ops[0], s.ops[1]), s.ops[2]);
    CVec want = big * psi.amplitudes;
    StateVector got = apply_local_ops(psi, s);
    CHECK((got.amplitudes - want).norm() < 1e-12 * std::max(1.0, want.norm()));
  }
}

TEST_CASE("apply_local_ops basis action and input validation") {
  StateVector psi;
  psi.n_sites = 2;
  psi.amplitudes = CVec::Zero(4);
  psi.amplitudes(1) = 1;  // |01>
  LocalOperatorString s;
  s.ops = {pauli_x(), CMat::Identity(2, 2)};
  StateVector out = apply_local_ops(psi, s);  // site 0 is the leading digit
  CHECK(std::abs(out.amplitudes(3) - cplx(1.0)) < 1e-15);
  CHECK(out.amplitudes.norm() == doctest::Approx(1.0));

  LocalOperatorString bad_count;
  bad_count.ops = {pauli_x()};
  CHECK_THROWS_AS(apply_local_ops(psi, bad_count), ValidationError);
  LocalOperatorString bad_shape;
  bad_shape.ops = {rand_mat(3, 3), rand_mat(3, 3)};
  CHECK_THROWS_AS(apply_local_ops(psi, bad_shape), ValidationError);
}

TEST_CASE("exact and scaled symmetry checks on hand-built states") {
  StateVector dimer = build_state(dimer_tensor(), 2);  // |01> + |10>
  CHECK(is_symmetry(dimer, uniform(pauli_x(), 2)).ok);
  SymmetryCheck flip = is_symmetry_scaled(dimer, uniform(pauli_z(), 2));
  CHECK(flip.ok);
  CHECK(std::abs(flip.scale - cplx(-1.0)) < 1e-12);
  CHECK_FALSE(is_symmetry(dimer, uniform(pauli_z(), 2)).ok);
  // sigma_z on one site maps the state to an orthogonal one
  LocalOperatorString half;
  half.ops = {pauli_z(), CMat::Identity(2, 2)};
  SymmetryCheck orth = is_symmetry_scaled(dimer, half);
  CHECK_FALSE(orth.ok);
  CHECK(orth.residual > 0.5);

  StateVector ghz = ghz3();
  CHECK(is_symmetry(ghz, uniform(pauli_x(), 3)).ok);
  CHECK(is_symmetry(ghz, uniform(diag2(1, omega), 3)).ok);
  LocalOperatorString staggered;
  staggered.ops = {diag2(omega, 1), diag2(omega2, 1), CMat::Identity(2, 2)};
  CHECK(is_symmetry(ghz, staggered).ok);
  LocalOperatorString lone;
  lone.ops = {diag2(omega, 1), CMat::Identity(2, 2), CMat::Identity(2, 2)};
  CHECK_FALSE(is_symmetry_scaled(ghz, lone).ok);

  // odd-ring state that vanishes identically is rejected rather than "symmetric"
  CMat mg(3, 3);
  mg << cplx(0), cplx(0), cplx(1),
        cplx(0), cplx(-1), cplx(0),
        cplx(1), cplx(0), cplx(0);
  StateVector zero = build_state(tensor_from_b(ClassLabel::LLT, mg), 3);
  CHECK(zero.amplitudes.norm() == 0.0);
  CHECK_THROWS_AS(is_symmetry(zero, uniform(pauli_x(), 3)), ValidationError);
}

TEST_CASE("global qubit operators fix the six-fold symmetric ring state up to scale") {
  MpsTensor t = tensor_from_b(ClassLabel::Momega, one_g_b());
  CMat tau = pauli_x();
  CMat s2 = diag2(omega, 1);
  CMat kap = CMat::Zero(2, 2);
  kap(0, 1) = omega2;
  kap(1, 0) = 1;
  for (int n : {4, 5}) {
    StateVector psi = build_state(t, n);
    for (const CMat& g : {tau, s2, kap}) {
      SymmetryCheck chk = is_symmetry_scaled(psi, uniform(g, n));
      CHECK(chk.ok);
      CHECK(chk.residual < 1e-9);
      CHECK(std::abs(std::abs(chk.scale) - 1.0) < 1e-9);
    }
    CMat g = rand_invertible(2);
    g /= std::sqrt(g.determinant());
    CHECK_FALSE(is_symmetry_scaled(psi, uniform(g, n)).ok);
  }
}

TEST_CASE("group closure counts include translation conjugates") {
  StateVector ghz = ghz3();
  // single staggered phase string; translations are needed to reach all 9
  LocalOperatorString stag;
  stag.ops = {diag2(omega, 1), diag2(omega2, 1), CMat::Identity(2, 2)};
  GroupOrderResult r = group_order(ghz, {stag});
  CHECK_FALSE(r.capped);
  CHECK(r.order == 9);

  GroupOrderResult r2 = group_order(ghz, {stag, uniform(pauli_x(), 3)});
  CHECK_FALSE(r2.capped);
  CHECK(r2.order == 18);

  GroupOrderResult rid = group_order(ghz, {uniform(CMat::Identity(2, 2), 3)});
  CHECK_FALSE(rid.capped);
  CHECK(rid.order == 1);

  GroupOrderResult rc = group_order(ghz, {stag}, 5);
  CHECK(rc.capped);
  CHECK(rc.order == 5);

  CHECK_THROWS_AS(group_order(ghz, {}), ValidationError);
  LocalOperatorString bad;
  bad.ops = {pauli_x(), CMat::Identity(2, 2), CMat::Identity(2, 2)};
  CHECK_THROWS_AS(group_order(ghz, {bad}), ValidationError);
}

TEST_CASE("six-fold symmetric ring state has global group of order 6") {
  MpsTensor t = tensor_from_b(ClassLabel::Momega, one_g_b());
  CMat s = diag2(omega2, 1);
  for (int n : {4, 5}) {
    StateVector psi = build_state(t, n);
    GroupOrderResult r = group_order(psi, {uniform(pauli_x(), n), uniform(s, n)});
    CHECK_FALSE(r.capped);
    CHECK(r.order == 6);
  }
}

TEST_CASE("continuous symmetry family hits the cap") {
  CMat mg(3, 3);
  mg << cplx(0), cplx(0), cplx(1),
        cplx(0), cplx(-1), cplx(0),
        cplx(1), cplx(0), cplx(0);
  StateVector psi = build_state(tensor_from_b(ClassLabel::LLT, mg), 4);
  CMat shear = CMat::Identity(2, 2);
  shear(0, 1) = 1;
  GroupOrderResult r = group_order(psi, {uniform(shear, 4)}, 30);
  CHECK(r.capped);
  CHECK(r.order == 30);
}

TEST_CASE("conversion probability closed form") {
  ConversionProblem same;
  same.g_ops = uniform(rand_invertible(2), 2);
  same.h_ops = same.g_ops;
  same.psi_norm2 = 2.5;
  same.phi_norm2 = 2.5;
  CHECK(conversion_probability(same) == doctest::Approx(1.0));

  ConversionProblem shrink;
  shrink.g_ops = uniform(CMat::Identity(2, 2), 1);
  shrink.h_ops = uniform(diag2(1, 0.5), 1);
  shrink.psi_norm2 = 1.0;
  shrink.phi_norm2 = 0.8;
  CHECK(conversion_probability(shrink) == doctest::Approx(0.8));

  ConversionProblem grow;
  grow.g_ops = uniform(CMat::Identity(2, 2), 2);
  grow.h_ops = uniform(diag2(2, 1), 2);
  grow.psi_norm2 = 1.0;
  grow.phi_norm2 = 1.0;
  CHECK(conversion_probability(grow) == doctest::Approx(1.0 / 16.0));

  for (int trial = 0; trial < 5; ++trial) {
    ConversionProblem a, b, joint;
    a.g_ops = uniform(rand_invertible(2), 1);
    a.h_ops = uniform(rand_invertible(2), 1);
    a.psi_norm2 = a.phi_norm2 = 1.0;
    b.g_ops = uniform(rand_invertible(2), 1);
    b.h_ops = uniform(rand_invertible(2), 1);
    b.psi_norm2 = b.phi_norm2 = 1.0;
    joint.g_ops.ops = {a.g_ops.ops[0], b.g_ops.ops[0]};
    joint.h_ops.ops = {a.h_ops.ops[0], b.h_ops.ops[0]};
    joint.psi_norm2 = joint.phi_norm2 = 1.0;
    CHECK(conversion_probability(joint) ==
          doctest::Approx(conversion_probability(a) * conversion_probability(b)));
  }

  ConversionProblem sing;
  sing.g_ops = uniform(CMat::Zero(2, 2), 1);
  sing.h_ops = uniform(CMat::Identity(2, 2), 1);
  sing.psi_norm2 = sing.phi_norm2 = 1.0;
  CHECK_THROWS_AS(conversion_probability(sing), ValidationError);

  ConversionProblem mix;
  mix.g_ops = uniform(CMat::Identity(2, 2), 2);
  mix.h_ops = uniform(CMat::Identity(2, 2), 1);
  mix.psi_norm2 = mix.phi_norm2 = 1.0;
  CHECK_THROWS_AS(conversion_probability(mix), ValidationError);
}

TEST_CASE("deterministic LOCC feasibility by support enumeration") {
  CMat h = diag2(1, 2);
  CHECK_FALSE(det_locc_feasible({CMat::Identity(2, 2)}, h).has_value());

  auto p2 = det_locc_feasible({CMat::Identity(2, 2), pauli_x()}, h);
  REQUIRE(p2.has_value());
  CHECK((*p2)[0] == doctest::Approx(0.5));
  CHECK((*p2)[1] == doctest::Approx(0.5));

  CMat hu = CMat::Zero(2, 2);  // unitary target needs no mixing
  hu(0, 1) = 1;
  hu(1, 0) = -1;
  auto p1 = det_locc_feasible({CMat::Identity(2, 2), pauli_x()}, hu);
  REQUIRE(p1.has_value());
  CHECK((*p1)[0] == doctest::Approx(1.0));
  CHECK((*p1)[1] == doctest::Approx(0.0));

  std::vector<CMat> four = {CMat::Identity(2, 2), pauli_x(), pauli_z(),
                            pauli_x() * pauli_z()};
  auto p4 = det_locc_feasible(four, h);
  REQUIRE(p4.has_value());
  double sum = 0;
  CMat acc = CMat::Zero(2, 2);
  for (std::size_t k = 0; k < four.size(); ++k) {
    CHECK((*p4)[k] >= 0.0);
    sum += (*p4)[k];
    acc += (*p4)[k] * four[k].adjoint() * h.adjoint() * h * four[k];
  }
  CHECK(sum == doctest::Approx(1.0));
  cplx c = acc.trace() / 2.0;
  CHECK((acc - c * CMat::Identity(2, 2)).norm() < 1e-9);

  CHECK_THROWS_AS(det_locc_feasible({}, h), ValidationError);
  CHECK_THROWS_AS(det_locc_feasible({rand_mat(3, 3)}, h), ValidationError);
}
