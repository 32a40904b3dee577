#include <doctest.h>
#include <timps/linalg.hpp>

#include <Eigen/Eigenvalues>

#include "test_util.hpp"

using namespace timps;
using namespace timps::testutil;

TEST_CASE("proportional: basic and edge cases") {
  CMat a = rand_mat(3, 3);
  cplx lam = rand_cplx();
  auto r = proportional(lam * a, a);
  REQUIRE(r.has_value());
  CHECK(std::abs(*r - lam) < 1e-9);

  // zero a against nonzero b: lambda = 0
  auto z = proportional(CMat::Zero(2, 2), a.topLeftCorner(2, 2));
  REQUIRE(z.has_value());
  CHECK(std::abs(*z) < 1e-12);

  // nonzero a against zero b: impossible
  CHECK_FALSE(proportional(a, CMat::Zero(3, 3)).has_value());

  // both zero: ambiguous
  CHECK_THROWS_AS(proportional(CMat::Zero(2, 2), CMat::Zero(2, 2)), ValidationError);
  // shape mismatch
  CHECK_THROWS_AS(proportional(CMat::Zero(2, 2), CMat::Zero(3, 3)), ValidationError);

  // non-proportional pair
  CMat b = a;
  b(0, 0) += 10.0;
  CHECK_FALSE(proportional(a, b).has_value());
}

TEST_CASE("jordan_2x2: pinned examples") {
  CMat j(2, 2);
  j << 1, 1, 0, 1;
  auto r = jordan_2x2(j);
  CHECK_FALSE(r.diagonalizable);
  CHECK(std::abs(r.chi - 1.0) < 1e-12);

  CMat isx(2, 2);
  isx << 0, cplx(0, 1), cplx(0, 1), 0;
  r = jordan_2x2(isx);
  CHECK(r.diagonalizable);
  CHECK(std::abs(r.chi - cplx(0, 1)) < 1e-9);

  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1.0 / 3;
  r = jordan_2x2(d);
  CHECK(r.diagonalizable);
  CHECK(std::abs(r.chi - 3.0) < 1e-9);
  CHECK((r.S - CMat::Identity(2, 2)).norm() < 1e-9);

  CHECK_THROWS_AS(jordan_2x2(CMat::Zero(2, 2)), ValidationError);
}

TEST_CASE("jordan_2x2: random round trips and domain") {
  for (int it = 0; it < 10000; ++it) {
    CMat g = rand_invertible(2);
    auto r = jordan_2x2(g);
    CMat rec = r.scale * r.S * r.J * r.S.inverse();
    CHECK((rec - g).norm() <= 1e-9 * g.norm());
    double m = std::abs(r.chi);
    CHECK(m >= 1.0 - 1e-9);
    if (m > 1.0 + 1e-9) {
      bool ok = r.chi.imag() > -1e-9 &&
                (r.chi.imag() > 1e-9 || r.chi.real() > 0);
      CHECK(ok);
    } else {
      CHECK(r.chi.real() >= -1e-7);
      CHECK(r.chi.imag() >= -1e-7);
    }
  }
}

TEST_CASE("monomial_eig: pinned example and dense cross-check") {
  // sigma = (0,2,1), d = (5,4,9)  ->  {5, 6, -6}
  auto r = monomial_eig({0, 2, 1}, {5.0, 4.0, 9.0});
  std::vector<double> got;
  for (auto& v : r.values) got.push_back(v.real());
  std::sort(got.begin(), got.end());
  CHECK(std::abs(got[0] + 6.0) < 1e-9);
  CHECK(std::abs(got[1] - 5.0) < 1e-9);
  CHECK(std::abs(got[2] - 6.0) < 1e-9);

  CHECK_THROWS_AS(monomial_eig({0, 1, 2}, {1.0, 0.0, 2.0}), ValidationError);

  auto dense_check = [](const std::vector<int>& sigma, const std::vector<cplx>& d) {
    int n = static_cast<int>(sigma.size());
    CMat m = perm_matrix(sigma);
    CMat dd = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i) dd(i, i) = d[i];
    CMat pd = m * dd;
    auto r = monomial_eig(sigma, d);
    // every claimed (value, vector) pair must satisfy the eigen equation
    for (int k = 0; k < n; ++k) {
      CVec v = r.vectors.col(k);
      CHECK((pd * v - r.values[k] * v).norm() < 1e-9);
    }
    // and the multisets of eigenvalues must agree with a dense solve
    Eigen::ComplexEigenSolver<CMat> es(pd);
    std::vector<cplx> a = r.values, b;
    for (int i = 0; i < n; ++i) b.push_back(es.eigenvalues()(i));
    auto key = [](const cplx& z) {
      return std::make_pair(std::round(z.real() * 1e8), std::round(z.imag() * 1e8));
    };
    std::sort(a.begin(), a.end(), [&](auto u, auto v2) { return key(u) < key(v2); });
    std::sort(b.begin(), b.end(), [&](auto u, auto v2) { return key(u) < key(v2); });
    for (int i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-7);
  };

  // all of S_3
  std::vector<std::vector<int>> s3 = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& sigma : s3) {
    std::vector<cplx> d;
    for (int i = 0; i < 3; ++i) d.push_back(rand_cplx() + cplx(2.0, 0));
    dense_check(sigma, d);
  }
  // random S_5 permutations
  std::vector<int> sigma5 = {0, 1, 2, 3, 4};
  for (int it = 0; it < 20; ++it) {
    std::shuffle(sigma5.begin(), sigma5.end(), rng());
    std::vector<cplx> d;
    for (int i = 0; i < 5; ++i) d.push_back(rand_cplx() + cplx(2.0, 0));
    dense_check(sigma5, d);
  }
}

TEST_CASE("mobius: pinned example, apply/solve round trip") {
  // {1 -> 1, w -> w^2, w^2 -> w} is z -> 1/z
  auto m = mobius_solve({{1.0, 1.0}, {omega, omega2}, {omega2, omega}});
  REQUIRE(m.has_value());
  CMat mat = m->matrix();
  CMat swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(approx_prop(mat, swap, 1e-9));

  for (int it = 0; it < 200; ++it) {
    CMat g = rand_invertible(2);
    Mobius mob = mobius_from_matrix(g);
    std::vector<std::pair<cplx, cplx>> pairs;
    for (int k = 0; k < 5; ++k) {
      cplx z = rand_cplx(2.0);
      pairs.push_back({z, mobius_apply(mob, z)});
    }
    auto sol = mobius_solve(pairs);
    REQUIRE(sol.has_value());
    for (const auto& [z, w] : pairs) CHECK(chordal(mobius_apply(*sol, z), w) < 1e-7);
  }

  // inconsistent data
  auto bad = mobius_solve({{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}, {3.0, 17.0}});
  CHECK_FALSE(bad.has_value());
  // under-determined
  CHECK_THROWS_AS(mobius_solve({{1.0, 2.0}, {1.0, 2.0}}), ValidationError);
  // infinity handling
  auto inf = mobius_solve({{kInf, 0.0}, {0.0, kInf}, {1.0, 1.0}});
  REQUIRE(inf.has_value());
  CHECK(chordal(mobius_apply(*inf, 2.0), 0.5) < 1e-9);
}

TEST_CASE("unit_root_order") {
  CHECK(unit_root_order(omega, 10) == 3);
  CHECK(unit_root_order(cplx(1, 0), 10) == 1);
  CHECK(unit_root_order(cplx(-1, 0), 10) == 2);
  CHECK(unit_root_order(std::polar(1.0, M_PI / 8), 10) == std::nullopt);
  CHECK(unit_root_order(std::polar(1.0, M_PI / 8), 16) == 16);
  CHECK(unit_root_order(cplx(2, 0), 10) == std::nullopt);
}

TEST_CASE("vec/kron identity") {
  CMat a = rand_mat(3, 3), b = rand_mat(3, 3), x = rand_mat(3, 3);
  CVec lhs = vec_cm(a * x * b);
  CVec rhs = kron(b.transpose(), a) * vec_cm(x);
  CHECK((lhs - rhs).norm() < 1e-10);
  CHECK(svd_rank(CMat::Identity(3, 3)) == 3);
  CMat n = nullspace(CMat::Ones(3, 3));
  CHECK(n.cols() == 2);
  CHECK((CMat::Ones(3, 3) * n).norm() < 1e-10);
}
