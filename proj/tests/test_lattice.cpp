#include <doctest.h>

#include <cmath>
#include <set>

#include "diracnls/errors.hpp"
#include "diracnls/lattice.hpp"
#include "support/oracles.hpp"

using namespace diracnls;
using oracle::pi;

TEST_CASE("matrix oracle confirms the rotated index map") {
  const auto L = LatticeBasis::honeycomb();
  // R^t K = K + k2 and R^t k1 = k2 decide the ambiguous subscript
  const Vec2 RtK = diracnls::apply(transpose(L.R), L.K);
  CHECK(RtK[0] == doctest::Approx(L.K[0] + L.k2[0]).epsilon(1e-14));
  CHECK(RtK[1] == doctest::Approx(L.K[1] + L.k2[1]).epsilon(1e-14));

  CHECK(rotate_index({0, 0}) == FourierIndex{0, 1});
  CHECK(rotate_index({0, 1}) == FourierIndex{-1, 0});
  CHECK(rotate_index({-1, 0}) == FourierIndex{0, 0});

  oracle::Gen gen(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = gen.index(20);
    CHECK(rotate_index(m) == oracle::rotate_by_matrix(L, m));
  }
}

TEST_CASE("basis vectors and duality") {
  const auto L = LatticeBasis::honeycomb();
  const double s3 = std::sqrt(3.0);
  CHECK(L.r1[0] == s3 / 2.0);
  CHECK(L.r1[1] == 0.5);
  CHECK(L.r2[0] == s3 / 2.0);
  CHECK(L.r2[1] == -0.5);
  CHECK(L.cell_area == doctest::Approx(s3 / 2.0).epsilon(1e-15));

  const auto [k1, k2] = dual_basis(L);
  CHECK(k1[0] == doctest::Approx(2.0 * pi * s3 / 3.0).epsilon(1e-14));
  CHECK(k1[1] == doctest::Approx(2.0 * pi).epsilon(1e-14));
  CHECK(k2[0] == doctest::Approx(2.0 * pi * s3 / 3.0).epsilon(1e-14));
  CHECK(k2[1] == doctest::Approx(-2.0 * pi).epsilon(1e-14));
  CHECK(dot(L.r1, k1) == doctest::Approx(2.0 * pi).epsilon(1e-14));
  CHECK(std::abs(dot(L.r1, k2)) < 1e-13);
  CHECK(std::abs(dot(L.r2, k1)) < 1e-13);
  CHECK(dot(L.r2, k2) == doctest::Approx(2.0 * pi).epsilon(1e-14));
}

TEST_CASE("rotation matrix has order three and unit determinant") {
  const auto L = LatticeBasis::honeycomb();
  const Mat2 R3 = multiply(L.R, multiply(L.R, L.R));
  CHECK(std::abs(R3[0][0] - 1.0) < 1e-14);
  CHECK(std::abs(R3[1][1] - 1.0) < 1e-14);
  CHECK(std::abs(R3[0][1]) < 1e-14);
  CHECK(std::abs(R3[1][0]) < 1e-14);
  CHECK(L.R[0][0] * L.R[1][1] - L.R[0][1] * L.R[1][0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("rotate_index is an isometry of order three") {
  const auto L = LatticeBasis::honeycomb();
  oracle::Gen gen(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = gen.index(30);
    CHECK(rotate_index(rotate_index(rotate_index(m))) == m);
    const double a = norm2(L.momentum(m));
    CHECK(norm2(L.momentum(rotate_index(m))) == doctest::Approx(a).epsilon(1e-13));
  }
}

TEST_CASE("free Dirac momenta share the energy 16 pi^2 / 9") {
  const auto L = LatticeBasis::honeycomb();
  for (FourierIndex m : {FourierIndex{0, 0}, FourierIndex{0, 1}, FourierIndex{-1, 0}})
    CHECK(norm2(L.momentum(m)) == doctest::Approx(oracle::free_dirac_energy()).epsilon(1e-14));
}

TEST_CASE("index set of cutoff one") {
  const auto set = build_index_set(1);
  // Orbit enumeration by repeated rotation
  std::set<FourierIndex> expected;
  for (int m1 = -1; m1 <= 1; ++m1)
    for (int m2 = -1; m2 <= 1; ++m2) {
      FourierIndex m{m1, m2};
      for (int k = 0; k < 3; ++k) {
        expected.insert(m);
        m = rotate_index(m);
      }
    }
  CHECK(set.size() == expected.size());
  CHECK(std::set<FourierIndex>(set.indices().begin(), set.indices().end()) == expected);
  CHECK(set.contains({0, 0}));
  CHECK(set.contains({0, 1}));
  CHECK(set.contains({-1, 0}));
}

TEST_CASE("index set invariants") {
  for (int N = 1; N <= 8; ++N) {
    const auto set = build_index_set(N);
    CHECK(set.cutoff() == N);
    CHECK(set.size() >= static_cast<std::size_t>((2 * N + 1) * (2 * N + 1)));
    for (int m1 = -N; m1 <= N; ++m1)
      for (int m2 = -N; m2 <= N; ++m2) CHECK(set.contains({m1, m2}));
    CHECK(std::is_sorted(set.indices().begin(), set.indices().end()));
    const auto& perm = set.rotation_permutation();
    for (std::size_t i = 0; i < set.size(); ++i) {
      const auto r = rotate_index(set[i]);
      REQUIRE(set.contains(r));
      CHECK(set[perm[i]] == r);
      // Orbits have size three or one, never two
      const bool fixed = r == set[i];
      const bool period_two = !fixed && rotate_index(r) == set[i];
      CHECK_FALSE(period_two);
    }
    const auto again = close_under_rotation(set.indices());
    CHECK(again == set.indices());
  }
}

TEST_CASE("index set rejects cutoff zero") {
  CHECK_THROWS_AS(build_index_set(0), DomainError);
  CHECK_THROWS_AS(build_index_set(-2), DomainError);
}

TEST_CASE("index set lookup") {
  const auto set = build_index_set(3);
  for (std::size_t i = 0; i < set.size(); ++i) CHECK(set.find(set[i]) == i);
  CHECK_FALSE(set.contains({100, 0}));
  CHECK(build_index_set(3) == set);
}
