#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qnc/gf.hpp"

using namespace qnc;

TEST_CASE("construction reduces modulo p") {
  CHECK(FieldElem(7, 5).value() == 2);
  CHECK(FieldElem(0, 2).value() == 0);
  CHECK(FieldElem(13, 13).value() == 0);
}

TEST_CASE("non-prime modulus rejected") {
  CHECK_THROWS_AS(FieldElem(1, 4), Error);
  CHECK_THROWS_AS(FieldElem(0, 1), Error);
  CHECK_THROWS_AS(FieldElem(0, 0), Error);
  try {
    FieldElem(1, 6);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_prime);
  }
}

TEST_CASE("arithmetic in F_5 and F_7") {
  FieldElem a(2, 5), b(4, 5);
  CHECK((a * b).value() == 3);
  CHECK((a + b).value() == 1);
  CHECK((a - b).value() == 3);
  CHECK((-b).value() == 1);
  CHECK(FieldElem(3, 5).inv().value() == 2);
  CHECK(FieldElem(4, 7).inv().value() == 2);
}

TEST_CASE("zero inverse is an error") {
  try {
    FieldElem(0, 5).inv();
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_inverse);
  }
}

TEST_CASE("mixed moduli rejected") {
  try {
    (void)(FieldElem(1, 3) + FieldElem(1, 5));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::modulus_mismatch);
  }
  CHECK_THROWS_AS((void)(FieldElem(1, 3) * FieldElem(1, 5)), Error);
  CHECK_THROWS_AS((void)(FieldElem(1, 3) - FieldElem(1, 5)), Error);
}

TEST_CASE("choose_field_size") {
  CHECK(choose_field_size(0) == 2);
  CHECK(choose_field_size(1) == 2);
  CHECK(choose_field_size(2) == 2);
  CHECK(choose_field_size(3) == 3);
  CHECK(choose_field_size(4) == 5);
  CHECK(choose_field_size(6) == 7);
  CHECK(choose_field_size(8) == 11);
}

TEST_CASE("field axioms hold on random samples") {
  std::mt19937_64 rng(1);
  for (uint32_t p : {2u, 3u, 5u, 7u, 11u}) {
    for (int t = 0; t < 200; ++t) {
      FieldElem a(rng() % p, p), b(rng() % p, p), c(rng() % p, p);
      CHECK((a + b) == (b + a));
      CHECK((a * b) == (b * a));
      CHECK(((a + b) + c) == (a + (b + c)));
      CHECK((a * (b + c)) == (a * b + a * c));
      CHECK((a + (-a)).is_zero());
      CHECK((a - b) == (a + (-b)));
      if (!a.is_zero()) {
        CHECK((a * a.inv()).value() == 1);
        CHECK(a.inv().inv() == a);
      }
    }
  }
}

TEST_CASE("vector helpers") {
  FVec u = fvec_unit(3, 1, 5);
  CHECK(u[0].is_zero());
  CHECK(u[1].value() == 1);
  CHECK(fvec_dot(u, u).value() == 1);
  FVec acc = fvec_zero(3, 5);
  fvec_add_scaled(acc, FieldElem(3, 5), u);
  CHECK(acc[1].value() == 3);
  CHECK_THROWS_AS(fvec_dot(u, fvec_zero(2, 5)), Error);
}

TEST_CASE("rank and inverse") {
  uint32_t p = 2;
  FMat v{{FieldElem(1, p), FieldElem(1, p)}, {FieldElem(1, p), FieldElem(0, p)}};
  CHECK(mat_rank(v) == 2);
  FMat inv = mat_inverse(v);
  // product must be the identity
  for (size_t i = 0; i < 2; ++i)
    for (size_t j = 0; j < 2; ++j) {
      FieldElem s(0, p);
      for (size_t k = 0; k < 2; ++k) s = s + v[i][k] * inv[k][j];
      CHECK(s.value() == (i == j ? 1u : 0u));
    }

  FMat sing{{FieldElem(1, p), FieldElem(1, p)}, {FieldElem(1, p), FieldElem(1, p)}};
  CHECK(mat_rank(sing) == 1);
  CHECK_THROWS_AS(mat_inverse(sing), Error);
}

TEST_CASE("random inverse round-trips") {
  std::mt19937_64 rng(7);
  for (uint32_t p : {2u, 3u, 5u}) {
    for (int t = 0; t < 50; ++t) {
      size_t n = 1 + rng() % 4;
      FMat m(n, fvec_zero(n, p));
      for (auto& row : m)
        for (auto& x : row) x = FieldElem(rng() % p, p);
      if (mat_rank(m) < n) continue;
      FMat inv = mat_inverse(m);
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
          FieldElem s(0, p);
          for (size_t k = 0; k < n; ++k) s = s + m[i][k] * inv[k][j];
          CHECK(s.value() == (i == j ? 1u : 0u));
        }
    }
  }
}

TEST_CASE("greedy row basis picks earliest independent rows") {
  uint32_t p = 2;
  FMat rows{
      fvec_zero(2, p),          // skipped: zero
      {FieldElem(1, p), FieldElem(1, p)},
      {FieldElem(1, p), FieldElem(1, p)},  // dependent on previous
      {FieldElem(0, p), FieldElem(1, p)},
  };
  auto picked = greedy_row_basis(rows);
  REQUIRE(picked.size() == 2);
  CHECK(picked[0] == 1);
  CHECK(picked[1] == 3);
}
