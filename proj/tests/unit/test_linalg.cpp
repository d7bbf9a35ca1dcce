#include <catch_amalgamated.hpp>

#include "ergoscope/linalg.hpp"

using namespace ergoscope;

namespace {

  Matrix from_ints(std::size_t r, std::size_t c, std::vector<int> v) {
    std::vector<Rational> d;
    for (int x : v) {
      d.emplace_back(x);
    }
    return Matrix(r, c, std::move(d));
  }

}  // namespace

TEST_CASE("rational literals parse exactly", "[linalg]") {
  CHECK(parse_rational("3/6") == make_rational(1, 2));
  CHECK(parse_rational("0.25") == make_rational(1, 4));
  CHECK(parse_rational("1e-9") == make_rational(1, 1'000'000'000));
  CHECK(parse_rational("-2") == make_rational(-2));
  CHECK(parse_rational("007/010") == make_rational(7, 10));
  CHECK(parse_rational("-0.5") == make_rational(-1, 2));
  CHECK_THROWS_AS(parse_rational("0x10"), InvalidInput);
  CHECK_THROWS_AS(parse_rational("1/0"), InvalidInput);
  CHECK(to_fraction_string(make_rational(4, 2)) == "2/1");
  CHECK(to_fraction_string(Rational(0)) == "0/1");
  CHECK_THROWS_AS(parse_rational("1/0"), InvalidInput);
  CHECK_THROWS_AS(parse_rational("abc"), InvalidInput);
  CHECK_THROWS_AS(parse_rational(""), InvalidInput);
}

TEST_CASE("rank and nullspace are consistent", "[linalg]") {
  auto m = from_ints(3, 4, {1, 2, 3, 4, 2, 4, 6, 8, 0, 1, 1, 0});
  CHECK(rank(m) == 2);
  auto ns = nullspace(m);
  REQUIRE(ns.size() == 2);
  for (auto const& v : ns) {
    auto prod = m * v;
    for (auto const& x : prod) {
      CHECK(x == 0);
    }
  }
  CHECK(rank(Matrix::identity(5)) == 5);
  CHECK(nullspace(Matrix::identity(3)).empty());
}

TEST_CASE("products and transposes", "[linalg]") {
  auto a = from_ints(2, 3, {1, 2, 3, 4, 5, 6});
  auto b = from_ints(3, 2, {1, 0, 0, 1, 1, 1});
  CHECK(a * b == from_ints(2, 2, {4, 5, 10, 11}));
  CHECK(a.transpose().transpose() == a);
  CHECK((a * b).transpose() == b.transpose() * a.transpose());
  CHECK(power(from_ints(2, 2, {1, 1, 0, 1}), 5) == from_ints(2, 2, {1, 5, 0, 1}));
  CHECK_THROWS_AS(a * a, InvalidInput);
}

TEST_CASE("stochasticity predicates", "[linalg]") {
  auto m = from_ints(2, 2, {0, 1, 1, 0});
  CHECK(m.is_row_stochastic());
  CHECK(m.is_column_stochastic());
  CHECK_FALSE(from_ints(2, 2, {1, 0, 1, 0}).is_column_stochastic());
  CHECK(from_ints(2, 2, {1, 1, 0, 0}).transpose().is_column_stochastic() == false);
}

TEST_CASE("nonnegative feasibility", "[linalg]") {
  // x + y = 1, x - y = 0 -> (1/2, 1/2)
  auto sol = nonnegative_solution(from_ints(2, 2, {1, 1, 1, -1}),
                                  {Rational(1), Rational(0)});
  REQUIRE(sol);
  CHECK((*sol)[0] == make_rational(1, 2));
  CHECK((*sol)[1] == make_rational(1, 2));
  // x - y = 1 with x + y = 0 forces y < 0
  CHECK_FALSE(nonnegative_solution(from_ints(2, 2, {1, -1, 1, 1}),
                                   {Rational(1), Rational(0)}));
  // inconsistent equalities
  CHECK_FALSE(nonnegative_solution(from_ints(2, 1, {1, 1}),
                                   {Rational(1), Rational(2)}));
  // redundant rows
  auto red = nonnegative_solution(from_ints(3, 3, {1, 1, 1, 2, 2, 2, 1, 0, -1}),
                                  {Rational(1), Rational(2), Rational(0)});
  REQUIRE(red);
  CHECK((*red)[0] + (*red)[1] + (*red)[2] == 1);
  CHECK((*red)[0] == (*red)[2]);
}
