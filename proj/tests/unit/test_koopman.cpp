#include <catch_amalgamated.hpp>

#include "ergoscope/koopman.hpp"
#include "fixtures.hpp"

using namespace ergoscope;
using namespace fixtures;

namespace {

  Vector v(std::vector<std::int64_t> num, std::int64_t den = 1) {
    Vector out;
    for (auto x : num) {
      out.push_back(make_rational(x, den));
    }
    return out;
  }

}  // namespace

TEST_CASE("measures validate", "[koopman]") {
  CHECK_THROWS_AS(Measure(v({1, 1})), InvalidInput);
  CHECK_THROWS_AS(Measure(v({2, -1})), InvalidInput);
  CHECK(Measure::uniform(4)[2] == make_rational(1, 4));
  CHECK(Measure::dirac(3, 1).support() == std::vector<State>{1});
}

TEST_CASE("Koopman matrices of maps", "[koopman]") {
  CHECK(koopman_matrix(t({0, 1, 2})) == OperatorMatrix::identity(3));
  auto m = koopman_matrix(t({1, 2, 0}));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(m(i, j) == (j == (i + 1) % 3 ? 1 : 0));
    }
  }
  auto c0 = koopman_matrix(t({0, 0}));
  CHECK(c0(0, 0) == 1);
  CHECK(c0(1, 0) == 1);
  CHECK(c0(0, 1) == 0);
  CHECK(m.is_row_stochastic());
  CHECK(adjoint_matrix(t({1, 2, 0})).is_column_stochastic());
  CHECK_THROWS_AS(koopman_matrix(cyclic3(), t({0, 1})), InvalidInput);
}

TEST_CASE("adjoint action on measures", "[koopman]") {
  auto m = koopman_matrix(t({1, 2, 0}));
  CHECK(adjoint_on_measure(m, Measure::dirac(3, 1)) == Measure::dirac(3, 2));
  CHECK(adjoint_on_measure(m, Measure::uniform(3)) == Measure::uniform(3));
  CHECK(adjoint_on_measure(koopman_matrix(t({0, 0})), Measure::uniform(2))
        == Measure::dirac(2, 0));
  auto not_stochastic = OperatorMatrix::identity(2) * make_rational(1, 2);
  CHECK_THROWS_AS(adjoint_on_measure(not_stochastic, Measure::uniform(2)),
                  PreconditionError);
}

TEST_CASE("composition order of Koopman matrices and adjoints", "[koopman]") {
  auto s = t({1, 2, 3, 2});
  auto u = t({0, 0, 3, 1});
  CHECK(koopman_matrix(s * u) == koopman_matrix(u) * koopman_matrix(s));
  CHECK(adjoint_matrix(s * u) == adjoint_matrix(s) * adjoint_matrix(u));
}

TEST_CASE("invariant measures", "[koopman]") {
  auto cyc = invariant_measures(cyclic3());
  REQUIRE(cyc.size() == 1);
  CHECK(cyc.front() == Measure::uniform(3));

  auto fix = invariant_measures(two_fixed());
  REQUIRE(fix.size() == 2);
  CHECK(fix[0] == Measure::dirac(3, 0));
  CHECK(fix[1] == Measure::dirac(3, 1));

  CHECK(invariant_measures(identity(4)).size() == 4);
  CHECK(invariant_measures(two_constants()).empty());
}

TEST_CASE("fixed spaces", "[koopman]") {
  CHECK(fixed_space({OperatorMatrix::identity(3)}).size() == 3);
  auto cyc = fixed_space(koopman_generators(cyclic3()));
  REQUIRE(cyc.size() == 1);
  CHECK(cyc.front() == v({1, 1, 1}));
  CHECK(fixed_space(koopman_generators(two_fixed())).size() == 2);
}

TEST_CASE("separation and decomposition", "[koopman]") {
  auto sys = cyclic3();
  CHECK(separation_check(fixed_space(koopman_generators(sys)),
                         fixed_space(adjoint_generators(sys))));
  CHECK_FALSE(separation_check({}, {v({1, 0})}));
  CHECK(separation_check({}, {}));

  auto id = decomposition_check(identity(3));
  CHECK(id.dim_fix == 3);
  CHECK(id.dim_range_span == 0);
  CHECK(id.direct_sum);

  auto c = decomposition_check(cyclic3());
  CHECK(c.dim_fix == 1);
  CHECK(c.dim_range_span == 2);
  CHECK(c.direct_sum);

  // Two commuting maps sharing the zero delta_0 1^T.
  auto common = system({{0, 0, 1}, {0, 0, 0}});
  REQUIRE(common.commuting());
  CHECK(decomposition_check(common).direct_sum);
}
