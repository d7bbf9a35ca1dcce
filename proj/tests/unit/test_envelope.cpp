#include <catch_amalgamated.hpp>

#include "ergoscope/envelope.hpp"
#include "fixtures.hpp"

using namespace ergoscope;
using namespace fixtures;

namespace {

  OperatorMatrix all(std::size_t n, Rational v) {
    return OperatorMatrix::filled(n, n, v);
  }

  Budget serial() {
    Budget b;
    b.parallel = false;
    return b;
  }

}  // namespace

TEST_CASE("Ellis semigroups", "[envelope]") {
  CHECK(ellis(identity(3)).size() == 1);
  CHECK(ellis(cyclic3()).size() == 3);
}

TEST_CASE("Ellis semigroup of two constants has no zero", "[envelope]") {
  auto e = ellis(two_constants());
  CHECK(e.size() == 2);
  CHECK_FALSE(zero(e));
  CHECK(kernel(e).size() == 2);
  CHECK(right_zeros(e).size() == 2);
}

TEST_CASE("Koehler semigroups", "[envelope]") {
  auto id = koehler(identity(3));
  REQUIRE(id.size() == 1);
  CHECK(id.at(0) == OperatorMatrix::identity(3));

  auto cyc = koehler(cyclic3());
  CHECK(cyc.size() == 3);
  for (auto const& m : cyc.elements()) {
    CHECK(m.is_column_stochastic());
    CHECK(m.transpose().is_column_stochastic());
  }
  REQUIRE(cyc.bridge());
  CHECK(cyc.bridge()->size() == 3);

  auto ic = koehler(id_c0());
  REQUIRE(ic.size() == 2);
  OperatorMatrix to_zero(2, 2);
  to_zero(0, 0) = 1;
  to_zero(0, 1) = 1;
  CHECK(ic.index_of(OperatorMatrix::identity(2)));
  CHECK(ic.index_of(to_zero));
}

TEST_CASE("zeros of convex Koehler semigroups", "[envelope]") {
  auto cyc = convex_koehler_zero(cyclic3());
  REQUIRE(cyc.certificate);
  CHECK(cyc.certificate->q == all(3, make_rational(1, 3)));
  CHECK(zero_rank(*cyc.certificate) == 1);

  auto id = convex_koehler_zero(identity(2));
  REQUIRE(id.certificate);
  CHECK(id.certificate->q == OperatorMatrix::identity(2));
  CHECK(zero_rank(*id.certificate) == 2);

  auto consts = convex_koehler_zero(two_constants());
  CHECK(consts.exists.is(false));
  CHECK_FALSE(consts.certificate);

  auto cycles = convex_koehler_zero(two_cycles());
  REQUIRE(cycles.certificate);
  CHECK(zero_rank(*cycles.certificate) == 2);
}

TEST_CASE("every zero strategy yields the same zero", "[envelope]") {
  auto sys = system({{1, 2, 3, 2, 0}, {2, 3, 2, 3, 1}});
  REQUIRE(sys.commuting());
  auto const b = serial();
  auto       e = ellis(sys);
  auto       a = convex_koehler_zero(sys, ZeroStrategy::cesaro_product, b, &e);
  auto       f = convex_koehler_zero(sys, ZeroStrategy::folner, b, &e);
  auto       l = convex_koehler_zero(sys, ZeroStrategy::linear_program, b, &e);
  auto       k = convex_koehler_zero(sys, ZeroStrategy::kernel_average, b, &e);
  REQUIRE(a.certificate);
  REQUIRE(f.certificate);
  REQUIRE(l.certificate);
  CHECK(a.certificate->q == f.certificate->q);
  CHECK(a.certificate->q == l.certificate->q);
  if (k.certificate) {
    CHECK(k.certificate->q == a.certificate->q);
  }
  CHECK(a.certificate->identities_checked > 0);
  CHECK_THROWS_AS(
      convex_koehler_zero(two_constants(), ZeroStrategy::cesaro_product, b, nullptr),
      PreconditionError);
  CHECK_THROWS_AS(
      convex_koehler_zero(sys, ZeroStrategy::linear_program, b, nullptr),
      PreconditionError);
}

TEST_CASE("Jacobs semigroups", "[envelope]") {
  auto cyc = jacobs(cyclic3(), Measure::uniform(3));
  CHECK(cyc.semigroup.size() == 3);
  CHECK(cyc.certificate.surjective);
  CHECK(cyc.certificate.multiplicative);

  auto fix = jacobs(two_fixed(), Measure::dirac(3, 0));
  REQUIRE(fix.semigroup.size() == 1);
  CHECK(fix.semigroup.at(0) == OperatorMatrix::identity(1));

  Vector half{make_rational(1, 2), make_rational(1, 2), Rational(0), Rational(0)};
  auto   cycles = jacobs(two_cycles(), Measure(half));
  CHECK(cycles.semigroup.size() == 2);
  CHECK(cycles.support == std::vector<State>{0, 1});
  CHECK(cycles.certificate.surjective);

  try {
    jacobs(two_fixed(), Measure::dirac(3, 2));
    FAIL("expected a non-invariance error");
  } catch (NotInvariantMeasureError const& e) {
    CHECK(e.generator() == 0);
  }
}

TEST_CASE("classification of small systems", "[envelope]") {
  auto cyc = classify(cyclic3(), serial(), "z3");
  CHECK(cyc.unique_ergodic.is(true));
  CHECK(cyc.norm_mean_ergodic.is(true));
  CHECK(cyc.weak_star_mean_ergodic.is(true));
  REQUIRE(cyc.invariant_measure);
  CHECK(*cyc.invariant_measure == Measure::uniform(3));
  CHECK(cyc.transitive == State{0});

  auto both = classify(system({{0, 1, 2}, {0, 1, 0}}), serial());
  CHECK(both.weak_star_mean_ergodic.is(true));
  CHECK(both.unique_ergodic.is(false));
  CHECK(both.zero_rank == std::size_t{2});

  auto consts = classify(two_constants(), serial());
  CHECK(consts.weak_star_mean_ergodic.is(false));
  CHECK(consts.norm_mean_ergodic.is(false));
  CHECK(consts.unique_ergodic.is(false));
  CHECK_FALSE(consts.any_undetermined());
}

TEST_CASE("classification under a tight budget is undetermined", "[envelope]") {
  Budget b = serial();
  b.max_elements = 2;
  auto rep = classify(system({{1, 0, 2, 3}, {1, 2, 3, 0}, {0, 0, 2, 3}}), b);
  CHECK_FALSE(rep.ellis_size);
  CHECK(rep.any_undetermined());
  CHECK(std::any_of(rep.notes.begin(), rep.notes.end(),
                    [](auto const& n) { return n.rfind("size cap", 0) == 0; }));
}

TEST_CASE("parallel and serial classification agree", "[envelope]") {
  auto   sys = random_system(6, 3, false, 42);
  Budget par;
  auto   a = classify(sys, par);
  auto   b = classify(sys, serial());
  CHECK(a.invariant_measure_count == b.invariant_measure_count);
  CHECK(a.weak_star_mean_ergodic.value == b.weak_star_mean_ergodic.value);
  CHECK(a.notes == b.notes);
}

TEST_CASE("kernel images lie in minimal sets", "[envelope]") {
  auto cyc = kernel_image_check(cyclic3());
  CHECK(cyc.kernel_size == 3);
  auto fix = kernel_image_check(two_fixed());
  CHECK(fix.kernel_size == 1);
}

TEST_CASE("minimal systems are uniquely ergodic", "[envelope]") {
  auto four = minimal_unique_check(system({{1, 2, 3, 0}}));
  CHECK(four.measure == Measure::uniform(4));
  auto z6 = minimal_unique_check(system({{1, 2, 3, 4, 5, 0}, {2, 3, 4, 5, 0, 1}}));
  CHECK(z6.measure == Measure::uniform(6));
  CHECK_THROWS_AS(minimal_unique_check(two_fixed()), PreconditionError);
}
