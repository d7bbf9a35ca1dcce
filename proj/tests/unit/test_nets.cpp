#include <catch_amalgamated.hpp>

#include <sstream>

#include "ergoscope/koopman.hpp"
#include "ergoscope/nets.hpp"
#include "fixtures.hpp"

using namespace ergoscope;
using namespace fixtures;

namespace {

  OperatorMatrix third(std::size_t n) {
    return OperatorMatrix::filled(n, n, make_rational(1, static_cast<std::int64_t>(n)));
  }

}  // namespace

TEST_CASE("Cesaro means", "[nets]") {
  CHECK(cesaro(OperatorMatrix::identity(3), 7) == OperatorMatrix::identity(3));
  auto m = koopman_matrix(t({1, 2, 0}));
  CHECK(cesaro(m, 3) == third(3));
  auto c0 = koopman_matrix(t({0, 0}));
  CHECK(cesaro(c0, 2) == (OperatorMatrix::identity(2) + c0) * make_rational(1, 2));
  CHECK_THROWS_AS(cesaro(m, 0), PreconditionError);

  auto net = cesaro_net(m, {3, 6}, "rot");
  REQUIRE(net.steps.size() == 2);
  CHECK(is_convex_step(net.steps[0]));
  CHECK(net.steps[1].factors.front().size() == 6);
}

TEST_CASE("Abel means", "[nets]") {
  auto const tol = make_rational(1, 1'000'000'000);
  auto       id  = abel(OperatorMatrix::identity(2), Rational(2), tol);
  CHECK(distance(id.matrix, OperatorMatrix::identity(2)) <= tol);
  CHECK(id.remainder_bound <= tol);

  auto rot = abel(koopman_matrix(t({1, 2, 0})), Rational(2), tol);
  // Residue class k mod 3 carries weight (1/2^{k+1}) / (1 - 1/8) = 4/7, 2/7, 1/7.
  CHECK(abs(rot.matrix(0, 0) - make_rational(4, 7)) <= tol);
  CHECK(abs(rot.matrix(0, 1) - make_rational(2, 7)) <= tol);
  CHECK(abs(rot.matrix(0, 2) - make_rational(1, 7)) <= tol);
  for (std::size_t i = 0; i < 3; ++i) {
    Rational row = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      row += rot.matrix(i, j);
    }
    CHECK(abs(row - 1) <= tol);
  }

  auto zero = abel(OperatorMatrix::zero(2), Rational(3), tol);
  CHECK(zero.matrix == OperatorMatrix::identity(2) * make_rational(2, 3));

  CHECK_THROWS_AS(abel(OperatorMatrix::identity(2), Rational(1), tol), PreconditionError);
  CHECK_THROWS_AS(abel(OperatorMatrix::filled(2, 2, Rational(1)), Rational(2), tol),
                  PreconditionError);
}

TEST_CASE("Folner boxes", "[nets]") {
  auto m = koopman_matrix(t({2, 0, 1, 3}));
  CHECK(folner_box({m}, 5) == cesaro(m, 5));
  auto gens = koopman_generators(z2_squared());
  CHECK(folner_box(gens, 2) == third(4));
  CHECK_THROWS_AS(folner_box(koopman_generators(two_constants()), 2),
                  PreconditionError);
  auto net = folner_net(gens, {2, 4}, {"a", "b"});
  CHECK(net.steps.at(0).factors.size() == 2);
  CHECK(is_convex_step(net.steps.at(1)));
}

TEST_CASE("net verification", "[nets]") {
  auto m   = koopman_matrix(t({1, 2, 0}));
  auto rep = verify_net(cesaro_net(m, {30, 60, 90}), {m}, Side::two_sided,
                        make_rational(1, 10));
  CHECK(rep.verdict == NetVerdict::ergodic);
  CHECK(rep.trace.size() == 6);
  CHECK(rep.trace[0].side == Side::left);
  CHECK(rep.trace[1].side == Side::right);

  // Constant net at a zero is ergodic at tolerance zero.
  NetSample constant;
  for (int i = 0; i < 3; ++i) {
    constant.steps.push_back({"const", third(3), {}});
  }
  CHECK(verify_net(constant, {m}, Side::two_sided, Rational(0)).verdict
        == NetVerdict::ergodic);

  // Alternating between the two constant maps: left ergodic, not convergent.
  auto      gens = koopman_generators(two_constants());
  NetSample alt;
  std::vector<OperatorMatrix> trace;
  for (int i = 0; i < 6; ++i) {
    alt.steps.push_back({"k=" + std::to_string(i), gens[i % 2], {}});
    trace.push_back(gens[i % 2]);
  }
  CHECK(verify_net(alt, gens, Side::left, Rational(0)).verdict == NetVerdict::ergodic);
  CHECK_FALSE(detect_limit(trace, make_rational(1, 2), 3));
  CHECK(verify_net(alt, gens, Side::right, Rational(0)).verdict
        != NetVerdict::ergodic);
}

TEST_CASE("limit detection", "[nets]") {
  std::vector<OperatorMatrix> constant(4, third(3));
  CHECK(detect_limit(constant, Rational(0), 3) == third(3));

  auto                        m = koopman_matrix(t({1, 2, 0}));
  std::vector<OperatorMatrix> ces{cesaro(m, 30), cesaro(m, 60), cesaro(m, 90)};
  auto                        lim = detect_limit(ces, make_rational(1, 10), 3);
  REQUIRE(lim);
  CHECK(distance(*lim, third(3)) <= make_rational(1, 10));

  std::vector<Vector> alt{Measure::dirac(2, 0).weights(), Measure::dirac(2, 1).weights(),
                          Measure::dirac(2, 0).weights()};
  CHECK_FALSE(detect_limit(alt, make_rational(1, 2), 3));
  CHECK_THROWS_AS(detect_limit(alt, Rational(0), 1), PreconditionError);
}

TEST_CASE("trace CSV", "[nets]") {
  auto               m   = koopman_matrix(t({1, 0}));
  auto               rep = verify_net(cesaro_net(m, {1, 2}, "s"), {m}, Side::left, Rational(0));
  std::ostringstream out;
  write_trace_csv(out, rep, {"s"});
  CHECK(out.str()
        == "descriptor,generator,side,defect_norm,defect_norm_float\n"
           "N=1,s,left,1/1,1\n"
           "N=2,s,left,0/1,0\n");
}
