#include <catch_amalgamated.hpp>

#include <random>

#include "ergoscope/envelope.hpp"
#include "ergoscope/io.hpp"
#include "oracles.hpp"

using namespace ergoscope;

namespace {

  // Seeds, sizes and generator counts for the random sweeps.
  struct Draw {
    std::size_t   n;
    std::size_t   g;
    bool          commuting;
    std::uint64_t seed;
  };

  std::vector<Draw> draws(std::size_t count, std::uint64_t seed, bool commuting_only) {
    std::mt19937_64   rng(seed);
    std::vector<Draw> out;
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back({1 + rng() % 6, 1 + rng() % 3, commuting_only || (rng() % 4 == 0),
                     rng()});
    }
    return out;
  }

  FiniteSystem make(Draw const& d) {
    return random_system(d.n, d.g, d.commuting, d.seed);
  }

  std::set<oracle::Map> as_set(std::vector<oracle::Map> const& v) {
    return {v.begin(), v.end()};
  }

  std::set<oracle::Map> maps_at(TransSemigroup const& s, std::vector<std::size_t> const& idx) {
    std::set<oracle::Map> out;
    for (auto i : idx) {
      out.insert(s.at(i).images());
    }
    return out;
  }

}  // namespace

TEST_CASE("Ellis closure matches brute-force closure", "[properties]") {
  for (auto const& d : draws(80, 1, false)) {
    auto sys = make(d);
    auto e   = ellis(sys);
    std::vector<oracle::Map> gens;
    for (auto const& t : sys.generator_maps()) {
      gens.push_back(t.images());
    }
    auto ref = oracle::closure(gens);
    CHECK(as_set(oracle::maps_of(e)) == as_set(ref));
  }
}

TEST_CASE("kernel and zeros match brute force", "[properties]") {
  for (auto const& d : draws(80, 2, false)) {
    auto sys = make(d);
    auto e   = ellis(sys);
    auto el  = oracle::maps_of(e);
    std::vector<oracle::Map> gens;
    for (auto const& t : sys.generator_maps()) {
      gens.push_back(t.images());
    }
    auto ker = maps_at(e, kernel(e));
    auto sink = oracle::kernel_by_sink(el, gens);
    std::set<oracle::Map> sink_maps;
    for (auto i : sink) {
      sink_maps.insert(el[i]);
    }
    CHECK(ker == sink_maps);
    if (el.size() <= 16) {
      std::set<oracle::Map> sub;
      for (auto i : oracle::kernel_by_subsets(el)) {
        sub.insert(el[i]);
      }
      CHECK(ker == sub);
    }
    auto z   = zero(e);
    auto ref = oracle::zero_by_scan(el);
    REQUIRE(z.has_value() == ref.has_value());
    if (z) {
      CHECK(e.at(*z).images() == el[*ref]);
    }
    for (auto q : right_zeros(e)) {
      for (auto const& s : el) {
        CHECK(oracle::compose(e.at(q).images(), s) == e.at(q).images());
      }
    }
  }
}

TEST_CASE("extreme invariant measures match support enumeration", "[properties]") {
  for (auto const& d : draws(80, 3, false)) {
    auto sys = make(d);
    std::set<std::vector<Rational>> got;
    for (auto const& m : invariant_measures(sys)) {
      got.insert(m.weights());
    }
    CHECK(got == oracle::invariant_vertices(sys));
  }
}

TEST_CASE("zero existence matches basis enumeration", "[properties]") {
  Budget b;
  b.parallel = false;
  for (auto const& d : draws(80, 4, false)) {
    auto sys = make(d);
    auto e   = ellis(sys);
    auto ker = kernel(e);
    if (ker.size() > 8) {
      continue;
    }
    std::vector<oracle::Map> kmaps;
    for (auto i : ker) {
      kmaps.push_back(e.at(i).images());
    }
    auto found = convex_koehler_zero(sys, ZeroStrategy::automatic, b, &e);
    REQUIRE(found.exists.determined());
    CHECK(*found.exists.value == oracle::convex_zero_exists(sys, kmaps));
  }
}

TEST_CASE("commuting systems: separation, decomposition and zero agree",
          "[properties]") {
  Budget b;
  b.parallel = false;
  for (auto const& d : draws(60, 5, true)) {
    auto sys = make(d);
    REQUIRE(sys.commuting());
    auto rep = classify(sys, b);
    CHECK(rep.separation == rep.decomposition.direct_sum);
    CHECK(rep.weak_star_mean_ergodic.is(rep.separation));
    CHECK(rep.norm_mean_ergodic.is(rep.separation));
  }
}

TEST_CASE("Koopman maps reverse composition and adjoints preserve it",
          "[properties]") {
  std::mt19937_64 rng(6);
  for (int round = 0; round < 100; ++round) {
    std::size_t const  n = 1 + rng() % 6;
    std::vector<State> a(n), c(n);
    for (std::size_t x = 0; x < n; ++x) {
      a[x] = static_cast<State>(rng() % n);
      c[x] = static_cast<State>(rng() % n);
    }
    Transformation s(a), t(c);
    CHECK(koopman_matrix(s * t) == koopman_matrix(t) * koopman_matrix(s));
    CHECK(adjoint_matrix(s * t) == adjoint_matrix(s) * adjoint_matrix(t));
  }
}

TEST_CASE("restriction epimorphisms are multiplicative on all pairs",
          "[properties]") {
  for (auto const& d : draws(60, 7, false)) {
    auto sys = make(d);
    auto e   = ellis(sys);
    auto sub = orbit(sys, static_cast<State>(d.seed % d.n)).states;
    auto epi = restriction_epimorphism(e, sub);
    CHECK(epi.certificate.surjective);
    CHECK(epi.certificate.multiplicative);
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (std::size_t j = 0; j < e.size(); ++j) {
        CHECK(epi.map[e.product(i, j)] == epi.image.product(epi.map[i], epi.map[j]));
      }
    }
  }
}

TEST_CASE("implication chain holds on random systems", "[properties]") {
  Budget b;
  b.parallel = false;
  for (auto const& d : draws(80, 8, false)) {
    auto rep = classify(make(d), b);
    CHECK_NOTHROW(check_implication_chain(rep));
    CHECK_FALSE(rep.any_undetermined());
  }
}

TEST_CASE("parallel and serial runs give identical JSON", "[properties]") {
  Budget serial;
  serial.parallel = false;
  for (auto const& d : draws(30, 9, false)) {
    auto sys = make(d);
    CHECK(dump(to_json(classify(sys, Budget{}), sys))
          == dump(to_json(classify(sys, serial), sys)));
  }
}
