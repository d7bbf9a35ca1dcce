#pragma once

// Finite dynamical systems: a state set with named generating self-maps.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ergoscope/error.hpp"
#include "ergoscope/semigroup.hpp"

namespace ergoscope {

  struct NamedMap {
    std::string    name;
    Transformation map;
  };

  class FiniteSystem {
   public:
    FiniteSystem(std::vector<std::string> labels, std::vector<NamedMap> gens)
        : labels_(std::move(labels)), generators_(std::move(gens)) {
      if (labels_.empty()) {
        throw InvalidInput("a system needs at least one state");
      }
      if (generators_.empty()) {
        throw InvalidInput("a system needs at least one generator");
      }
      std::unordered_set<std::string> distinct(labels_.begin(), labels_.end());
      if (distinct.size() != labels_.size()) {
        throw InvalidInput("state labels must be distinct");
      }
      for (auto const& g : generators_) {
        if (g.map.degree() != labels_.size()) {
          throw InvalidInput("generator '" + g.name
                             + "' is not defined on every state");
        }
      }
      commuting_ = true;
      for (std::size_t a = 0; a < generators_.size() && commuting_; ++a) {
        for (std::size_t b = a + 1; b < generators_.size() && commuting_;
             ++b) {
          commuting_ = generators_[a].map * generators_[b].map
                       == generators_[b].map * generators_[a].map;
        }
      }
    }

    /// States labelled "0", "1", ..., "n-1".
    static FiniteSystem with_indices(std::vector<NamedMap> gens) {
      if (gens.empty()) {
        throw InvalidInput("a system needs at least one generator");
      }
      std::vector<std::string> labels;
      for (std::size_t i = 0; i < gens.front().map.degree(); ++i) {
        labels.push_back(std::to_string(i));
      }
      return FiniteSystem(std::move(labels), std::move(gens));
    }

    std::size_t size() const noexcept {
      return labels_.size();
    }
    std::vector<std::string> const& labels() const noexcept {
      return labels_;
    }
    std::vector<NamedMap> const& generators() const noexcept {
      return generators_;
    }
    std::vector<Transformation> generator_maps() const {
      std::vector<Transformation> out;
      for (auto const& g : generators_) {
        out.push_back(g.map);
      }
      return out;
    }
    /// True iff all generator pairs commute; recomputed on construction.
    bool commuting() const noexcept {
      return commuting_;
    }

   private:
    std::vector<std::string> labels_;
    std::vector<NamedMap>    generators_;
    bool                     commuting_ = true;
  };

  struct Orbit {
    std::vector<State> states;  // {x} u Sx, sorted
    bool               returns_to_start = false;  // x in Sx
  };

  namespace detail {

    // States reachable from x in one or more generator steps.
    inline std::vector<bool> forward_reach(FiniteSystem const& sys, State x) {
      std::vector<bool>  seen(sys.size(), false);
      std::vector<State> stack;
      for (auto const& g : sys.generators()) {
        State y = g.map[x];
        if (!seen[y]) {
          seen[y] = true;
          stack.push_back(y);
        }
      }
      while (!stack.empty()) {
        State y = stack.back();
        stack.pop_back();
        for (auto const& g : sys.generators()) {
          State z = g.map[y];
          if (!seen[z]) {
            seen[z] = true;
            stack.push_back(z);
          }
        }
      }
      return seen;
    }

  }  // namespace detail

  inline Orbit orbit(FiniteSystem const& sys, State x) {
    if (x >= sys.size()) {
      throw InvalidInput("state index out of range");
    }
    auto  reach = detail::forward_reach(sys, x);
    Orbit o;
    o.returns_to_start = reach[x];
    reach[x]           = true;
    for (State y = 0; y < sys.size(); ++y) {
      if (reach[y]) {
        o.states.push_back(y);
      }
    }
    return o;
  }

  /// Minimal invariant sets: the terminal strongly connected components of the
  /// generator graph, ordered by smallest member.
  inline std::vector<std::vector<State>> minimal_sets(FiniteSystem const& sys) {
    std::size_t const              n = sys.size();
    std::vector<std::vector<bool>> reach(n);
    for (State x = 0; x < n; ++x) {
      reach[x] = detail::forward_reach(sys, x);
    }
    // x lies in a minimal set iff every state reachable from x reaches x.
    std::vector<bool>               assigned(n, false);
    std::vector<std::vector<State>> result;
    for (State x = 0; x < n; ++x) {
      if (assigned[x] || !reach[x][x]) {
        continue;
      }
      bool terminal = true;
      for (State y = 0; y < n && terminal; ++y) {
        terminal = !reach[x][y] || reach[y][x];
      }
      if (!terminal) {
        continue;
      }
      std::vector<State> component;
      for (State y = 0; y < n; ++y) {
        if (reach[x][y]) {
          component.push_back(y);
          assigned[y] = true;
        }
      }
      result.push_back(std::move(component));
    }
    return result;
  }

  struct TransitivityWitness {
    State state;       // first x with {x} u Sx = K
    bool  strict;      // whether Sx alone already covers K for that x
  };

  /// First state whose orbit closure {x} u Sx is everything, if any.
  inline std::optional<TransitivityWitness> is_transitive(
      FiniteSystem const& sys) {
    for (State x = 0; x < sys.size(); ++x) {
      auto o = orbit(sys, x);
      if (o.states.size() == sys.size()) {
        return TransitivityWitness{x, o.returns_to_start};
      }
    }
    return std::nullopt;
  }

  /// First state with Sx = K (the reading used when S lacks an identity).
  inline std::optional<State> strict_transitivity_witness(
      FiniteSystem const& sys) {
    for (State x = 0; x < sys.size(); ++x) {
      auto reach = detail::forward_reach(sys, x);
      if (std::all_of(reach.begin(), reach.end(), [](bool b) { return b; })) {
        return x;
      }
    }
    return std::nullopt;
  }

  /// Whether the subset (need not be sorted) is mapped into itself by every
  /// generator.
  inline bool is_invariant(FiniteSystem const& sys,
                           std::vector<State> const& subset) {
    std::vector<bool> in(sys.size(), false);
    for (auto x : subset) {
      in.at(x) = true;
    }
    for (auto const& g : sys.generators()) {
      for (auto x : subset) {
        if (!in[g.map[x]]) {
          return false;
        }
      }
    }
    return true;
  }

  /// Deterministic pseudo-random system on n states with g generators.
  ///
  /// With `commuting` set, generators are powers of one random map. Draws use
  /// raw mt19937_64 output so results do not depend on the standard library's
  /// distribution implementations.
  inline FiniteSystem random_system(std::size_t   n,
                                    std::size_t   g,
                                    bool          commuting,
                                    std::uint64_t seed) {
    if (n == 0 || g == 0) {
      throw PreconditionError("random_system needs n >= 1 and g >= 1");
    }
    std::mt19937_64 rng(seed);
    auto            draw = [&](std::size_t bound) {
      return static_cast<std::size_t>(rng() % bound);
    };
    auto random_map = [&] {
      std::vector<State> im(n);
      for (auto& y : im) {
        y = static_cast<State>(draw(n));
      }
      return Transformation(std::move(im));
    };
    std::vector<NamedMap> gens;
    if (commuting) {
      Transformation base = random_map();
      for (std::size_t i = 0; i < g; ++i) {
        std::size_t k = 1 + draw(n + 1);
        gens.push_back({"s" + std::to_string(i), power(base, k)});
      }
    } else {
      for (std::size_t i = 0; i < g; ++i) {
        gens.push_back({"s" + std::to_string(i), random_map()});
      }
    }
    auto sys = FiniteSystem::with_indices(std::move(gens));
    if (commuting && !sys.commuting()) {
      throw InvariantViolation("powers of one map failed to commute");
    }
    return sys;
  }

}  // namespace ergoscope
