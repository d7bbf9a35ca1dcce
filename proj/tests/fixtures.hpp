#pragma once

#include <vector>

#include "ergoscope/dynsys.hpp"
#include "ergoscope/semigroup.hpp"

namespace fixtures {

  using ergoscope::FiniteSystem;
  using ergoscope::NamedMap;
  using ergoscope::State;
  using ergoscope::Transformation;

  inline Transformation t(std::vector<State> v) {
    return Transformation(std::move(v));
  }

  inline FiniteSystem system(std::vector<std::vector<State>> maps) {
    std::vector<NamedMap> gens;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      gens.push_back({"g" + std::to_string(i), t(maps[i])});
    }
    return FiniteSystem::with_indices(std::move(gens));
  }

  inline FiniteSystem cyclic3() {
    return system({{1, 2, 0}});
  }
  // 0 -> 0, 1 -> 1, 2 -> 0
  inline FiniteSystem two_fixed() {
    return system({{0, 1, 0}});
  }
  inline FiniteSystem id_c0() {
    return system({{0, 1}, {0, 0}});
  }
  inline FiniteSystem two_constants() {
    return system({{0, 0}, {1, 1}});
  }
  inline FiniteSystem identity(std::size_t n) {
    std::vector<State> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = static_cast<State>(i);
    }
    return system({v});
  }
  // Z2 x Z2 encoded as 2a + b; shift a, shift b.
  inline FiniteSystem z2_squared() {
    return system({{2, 3, 0, 1}, {1, 0, 3, 2}});
  }
  // Two disjoint 2-cycles {0,1} and {2,3}.
  inline FiniteSystem two_cycles() {
    return system({{1, 0, 3, 2}});
  }

}  // namespace fixtures
