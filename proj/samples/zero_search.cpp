// Classifies a few hand-built systems and prints the zero of each convex
// Koehler semigroup.

#include <iostream>

#include "ergoscope/envelope.hpp"

using namespace ergoscope;

namespace {

  void show(char const* title, FiniteSystem const& sys) {
    auto rep = classify(sys);
    std::cout << title << ": |E| = " << *rep.ellis_size
              << ", kernel " << *rep.kernel_size << ", weak* "
              << (rep.weak_star_mean_ergodic.is(true) ? "yes" : "no")
              << ", unique " << (rep.unique_ergodic.is(true) ? "yes" : "no")
              << '\n';
    if (rep.zero) {
      std::cout << "  zero via " << rep.zero->strategy << ", rank "
                << *rep.zero_rank << '\n';
      for (std::size_t i = 0; i < rep.zero->q.rows(); ++i) {
        std::cout << "   ";
        for (std::size_t j = 0; j < rep.zero->q.cols(); ++j) {
          std::cout << ' ' << to_fraction_string(rep.zero->q(i, j));
        }
        std::cout << '\n';
      }
    }
  }

}  // namespace

int main() {
  show("rotation of Z/4",
       FiniteSystem::with_indices({{"r", Transformation({1, 2, 3, 0})}}));
  show("retraction onto two points",
       FiniteSystem::with_indices({{"m", Transformation({0, 1, 0})}}));
  show("two constants",
       FiniteSystem::with_indices({{"c0", Transformation({0, 0})},
                                   {"c1", Transformation({1, 1})}}));
}
