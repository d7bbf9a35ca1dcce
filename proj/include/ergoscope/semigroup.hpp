#pragma once

// Finite transformation semigroups.
//
// Multiplication is map composition: (s * t)(x) = s(t(x)). The Koopman
// operators reverse this order (M_{s*t} = M_t M_s) while the adjoint
// matrices on measures preserve it (A_{s*t} = A_s A_t); see koopman.hpp.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ergoscope/error.hpp"

namespace ergoscope {

  using State = std::uint32_t;

  inline constexpr std::size_t kDefaultElementCap = 1'000'000;

  /// A total self-map of {0, ..., n - 1}.
  class Transformation {
   public:
    Transformation() = default;

    explicit Transformation(std::vector<State> images)
        : images_(std::move(images)) {
      for (auto y : images_) {
        if (y >= images_.size()) {
          throw InvalidInput("transformation image " + std::to_string(y)
                             + " out of range for degree "
                             + std::to_string(images_.size()));
        }
      }
    }

    static Transformation identity(std::size_t n) {
      std::vector<State> im(n);
      for (std::size_t i = 0; i < n; ++i) {
        im[i] = static_cast<State>(i);
      }
      return Transformation(std::move(im));
    }

    static Transformation constant(std::size_t n, State c) {
      return Transformation(std::vector<State>(n, c));
    }

    std::size_t degree() const noexcept {
      return images_.size();
    }

    State operator[](std::size_t x) const {
      return images_[x];
    }

    std::vector<State> const& images() const noexcept {
      return images_;
    }

    /// Number of distinct image points.
    std::size_t rank() const {
      std::vector<bool> hit(images_.size(), false);
      std::size_t       r = 0;
      for (auto y : images_) {
        if (!hit[y]) {
          hit[y] = true;
          ++r;
        }
      }
      return r;
    }

    /// Sorted list of image points.
    std::vector<State> image() const {
      std::vector<State> im = images_;
      std::sort(im.begin(), im.end());
      im.erase(std::unique(im.begin(), im.end()), im.end());
      return im;
    }

    bool is_identity() const {
      for (std::size_t i = 0; i < images_.size(); ++i) {
        if (images_[i] != i) {
          return false;
        }
      }
      return true;
    }

    /// s * t = s o t, i.e. apply t first.
    friend Transformation operator*(Transformation const& s,
                                    Transformation const& t) {
      if (s.degree() != t.degree()) {
        throw InvalidInput("composing transformations of different degree");
      }
      std::vector<State> im(t.degree());
      for (std::size_t x = 0; x < t.degree(); ++x) {
        im[x] = s.images_[t.images_[x]];
      }
      Transformation r;
      r.images_ = std::move(im);
      return r;
    }

    friend bool operator==(Transformation const&,
                           Transformation const&) = default;
    friend auto operator<=>(Transformation const&,
                            Transformation const&) = default;

   private:
    std::vector<State> images_;
  };

  struct TransformationHash {
    std::size_t operator()(Transformation const& t) const noexcept {
      std::size_t h = 1469598103934665603ULL;
      for (auto y : t.images()) {
        h ^= y + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      }
      return h;
    }
  };

  inline Transformation power(Transformation const& s, std::size_t k) {
    if (k == 0) {
      return Transformation::identity(s.degree());
    }
    Transformation r = s;
    for (std::size_t i = 1; i < k; ++i) {
      r = r * s;
    }
    return r;
  }

  /// Index and period of the power sequence s, s^2, s^3, ...: the smallest
  /// `index` >= 1 and `period` >= 1 with s^(index + period) = s^index.
  struct PowerCycle {
    std::size_t index;
    std::size_t period;
  };

  inline PowerCycle power_cycle(Transformation const& s) {
    std::unordered_map<Transformation, std::size_t, TransformationHash> seen;
    Transformation current = s;
    for (std::size_t k = 1;; ++k) {
      auto [it, inserted] = seen.emplace(current, k);
      if (!inserted) {
        return {it->second, k - it->second};
      }
      current = current * s;
    }
  }

  /// A finite semigroup of transformations with canonically ordered elements.
  ///
  /// Elements are sorted lexicographically by image tuple, so indices are a
  /// function of the generated set alone. Products are recorded as right and
  /// left Cayley graphs over the generators.
  class TransSemigroup {
   public:
    std::size_t degree() const noexcept {
      return degree_;
    }
    std::size_t size() const noexcept {
      return elements_.size();
    }
    std::vector<Transformation> const& elements() const noexcept {
      return elements_;
    }
    Transformation const& at(std::size_t i) const {
      return elements_.at(i);
    }
    /// Index of each generator, in the order they were supplied.
    std::vector<std::size_t> const& generator_indices() const noexcept {
      return generators_;
    }
    std::size_t number_of_generators() const noexcept {
      return generators_.size();
    }

    std::optional<std::size_t> index_of(Transformation const& t) const {
      auto it = index_.find(t);
      if (it == index_.end()) {
        return std::nullopt;
      }
      return it->second;
    }

    /// Index of elements[i] * generator[g].
    std::size_t right(std::size_t i, std::size_t g) const {
      return right_[i * generators_.size() + g];
    }
    /// Index of generator[g] * elements[i].
    std::size_t left(std::size_t i, std::size_t g) const {
      return left_[i * generators_.size() + g];
    }

    /// Index of elements[i] * elements[j].
    std::size_t product(std::size_t i, std::size_t j) const {
      return index_.at(elements_[i] * elements_[j]);
    }

    bool contains_identity() const {
      return index_of(Transformation::identity(degree_)).has_value();
    }

    /// Full Cayley table, row i column j = index of elements[i] * elements[j].
    /// Only materialised for small semigroups.
    std::vector<std::vector<std::size_t>> cayley_table(
        std::size_t max_size = 4096) const {
      if (size() > max_size) {
        throw SizeLimitError("Cayley table requested for a semigroup of size "
                                 + std::to_string(size()),
                             max_size);
      }
      std::vector<std::vector<std::size_t>> table(size(),
                                                  std::vector<std::size_t>(
                                                      size()));
      for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = 0; j < size(); ++j) {
          table[i][j] = product(i, j);
        }
      }
      return table;
    }

    friend TransSemigroup generate_closure(
        std::vector<Transformation> const& generators,
        std::size_t                        cap);

   private:
    std::size_t                 degree_ = 0;
    std::vector<Transformation> elements_;
    std::unordered_map<Transformation, std::size_t, TransformationHash> index_;
    std::vector<std::size_t> generators_;
    std::vector<std::size_t> right_;
    std::vector<std::size_t> left_;
  };

  /// Smallest composition-closed set containing the generators.
  ///
  /// Throws SizeLimitError as soon as more than `cap` elements are found.
  inline TransSemigroup generate_closure(
      std::vector<Transformation> const& generators,
      std::size_t                        cap = kDefaultElementCap) {
    if (generators.empty()) {
      throw InvalidInput("generate_closure needs at least one generator");
    }
    std::size_t const n = generators.front().degree();
    if (n == 0) {
      throw InvalidInput("transformations on an empty state set");
    }
    for (auto const& g : generators) {
      if (g.degree() != n) {
        throw InvalidInput("generators act on state sets of different size");
      }
    }
    std::unordered_map<Transformation, std::size_t, TransformationHash> seen;
    std::vector<Transformation> found;
    auto                        add = [&](Transformation const& t) {
      if (seen.emplace(t, found.size()).second) {
        found.push_back(t);
        if (found.size() > cap) {
          throw SizeLimitError("semigroup closure exceeds the element cap of "
                                   + std::to_string(cap),
                               cap);
        }
      }
    };
    for (auto const& g : generators) {
      add(g);
    }
    // Right multiplication by generators reaches every product of generators.
    for (std::size_t i = 0; i < found.size(); ++i) {
      for (auto const& g : generators) {
        add(found[i] * g);
      }
    }

    TransSemigroup s;
    s.degree_   = n;
    s.elements_ = std::move(found);
    std::sort(s.elements_.begin(), s.elements_.end());
    s.index_.reserve(s.elements_.size());
    for (std::size_t i = 0; i < s.elements_.size(); ++i) {
      s.index_.emplace(s.elements_[i], i);
    }
    for (auto const& g : generators) {
      s.generators_.push_back(s.index_.at(g));
    }
    std::size_t const k = generators.size();
    s.right_.resize(s.elements_.size() * k);
    s.left_.resize(s.elements_.size() * k);
    for (std::size_t i = 0; i < s.elements_.size(); ++i) {
      for (std::size_t g = 0; g < k; ++g) {
        s.right_[i * k + g] = s.index_.at(s.elements_[i] * generators[g]);
        s.left_[i * k + g]  = s.index_.at(generators[g] * s.elements_[i]);
      }
    }
    return s;
  }

  /// The minimal two-sided ideal. In a finite transformation semigroup it is
  /// exactly the set of elements of minimal rank.
  inline std::vector<std::size_t> kernel(TransSemigroup const& s) {
    std::size_t min_rank = s.degree() + 1;
    std::vector<std::size_t> ranks(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      ranks[i] = s.at(i).rank();
      min_rank = std::min(min_rank, ranks[i]);
    }
    std::vector<std::size_t> result;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (ranks[i] == min_rank) {
        result.push_back(i);
      }
    }
    return result;
  }

  /// Right zeros in Koopman operator order: q with M_s M_q = M_q for all s,
  /// equivalently q * s = q for every element s. Checking the generators
  /// suffices since q * (s * t) = (q * s) * t.
  inline std::vector<std::size_t> right_zeros(TransSemigroup const& s) {
    std::vector<std::size_t> result;
    for (std::size_t q = 0; q < s.size(); ++q) {
      bool ok = true;
      for (std::size_t g = 0; g < s.number_of_generators() && ok; ++g) {
        ok = s.right(q, g) == q;
      }
      if (ok) {
        result.push_back(q);
      }
    }
    return result;
  }

  /// The two-sided zero q (q * s = s * q = q for all s), if any.
  inline std::optional<std::size_t> zero(TransSemigroup const& s) {
    std::optional<std::size_t> found;
    for (auto q : right_zeros(s)) {
      bool ok = true;
      for (std::size_t g = 0; g < s.number_of_generators() && ok; ++g) {
        ok = s.left(q, g) == q;
      }
      if (ok) {
        if (found) {
          throw InvariantViolation("semigroup has two distinct zeros");
        }
        found = q;
      }
    }
    return found;
  }

  inline std::vector<std::size_t> idempotents(TransSemigroup const& s) {
    std::vector<std::size_t> result;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.at(i) * s.at(i) == s.at(i)) {
        result.push_back(i);
      }
    }
    return result;
  }

  /// Elements commuting with every element. This is the algebraic center; on
  /// a finite discrete semigroup it is not a model of the topological center,
  /// which is the whole semigroup there.
  inline std::vector<std::size_t> algebraic_center(TransSemigroup const& s) {
    std::vector<std::size_t> result;
    for (std::size_t i = 0; i < s.size(); ++i) {
      bool ok = true;
      for (std::size_t g = 0; g < s.number_of_generators() && ok; ++g) {
        ok = s.right(i, g) == s.left(i, g);
      }
      if (ok) {
        result.push_back(i);
      }
    }
    return result;
  }

  /// Evidence that a map between semigroups is a surjective homomorphism.
  struct EpimorphismCertificate {
    std::size_t identities_checked = 0;
    bool        surjective         = false;
    bool        multiplicative     = false;
  };

  struct Epimorphism {
    TransSemigroup           image;
    std::vector<std::size_t> map;  // source element index -> image index
    EpimorphismCertificate   certificate;
  };

  class NotInvariantError : public InvalidInput {
   public:
    NotInvariantError(State state, State image, std::size_t generator)
        : InvalidInput("subset not invariant: state " + std::to_string(state)
                       + " is mapped to " + std::to_string(image)
                       + " by generator " + std::to_string(generator)),
          state_(state),
          image_(image),
          generator_(generator) {}

    State state() const noexcept {
      return state_;
    }
    State image() const noexcept {
      return image_;
    }
    std::size_t generator() const noexcept {
      return generator_;
    }

   private:
    State       state_;
    State       image_;
    std::size_t generator_;
  };

  class IncompatibleFactorError : public InvalidInput {
   public:
    IncompatibleFactorError(State x, State y, std::size_t generator)
        : InvalidInput("factor map not compatible: states "
                       + std::to_string(x) + " and " + std::to_string(y)
                       + " are identified but their images under generator "
                       + std::to_string(generator) + " are not"),
          x_(x),
          y_(y),
          generator_(generator) {}

    State x() const noexcept {
      return x_;
    }
    State y() const noexcept {
      return y_;
    }
    std::size_t generator() const noexcept {
      return generator_;
    }

   private:
    State       x_;
    State       y_;
    std::size_t generator_;
  };

  namespace detail {

    // Checks that `map` is surjective onto `image` and satisfies
    // map(x * g) = map(x) * g' on all elements and generators, which by
    // induction on word length gives full multiplicativity.
    inline EpimorphismCertificate certify_epimorphism(
        TransSemigroup const&           source,
        TransSemigroup const&           image,
        std::vector<std::size_t> const& map) {
      EpimorphismCertificate cert;
      std::vector<bool>      hit(image.size(), false);
      for (auto m : map) {
        hit[m] = true;
      }
      cert.surjective = std::all_of(hit.begin(), hit.end(),
                                    [](bool b) { return b; });
      cert.multiplicative = true;
      for (std::size_t g = 0; g < source.number_of_generators(); ++g) {
        if (map[source.generator_indices()[g]]
            != image.generator_indices()[g]) {
          cert.multiplicative = false;
        }
      }
      for (std::size_t i = 0; i < source.size(); ++i) {
        for (std::size_t g = 0; g < source.number_of_generators(); ++g) {
          ++cert.identities_checked;
          if (map[source.right(i, g)] != image.right(map[i], g)) {
            cert.multiplicative = false;
          }
        }
      }
      return cert;
    }

  }  // namespace detail

  /// Restriction of every element to an invariant subset of states.
  ///
  /// `subset` is sorted and deduplicated internally; the restricted semigroup
  /// acts on positions within the sorted subset.
  inline Epimorphism restriction_epimorphism(TransSemigroup const& s,
                                             std::vector<State>    subset,
                                             std::size_t cap
                                             = kDefaultElementCap) {
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    if (subset.empty()) {
      throw PreconditionError("restriction to an empty subset");
    }
    if (subset.back() >= s.degree()) {
      throw InvalidInput("subset contains a state outside the state set");
    }
    std::vector<std::int64_t> position(s.degree(), -1);
    for (std::size_t k = 0; k < subset.size(); ++k) {
      position[subset[k]] = static_cast<std::int64_t>(k);
    }
    for (std::size_t g = 0; g < s.number_of_generators(); ++g) {
      auto const& gen = s.at(s.generator_indices()[g]);
      for (auto y : subset) {
        if (position[gen[y]] < 0) {
          throw NotInvariantError(y, gen[y], g);
        }
      }
    }
    auto restrict = [&](Transformation const& t) {
      std::vector<State> im(subset.size());
      for (std::size_t k = 0; k < subset.size(); ++k) {
        im[k] = static_cast<State>(position[t[subset[k]]]);
      }
      return Transformation(std::move(im));
    };
    std::vector<Transformation> gens;
    for (auto gi : s.generator_indices()) {
      gens.push_back(restrict(s.at(gi)));
    }
    Epimorphism result{generate_closure(gens, cap), {}, {}};
    result.map.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      result.map[i] = *result.image.index_of(restrict(s.at(i)));
    }
    result.certificate
        = detail::certify_epimorphism(s, result.image, result.map);
    return result;
  }

  /// Induced action on the classes of a compatible surjection
  /// phi : states -> {0, ..., m - 1}.
  inline Epimorphism factor_epimorphism(TransSemigroup const&     s,
                                        std::vector<State> const& phi,
                                        std::size_t               cap
                                        = kDefaultElementCap) {
    if (phi.size() != s.degree()) {
      throw InvalidInput("factor map must be defined on every state");
    }
    State m = 0;
    for (auto c : phi) {
      m = std::max<State>(m, c + 1);
    }
    std::vector<std::int64_t> rep(m, -1);
    for (std::size_t x = 0; x < phi.size(); ++x) {
      if (rep[phi[x]] < 0) {
        rep[phi[x]] = static_cast<std::int64_t>(x);
      }
    }
    for (State c = 0; c < m; ++c) {
      if (rep[c] < 0) {
        throw PreconditionError("factor map is not surjective: class "
                                + std::to_string(c) + " is empty");
      }
    }
    for (std::size_t g = 0; g < s.number_of_generators(); ++g) {
      auto const& gen = s.at(s.generator_indices()[g]);
      for (std::size_t x = 0; x < phi.size(); ++x) {
        auto r = static_cast<State>(rep[phi[x]]);
        if (phi[gen[x]] != phi[gen[r]]) {
          throw IncompatibleFactorError(r, static_cast<State>(x), g);
        }
      }
    }
    auto induce = [&](Transformation const& t) {
      std::vector<State> im(m);
      for (State c = 0; c < m; ++c) {
        im[c] = phi[t[static_cast<State>(rep[c])]];
      }
      return Transformation(std::move(im));
    };
    std::vector<Transformation> gens;
    for (auto gi : s.generator_indices()) {
      gens.push_back(induce(s.at(gi)));
    }
    Epimorphism result{generate_closure(gens, cap), {}, {}};
    result.map.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      result.map[i] = *result.image.index_of(induce(s.at(i)));
    }
    result.certificate
        = detail::certify_epimorphism(s, result.image, result.map);
    return result;
  }

}  // namespace ergoscope
