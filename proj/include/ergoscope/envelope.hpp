#pragma once

// Enveloping semigroups of finite systems and the zero-element
// classification of mean ergodicity.
//
// For a finite state set every weak operator topology coincides with
// entrywise convergence, so the Ellis semigroup is the generated
// transformation semigroup, the Koehler semigroup is the generated semigroup
// of adjoint matrices A_s, and the convex Koehler semigroup is the convex hull
// of the latter (already closed and multiplicatively closed).

#include <algorithm>
#include <cstddef>
#include <future>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ergoscope/dynsys.hpp"
#include "ergoscope/error.hpp"
#include "ergoscope/koopman.hpp"
#include "ergoscope/linalg.hpp"
#include "ergoscope/nets.hpp"
#include "ergoscope/semigroup.hpp"

namespace ergoscope {

  /// A boolean that may be undetermined, with the reason recorded.
  struct Verdict {
    std::optional<bool> value;
    std::string         reason;

    static Verdict of(bool b) {
      return {b, {}};
    }
    static Verdict undetermined(std::string why) {
      return {std::nullopt, std::move(why)};
    }
    bool determined() const noexcept {
      return value.has_value();
    }
    bool is(bool b) const noexcept {
      return value && *value == b;
    }
  };

  struct Budget {
    std::size_t max_elements    = kDefaultElementCap;
    std::size_t lp_max_elements = 256;
    std::size_t word_length     = 4;
    // Zero identities are checked on every element up to this size, on the
    // generators (which suffices) beyond it.
    std::size_t full_check_max = 1000;
    std::size_t witness_max    = 100'000;
    bool        parallel       = true;
  };

  inline TransSemigroup ellis(FiniteSystem const& sys,
                              std::size_t         cap = kDefaultElementCap) {
    return generate_closure(sys.generator_maps(), cap);
  }

  /// A finite semigroup of exact matrices with canonical element order.
  class MatrixSemigroup {
   public:
    /// Closure of the given generators under multiplication; elements sorted.
    static MatrixSemigroup closure(std::vector<OperatorMatrix> const& gens,
                                   std::size_t cap = kDefaultElementCap) {
      if (gens.empty()) {
        throw InvalidInput("matrix semigroup needs a generator");
      }
      std::map<OperatorMatrix, std::size_t> seen;
      std::vector<OperatorMatrix>           found;
      auto                                  add = [&](OperatorMatrix m) {
        if (seen.emplace(m, found.size()).second) {
          found.push_back(std::move(m));
          if (found.size() > cap) {
            throw SizeLimitError("matrix semigroup exceeds the element cap",
                                 cap);
          }
        }
      };
      for (auto const& g : gens) {
        add(g);
      }
      for (std::size_t i = 0; i < found.size(); ++i) {
        for (auto const& g : gens) {
          add(found[i] * g);
        }
      }
      std::sort(found.begin(), found.end());
      MatrixSemigroup s;
      s.elements_ = std::move(found);
      s.reindex();
      for (auto const& g : gens) {
        s.generators_.push_back(s.index_.at(g));
      }
      return s;
    }

    std::size_t size() const noexcept {
      return elements_.size();
    }
    std::vector<OperatorMatrix> const& elements() const noexcept {
      return elements_;
    }
    OperatorMatrix const& at(std::size_t i) const {
      return elements_.at(i);
    }
    std::vector<std::size_t> const& generator_indices() const noexcept {
      return generators_;
    }
    std::optional<std::size_t> index_of(OperatorMatrix const& m) const {
      auto it = index_.find(m);
      if (it == index_.end()) {
        return std::nullopt;
      }
      return it->second;
    }
    std::size_t product(std::size_t i, std::size_t j) const {
      auto idx = index_of(elements_[i] * elements_[j]);
      if (!idx) {
        throw InvariantViolation("matrix semigroup is not closed");
      }
      return *idx;
    }
    /// Element i corresponds to Ellis element bridge()[i], when present.
    std::optional<std::vector<std::size_t>> const& bridge() const noexcept {
      return bridge_;
    }

    friend MatrixSemigroup koehler(FiniteSystem const&, TransSemigroup const&);

   private:
    void reindex() {
      index_.clear();
      for (std::size_t i = 0; i < elements_.size(); ++i) {
        index_.emplace(elements_[i], i);
      }
    }

    std::vector<OperatorMatrix>             elements_;
    std::map<OperatorMatrix, std::size_t>   index_;
    std::vector<std::size_t>                generators_;
    std::optional<std::vector<std::size_t>> bridge_;
  };

  /// Koehler semigroup: the adjoint matrices of the Ellis elements, in Ellis
  /// order. The bridge is verified as a homomorphism A_{s*t} = A_s A_t, and
  /// the Koopman side as the anti-homomorphism M_{s*t} = M_t M_s, on all
  /// element/generator pairs.
  inline MatrixSemigroup koehler(FiniteSystem const&   sys,
                                 TransSemigroup const& e) {
    if (e.degree() != sys.size()) {
      throw InvalidInput("Ellis semigroup and system differ in state count");
    }
    MatrixSemigroup k;
    for (auto const& t : e.elements()) {
      k.elements_.push_back(adjoint_matrix(t));
    }
    k.reindex();
    if (k.index_.size() != e.size()) {
      throw InvariantViolation("distinct maps with equal adjoint matrices");
    }
    k.generators_ = e.generator_indices();
    std::vector<std::size_t> bridge(e.size());
    std::iota(bridge.begin(), bridge.end(), 0);
    k.bridge_ = std::move(bridge);
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (std::size_t g = 0; g < e.number_of_generators(); ++g) {
        auto const& gen = e.at(e.generator_indices()[g]);
        if (k.elements_[e.right(i, g)]
            != k.elements_[i] * k.elements_[e.generator_indices()[g]]) {
          throw InvariantViolation("adjoint bridge is not multiplicative");
        }
        if (koopman_matrix(e.at(e.right(i, g)))
            != koopman_matrix(gen) * koopman_matrix(e.at(i))) {
          throw InvariantViolation(
              "Koopman matrices do not reverse multiplication");
        }
      }
    }
    return k;
  }

  inline MatrixSemigroup koehler(FiniteSystem const& sys,
                                 std::size_t cap = kDefaultElementCap) {
    return koehler(sys, ellis(sys, cap));
  }

  struct WitnessTerm {
    Transformation element;
    Rational       weight;
  };

  /// Q with Q A = A Q = Q for every element A, with the convex combination of
  /// semigroup elements that produced it.
  struct ZeroCertificate {
    OperatorMatrix           q;
    std::vector<WitnessTerm> witness;  // empty when only the limit is known
    bool                     limit_marker       = false;
    std::size_t              identities_checked = 0;
    std::string              strategy;
  };

  enum class ZeroStrategy {
    automatic,
    cesaro_product,
    folner,
    word_average,
    kernel_average,
    linear_program,
  };

  inline char const* to_string(ZeroStrategy s) {
    switch (s) {
      case ZeroStrategy::automatic:
        return "auto";
      case ZeroStrategy::cesaro_product:
        return "cesaro_product";
      case ZeroStrategy::folner:
        return "folner";
      case ZeroStrategy::word_average:
        return "word_average";
      case ZeroStrategy::kernel_average:
        return "kernel_average";
      default:
        return "linear_program";
    }
  }

  struct ZeroSearch {
    Verdict                        exists;
    std::optional<ZeroCertificate> certificate;
    std::vector<std::string>       notes;
  };

  namespace detail {

    using WeightedMaps = std::map<Transformation, Rational>;

    inline OperatorMatrix combine(WeightedMaps const& terms, std::size_t n) {
      OperatorMatrix q(n, n);
      for (auto const& [t, w] : terms) {
        for (std::size_t x = 0; x < n; ++x) {
          q(t[x], x) += w;
        }
      }
      return q;
    }

    // Per-generator Cesaro limit as weighted powers over one period.
    inline WeightedMaps cesaro_limit_terms(Transformation const& s) {
      auto         pc = power_cycle(s);
      WeightedMaps terms;
      Transformation p = power(s, pc.index);
      for (std::size_t k = 0; k < pc.period; ++k) {
        terms[p] += make_rational(1, static_cast<std::int64_t>(pc.period));
        p = p * s;
      }
      return terms;
    }

    inline std::optional<WeightedMaps> multiply(WeightedMaps const& a,
                                                WeightedMaps const& b,
                                                std::size_t         max_terms) {
      if (a.size() * b.size() > max_terms) {
        return std::nullopt;
      }
      WeightedMaps out;
      for (auto const& [s, ws] : a) {
        for (auto const& [t, wt] : b) {
          out[s * t] += ws * wt;
        }
      }
      return out;
    }

    inline bool is_zero_of(OperatorMatrix const&              q,
                           std::vector<OperatorMatrix> const& mats,
                           std::size_t&                       checked) {
      for (auto const& a : mats) {
        checked += 2;
        if (a * q != q || q * a != q) {
          return false;
        }
      }
      return true;
    }

    inline ZeroCertificate certify(FiniteSystem const&   sys,
                                   OperatorMatrix        q,
                                   WeightedMaps const&   terms,
                                   std::string           strategy,
                                   TransSemigroup const* e,
                                   Budget const&         budget) {
      ZeroCertificate cert;
      cert.q        = std::move(q);
      cert.strategy = std::move(strategy);
      Rational total = 0;
      for (auto const& [t, w] : terms) {
        if (w < 0) {
          throw InvariantViolation("negative weight in zero witness");
        }
        total += w;
        cert.witness.push_back({t, w});
      }
      if (total != 1 || combine(terms, sys.size()) != cert.q) {
        throw InvariantViolation("zero witness does not reproduce Q");
      }
      std::vector<OperatorMatrix> mats = adjoint_generators(sys);
      if (e != nullptr && e->size() <= budget.full_check_max) {
        mats.clear();
        for (auto const& t : e->elements()) {
          mats.push_back(adjoint_matrix(t));
        }
      }
      if (!is_zero_of(cert.q, mats, cert.identities_checked)) {
        throw InvariantViolation("zero certificate identities fail");
      }
      return cert;
    }

    inline ZeroSearch found(ZeroCertificate cert) {
      ZeroSearch r{Verdict::of(true), std::move(cert), {}};
      return r;
    }

    inline std::optional<ZeroSearch> try_cesaro_product(
        FiniteSystem const&   sys,
        TransSemigroup const* e,
        Budget const&         budget) {
      WeightedMaps acc{{Transformation::identity(sys.size()), Rational(1)}};
      for (auto const& g : sys.generators()) {
        auto next = multiply(acc, cesaro_limit_terms(g.map),
                             budget.witness_max);
        if (!next) {
          return std::nullopt;
        }
        acc = std::move(*next);
      }
      OperatorMatrix q = OperatorMatrix::identity(sys.size());
      for (auto const& g : sys.generators()) {
        q = q * combine(cesaro_limit_terms(g.map), sys.size());
      }
      return found(certify(sys, std::move(q), acc, "cesaro_product", e,
                           budget));
    }

    // Sum over the box prod_i [index_i, index_i + period_i) of products of
    // powers, accumulated term by term rather than as a product of sums.
    inline std::optional<ZeroSearch> try_folner(FiniteSystem const&   sys,
                                                TransSemigroup const* e,
                                                Budget const&         budget) {
      std::vector<PowerCycle> cycles;
      std::size_t             count = 1;
      for (auto const& g : sys.generators()) {
        cycles.push_back(power_cycle(g.map));
        count *= cycles.back().period;
        if (count > budget.witness_max) {
          return std::nullopt;
        }
      }
      std::size_t const        d = cycles.size();
      std::vector<std::size_t> k(d, 0);
      WeightedMaps             terms;
      OperatorMatrix           q(sys.size(), sys.size());
      Rational const           w = make_rational(1, static_cast<std::int64_t>(count));
      for (std::size_t step = 0; step < count; ++step) {
        Transformation t = Transformation::identity(sys.size());
        for (std::size_t i = 0; i < d; ++i) {
          t = t * power(sys.generators()[i].map, cycles[i].index + k[i]);
        }
        terms[t] += w;
        q += adjoint_matrix(t) * w;
        for (std::size_t i = 0; i < d; ++i) {
          if (++k[i] < cycles[i].period) {
            break;
          }
          k[i] = 0;
        }
      }
      return found(certify(sys, std::move(q), terms, "folner", e, budget));
    }

    inline std::optional<ZeroSearch> try_candidate(FiniteSystem const&   sys,
                                                   WeightedMaps const&   terms,
                                                   std::string const&    name,
                                                   TransSemigroup const* e,
                                                   Budget const&         budget) {
      OperatorMatrix q       = combine(terms, sys.size());
      std::size_t    checked = 0;
      if (!is_zero_of(q, adjoint_generators(sys), checked)) {
        return std::nullopt;
      }
      return found(certify(sys, std::move(q), terms, name, e, budget));
    }

    inline std::optional<ZeroSearch> try_word_average(FiniteSystem const& sys,
                                                      TransSemigroup const* e,
                                                      Budget const& budget) {
      std::vector<Transformation> words;
      std::vector<Transformation> layer;
      for (auto const& g : sys.generators()) {
        layer.push_back(g.map);
      }
      for (std::size_t len = 1; len <= budget.word_length; ++len) {
        if (words.size() + layer.size() > budget.witness_max) {
          break;
        }
        words.insert(words.end(), layer.begin(), layer.end());
        std::vector<Transformation> next;
        for (auto const& w : layer) {
          for (auto const& g : sys.generators()) {
            next.push_back(w * g.map);
          }
        }
        layer = std::move(next);
      }
      WeightedMaps terms;
      Rational     w = make_rational(1, static_cast<std::int64_t>(words.size()));
      for (auto const& t : words) {
        terms[t] += w;
      }
      return try_candidate(sys, terms, "word_average", e, budget);
    }

    inline std::optional<ZeroSearch> try_kernel_average(
        FiniteSystem const&   sys,
        TransSemigroup const& e,
        Budget const&         budget) {
      auto         ker = kernel(e);
      WeightedMaps terms;
      Rational     w = make_rational(1, static_cast<std::int64_t>(ker.size()));
      for (auto i : ker) {
        terms[e.at(i)] += w;
      }
      return try_candidate(sys, terms, "kernel_average", &e, budget);
    }

    // Exact feasibility of lambda >= 0, sum lambda = 1,
    // A_g Q = Q A_g = Q for Q = sum lambda_k A_k over kernel elements k.
    // Restricting to the kernel loses nothing: if Q = sum mu_s A_s is a zero
    // and k is in the kernel then Q = Q A_k = sum mu_s A_{s*k}, and every
    // s*k lies in the kernel.
    inline ZeroSearch linear_program(FiniteSystem const&             sys,
                                     TransSemigroup const&           e,
                                     std::vector<std::size_t> const& ker,
                                     Budget const&                   budget) {
      std::size_t const n = sys.size();
      std::size_t const m = ker.size();
      std::size_t const g = e.number_of_generators();
      Matrix            a(1 + 2 * g * n * n, m);
      Vector            b(a.rows(), Rational(0));
      for (std::size_t j = 0; j < m; ++j) {
        a(0, j) = 1;
      }
      b[0] = 1;
      for (std::size_t j = 0; j < m; ++j) {
        auto const& t = e.at(ker[j]);
        for (std::size_t k = 0; k < g; ++k) {
          auto const& ls     = e.at(e.left(ker[j], k));   // gen * t
          auto const& rs     = e.at(e.right(ker[j], k));  // t * gen
          std::size_t base_l = 1 + (2 * k) * n * n;
          std::size_t base_r = 1 + (2 * k + 1) * n * n;
          for (std::size_t x = 0; x < n; ++x) {
            // A_u has a one at (u(x), x).
            a(base_l + ls[x] * n + x, j) += 1;
            a(base_l + t[x] * n + x, j) -= 1;
            a(base_r + rs[x] * n + x, j) += 1;
            a(base_r + t[x] * n + x, j) -= 1;
          }
        }
      }
      auto lambda = nonnegative_solution(a, b);
      if (!lambda) {
        ZeroSearch r{Verdict::of(false), std::nullopt, {}};
        r.notes.push_back("no convex combination of the " + std::to_string(m)
                          + " kernel elements is a zero (exact LP)");
        return r;
      }
      WeightedMaps terms;
      for (std::size_t j = 0; j < m; ++j) {
        if ((*lambda)[j] != 0) {
          terms[e.at(ker[j])] += (*lambda)[j];
        }
      }
      return found(certify(sys, combine(terms, n), terms, "linear_program",
                           &e, budget));
    }

  }  // namespace detail

  /// Searches the convex Koehler semigroup for a zero.
  ///
  /// `automatic`: commuting generators use the exact Cesaro product (complete
  /// for that class). Otherwise cheap candidates are tried (the Ellis zero,
  /// the kernel average, the word average), then the exact LP over the
  /// kernel when it has at most budget.lp_max_elements elements. Anything else
  /// is undetermined. `ellis_sg` may be null when the closure is unavailable.
  inline ZeroSearch convex_koehler_zero(FiniteSystem const&   sys,
                                        ZeroStrategy          strategy,
                                        Budget const&         budget,
                                        TransSemigroup const* ellis_sg) {
    using detail::WeightedMaps;
    auto need_commuting = [&] {
      if (!sys.commuting()) {
        throw PreconditionError(std::string(to_string(strategy))
                                + " zero search needs commuting generators");
      }
    };
    auto need_ellis = [&] {
      if (ellis_sg == nullptr) {
        throw PreconditionError(std::string(to_string(strategy))
                                + " zero search needs the Ellis semigroup");
      }
    };
    auto undetermined = [](std::string why) {
      return ZeroSearch{Verdict::undetermined(std::move(why)), std::nullopt,
                        {}};
    };
    switch (strategy) {
      case ZeroStrategy::cesaro_product: {
        need_commuting();
        auto r = detail::try_cesaro_product(sys, ellis_sg, budget);
        return r ? std::move(*r)
                 : undetermined("Cesaro witness exceeds the term budget");
      }
      case ZeroStrategy::folner: {
        need_commuting();
        auto r = detail::try_folner(sys, ellis_sg, budget);
        return r ? std::move(*r)
                 : undetermined("Folner box exceeds the term budget");
      }
      case ZeroStrategy::word_average: {
        auto r = detail::try_word_average(sys, ellis_sg, budget);
        return r ? std::move(*r)
                 : undetermined("word average is not a zero");
      }
      case ZeroStrategy::kernel_average: {
        need_ellis();
        auto r = detail::try_kernel_average(sys, *ellis_sg, budget);
        return r ? std::move(*r)
                 : undetermined("kernel average is not a zero");
      }
      case ZeroStrategy::linear_program:
        need_ellis();
        return detail::linear_program(sys, *ellis_sg, kernel(*ellis_sg),
                                      budget);
      case ZeroStrategy::automatic:
        break;
    }
    if (sys.commuting()) {
      if (auto r = detail::try_cesaro_product(sys, ellis_sg, budget)) {
        return std::move(*r);
      }
    }
    if (ellis_sg != nullptr) {
      if (auto z = zero(*ellis_sg)) {
        WeightedMaps terms{{ellis_sg->at(*z), Rational(1)}};
        if (auto r = detail::try_candidate(sys, terms, "ellis_zero", ellis_sg,
                                           budget)) {
          return std::move(*r);
        }
      }
      if (auto r = detail::try_kernel_average(sys, *ellis_sg, budget)) {
        return std::move(*r);
      }
    }
    if (auto r = detail::try_word_average(sys, ellis_sg, budget)) {
      return std::move(*r);
    }
    if (ellis_sg != nullptr) {
      auto ker = kernel(*ellis_sg);
      if (ker.size() <= budget.lp_max_elements) {
        return detail::linear_program(sys, *ellis_sg, ker, budget);
      }
    }
    return undetermined(
        ellis_sg == nullptr
            ? "Ellis semigroup unavailable and heuristics found no zero"
            : "heuristics found no zero and the kernel is too large for the "
              "exact LP");
  }

  inline ZeroSearch convex_koehler_zero(FiniteSystem const& sys,
                                        ZeroStrategy        strategy
                                        = ZeroStrategy::automatic,
                                        Budget const& budget = {}) {
    std::optional<TransSemigroup> e;
    try {
      e = ellis(sys, budget.max_elements);
    } catch (SizeLimitError const&) {
    }
    return convex_koehler_zero(sys, strategy, budget, e ? &*e : nullptr);
  }

  inline std::size_t zero_rank(ZeroCertificate const& cert) {
    return rank(cert.q);
  }

  class NotInvariantMeasureError : public PreconditionError {
   public:
    explicit NotInvariantMeasureError(std::size_t generator)
        : PreconditionError("measure is not invariant under generator "
                            + std::to_string(generator)),
          generator_(generator) {}
    std::size_t generator() const noexcept {
      return generator_;
    }

   private:
    std::size_t generator_;
  };

  struct JacobsResult {
    std::vector<State>       support;
    MatrixSemigroup          semigroup;
    std::vector<std::size_t> map;  // Koehler index -> Jacobs index
    EpimorphismCertificate   certificate;
  };

  /// Koehler elements restricted to the support of an invariant measure,
  /// deduplicated and re-closed, with the verified restriction epimorphism.
  inline JacobsResult jacobs(FiniteSystem const&    sys,
                             MatrixSemigroup const& k,
                             Measure const&         mu) {
    auto adj = adjoint_generators(sys);
    for (std::size_t g = 0; g < adj.size(); ++g) {
      if (adj[g] * mu.weights() != mu.weights()) {
        throw NotInvariantMeasureError(g);
      }
    }
    JacobsResult res{mu.support(), {}, {}, {}};
    std::vector<std::size_t> idx(res.support.begin(), res.support.end());
    std::vector<OperatorMatrix> gens;
    for (auto gi : k.generator_indices()) {
      gens.push_back(k.at(gi).restrict_to(idx));
    }
    res.semigroup = MatrixSemigroup::closure(gens);
    res.map.resize(k.size());
    std::vector<bool> hit(res.semigroup.size(), false);
    for (std::size_t i = 0; i < k.size(); ++i) {
      auto j = res.semigroup.index_of(k.at(i).restrict_to(idx));
      if (!j) {
        throw InvariantViolation("restriction leaves the Jacobs semigroup");
      }
      res.map[i] = *j;
      hit[*j]    = true;
    }
    res.certificate.surjective
        = std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
    res.certificate.multiplicative = true;
    for (std::size_t i = 0; i < k.size(); ++i) {
      for (std::size_t g = 0; g < k.generator_indices().size(); ++g) {
        auto gi = k.generator_indices()[g];
        ++res.certificate.identities_checked;
        auto lhs = res.map[k.product(i, gi)];
        auto rhs = res.semigroup.product(res.map[i], res.map[gi]);
        if (lhs != rhs) {
          res.certificate.multiplicative = false;
        }
      }
    }
    return res;
  }

  inline JacobsResult jacobs(FiniteSystem const& sys, Measure const& mu) {
    return jacobs(sys, koehler(sys), mu);
  }

  struct KernelImageReport {
    std::size_t kernel_size = 0;
    std::size_t checked     = 0;
  };

  /// Every kernel element of the Ellis semigroup maps into the union of the
  /// minimal sets. Throws InvariantViolation naming the first offender.
  inline KernelImageReport kernel_image_check(FiniteSystem const&   sys,
                                              TransSemigroup const& e) {
    std::vector<bool> in_minimal(sys.size(), false);
    for (auto const& m : minimal_sets(sys)) {
      for (auto x : m) {
        in_minimal[x] = true;
      }
    }
    KernelImageReport rep;
    auto              ker = kernel(e);
    rep.kernel_size       = ker.size();
    for (auto i : ker) {
      for (auto y : e.at(i).image()) {
        ++rep.checked;
        if (!in_minimal[y]) {
          throw InvariantViolation("kernel element " + std::to_string(i)
                                   + " maps into state " + std::to_string(y)
                                   + ", outside every minimal set");
        }
      }
    }
    return rep;
  }

  inline KernelImageReport kernel_image_check(FiniteSystem const& sys,
                                              std::size_t         cap
                                              = kDefaultElementCap) {
    return kernel_image_check(sys, ellis(sys, cap));
  }

  struct MinimalUniqueReport {
    bool           net_converges = false;
    std::string    net;
    Measure        measure;
    OperatorMatrix limit;  // Koehler-side zero Q = mu 1^T
  };

  /// For a minimal system: the averaging net converges and there is exactly
  /// one invariant measure. A minimal commuting system failing either is a
  /// hard error.
  inline MinimalUniqueReport minimal_unique_check(FiniteSystem const& sys,
                                                  Budget const& budget = {}) {
    auto mins = minimal_sets(sys);
    if (mins.size() != 1 || mins.front().size() != sys.size()) {
      throw PreconditionError("system is not minimal");
    }
    auto search = convex_koehler_zero(sys, ZeroStrategy::automatic, budget);
    auto measures = invariant_measures(sys);
    bool ok = search.certificate.has_value() && measures.size() == 1;
    if (!ok) {
      if (sys.commuting()) {
        throw InvariantViolation(
            "minimal commuting system is not uniquely ergodic");
      }
      throw PreconditionError(
          "no convergent averaging net found for this minimal system");
    }
    OperatorMatrix const& q = search.certificate->q;
    // Q = mu 1^T, i.e. every column of Q is mu.
    for (std::size_t i = 0; i < q.rows(); ++i) {
      for (std::size_t j = 0; j < q.cols(); ++j) {
        if (q(i, j) != measures.front()[i]) {
          throw InvariantViolation(
              "averaging limit is not the invariant measure");
        }
      }
    }
    return {true, search.certificate->strategy, measures.front(), q};
  }

  struct ClassificationReport {
    std::string                     system_id;
    bool                            commuting = false;
    std::optional<std::size_t>      ellis_size;
    std::optional<std::size_t>      kernel_size;
    std::optional<ZeroCertificate>  zero;
    std::optional<std::size_t>      zero_rank;
    Verdict                         unique_ergodic;
    Verdict                         norm_mean_ergodic;
    Verdict                         weak_star_mean_ergodic;
    std::vector<std::vector<State>> minimal_sets;
    std::optional<State>            transitive;
    std::optional<Measure>          invariant_measure;
    std::size_t                     invariant_measure_count = 0;
    bool                            separation              = false;
    DecompositionReport             decomposition;
    bool                            orbits_unique_minimal = false;
    std::vector<std::string>        notes;

    bool any_undetermined() const {
      return !ellis_size || !kernel_size || !unique_ergodic.determined()
             || !norm_mean_ergodic.determined()
             || !weak_star_mean_ergodic.determined();
    }
  };

  /// Throws InvariantViolation unless unique => norm => weak* holds.
  inline void check_implication_chain(ClassificationReport const& r) {
    if (r.unique_ergodic.is(true) && r.norm_mean_ergodic.is(false)) {
      throw InvariantViolation("uniquely ergodic but not norm mean ergodic");
    }
    if (r.norm_mean_ergodic.is(true) && r.weak_star_mean_ergodic.is(false)) {
      throw InvariantViolation("norm but not weak* mean ergodic");
    }
    if (r.unique_ergodic.is(true) && r.weak_star_mean_ergodic.is(false)) {
      throw InvariantViolation("uniquely but not weak* mean ergodic");
    }
  }

  inline ClassificationReport classify(FiniteSystem const& sys,
                                       Budget const&       budget = {},
                                       std::string         system_id = {}) {
    ClassificationReport rep;
    rep.system_id = std::move(system_id);
    rep.commuting = sys.commuting();
    rep.notes.push_back(
        "finite state set: weak*, weak and norm topologies coincide, so norm "
        "and weak* mean ergodicity cannot differ here");

    struct LinearPart {
      std::vector<Measure> measures;
      std::vector<Vector>  fix;
      std::vector<Vector>  fix_adjoint;
      DecompositionReport  decomposition;
    };
    auto linear_part = [&sys] {
      LinearPart lp;
      lp.measures      = invariant_measures(sys);
      lp.fix           = fixed_space(koopman_generators(sys));
      lp.fix_adjoint   = fixed_space(adjoint_generators(sys));
      lp.decomposition = decomposition_check(sys);
      return lp;
    };
    std::future<LinearPart> pending;
    if (budget.parallel) {
      pending = std::async(std::launch::async, linear_part);
    }

    rep.minimal_sets = minimal_sets(sys);

    std::optional<TransSemigroup> e;
    try {
      e = ellis(sys, budget.max_elements);
    } catch (SizeLimitError const& err) {
      rep.notes.push_back(std::string("size cap: ") + err.what());
    }
    if (e) {
      rep.ellis_size  = e->size();
      rep.kernel_size = kernel(*e).size();
      kernel_image_check(sys, *e);
    }
    if (e && !e->contains_identity()) {
      if (auto w = strict_transitivity_witness(sys)) {
        rep.transitive = *w;
      }
    } else if (auto w = is_transitive(sys)) {
      rep.transitive = w->state;
    }
    // Per-orbit criterion: every orbit closure holds exactly one minimal set.
    rep.orbits_unique_minimal = true;
    for (State x = 0; x < sys.size(); ++x) {
      auto               o = orbit(sys, x);
      std::size_t        count = 0;
      for (auto const& m : rep.minimal_sets) {
        if (std::binary_search(o.states.begin(), o.states.end(), m.front())) {
          ++count;
        }
      }
      rep.orbits_unique_minimal = rep.orbits_unique_minimal && count == 1;
    }

    auto search = convex_koehler_zero(sys, ZeroStrategy::automatic, budget,
                                      e ? &*e : nullptr);
    for (auto& note : search.notes) {
      rep.notes.push_back(std::move(note));
    }
    rep.weak_star_mean_ergodic = search.exists;
    if (search.certificate) {
      rep.zero_rank = zero_rank(*search.certificate);
      rep.zero      = std::move(search.certificate);
    }

    LinearPart lin = budget.parallel ? pending.get() : linear_part();
    rep.invariant_measure_count = lin.measures.size();
    rep.separation              = separation_check(lin.fix, lin.fix_adjoint);
    rep.decomposition           = lin.decomposition;

    if (rep.commuting) {
      bool const sep = rep.separation;
      bool const dec = rep.decomposition.direct_sum;
      if (sep != dec || !rep.weak_star_mean_ergodic.is(sep)) {
        throw InvariantViolation(
            "separation, decomposition and zero existence disagree on a "
            "commuting system");
      }
      rep.norm_mean_ergodic = Verdict::of(sep);
    } else {
      rep.norm_mean_ergodic = rep.weak_star_mean_ergodic;
      rep.notes.push_back(
          "generators do not commute: amenability is not verified, so the "
          "separation/decomposition characterisations are reported but not "
          "used; the norm verdict follows the weak* verdict");
    }

    if (rep.weak_star_mean_ergodic.determined()) {
      rep.unique_ergodic
          = Verdict::of(rep.zero_rank.has_value() && *rep.zero_rank == 1);
    } else {
      rep.unique_ergodic
          = Verdict::undetermined("zero search was inconclusive");
    }
    bool const one_measure = lin.measures.size() == 1;
    if (rep.unique_ergodic.determined()
        && *rep.unique_ergodic.value != one_measure) {
      if (rep.commuting) {
        throw InvariantViolation(
            "rank-one zero and invariant measure count disagree");
      }
      rep.notes.push_back(
          "rank-one-zero verdict differs from the invariant measure count ("
          + std::to_string(lin.measures.size()) + ")");
    }
    if (one_measure && rep.unique_ergodic.is(true)) {
      rep.invariant_measure = lin.measures.front();
    }
    check_implication_chain(rep);
    if (rep.commuting && rep.transitive
        && rep.weak_star_mean_ergodic.determined()
        && !(rep.unique_ergodic.value == rep.weak_star_mean_ergodic.value
             && rep.norm_mean_ergodic.value
                    == rep.weak_star_mean_ergodic.value)) {
      throw InvariantViolation(
          "transitive commuting system with unequal verdicts");
    }
    return rep;
  }

}  // namespace ergoscope
