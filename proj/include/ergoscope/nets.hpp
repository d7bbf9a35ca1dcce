#pragma once

// Ergodic nets: Cesaro means, Abel means and Folner-box averages, plus the
// left/right ergodicity check along a sampled net.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ergoscope/error.hpp"
#include "ergoscope/linalg.hpp"
#include "ergoscope/rational.hpp"

namespace ergoscope {

  /// Shortest round-trip decimal form of a double.
  inline std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) {
      throw Error("failed to format floating point value");
    }
    return std::string(buf, end);
  }

  struct NetTerm {
    std::string element;  // e.g. "s0^3"
    Rational    weight;
  };

  /// One member of a net. The matrix equals the product, in order, of the
  /// factors, each factor being sum(weight * element).
  struct NetStep {
    std::string                       descriptor;
    OperatorMatrix                    matrix;
    std::vector<std::vector<NetTerm>> factors;
  };

  struct NetSample {
    std::vector<NetStep> steps;
  };

  /// Every factor has nonnegative weights summing to one, so the product is a
  /// convex combination of semigroup elements.
  inline bool is_convex_step(NetStep const& step) {
    for (auto const& factor : step.factors) {
      Rational total = 0;
      for (auto const& t : factor) {
        if (t.weight < 0) {
          return false;
        }
        total += t.weight;
      }
      if (total != 1) {
        return false;
      }
    }
    return !step.factors.empty();
  }

  /// (1/N) sum_{n<N} M^n.
  inline OperatorMatrix cesaro(OperatorMatrix const& m, std::size_t big_n) {
    if (big_n == 0) {
      throw PreconditionError("Cesaro mean needs N >= 1");
    }
    if (!m.is_square()) {
      throw InvalidInput("Cesaro mean of a non-square matrix");
    }
    OperatorMatrix sum(m.rows(), m.cols());
    OperatorMatrix p = OperatorMatrix::identity(m.rows());
    for (std::size_t k = 0; k < big_n; ++k) {
      sum += p;
      if (k + 1 < big_n) {
        p = p * m;
      }
    }
    return sum * make_rational(1, static_cast<std::int64_t>(big_n));
  }

  inline std::vector<NetTerm> cesaro_terms(std::string const& name,
                                           std::size_t        big_n) {
    std::vector<NetTerm> terms;
    for (std::size_t k = 0; k < big_n; ++k) {
      terms.push_back({name + "^" + std::to_string(k),
                       make_rational(1, static_cast<std::int64_t>(big_n))});
    }
    return terms;
  }

  /// Cesaro net sampled at the given N, in the order given.
  inline NetSample cesaro_net(OperatorMatrix const&           m,
                              std::vector<std::size_t> const& ns,
                              std::string const&              name = "T") {
    NetSample net;
    for (auto big_n : ns) {
      net.steps.push_back({"N=" + std::to_string(big_n), cesaro(m, big_n),
                           {cesaro_terms(name, big_n)}});
    }
    return net;
  }

  struct AbelResult {
    OperatorMatrix matrix;
    std::size_t    truncation_index = 0;  // number of series terms kept
    Rational       remainder_bound;       // max-entry bound on the tail
  };

  namespace detail {
    inline bool is_power_bounded_by_one(OperatorMatrix const& m) {
      if (m.is_row_stochastic()) {
        return true;
      }
      if (!m.is_diagonal()) {
        return false;
      }
      for (std::size_t i = 0; i < m.rows(); ++i) {
        if (m(i, i) < 0 || m(i, i) > 1) {
          return false;
        }
      }
      return true;
    }
  }  // namespace detail

  /// (r-1) sum_{n>=0} r^{-(n+1)} M^n, truncated after K terms where r^{-K} <=
  /// tail_tol. Every power has entries in [0, 1] for the accepted inputs, so
  /// r^{-K} bounds the omitted tail entrywise.
  inline AbelResult abel(OperatorMatrix const& m,
                         Rational const&       r,
                         Rational const&       tail_tol) {
    if (r <= 1) {
      throw PreconditionError("Abel mean needs r > 1");
    }
    if (tail_tol <= 0) {
      throw PreconditionError("Abel tail tolerance must be positive");
    }
    if (!detail::is_power_bounded_by_one(m)) {
      throw PreconditionError(
          "Abel mean needs a stochastic or [0,1]-diagonal matrix");
    }
    AbelResult     res{OperatorMatrix(m.rows(), m.cols()), 0, 1};
    OperatorMatrix p      = OperatorMatrix::identity(m.rows());
    Rational       inv_r  = 1 / r;
    Rational       weight = (r - 1) * inv_r;  // (r-1)/r^{n+1}
    while (res.remainder_bound > tail_tol) {
      res.matrix += p * weight;
      p = p * m;
      weight *= inv_r;
      res.remainder_bound *= inv_r;
      ++res.truncation_index;
    }
    return res;
  }

  inline NetSample abel_net(OperatorMatrix const&        m,
                            std::vector<Rational> const& rs,
                            Rational const&              tail_tol,
                            std::string const&           name = "T") {
    NetSample net;
    for (auto const& r : rs) {
      auto                 res = abel(m, r, tail_tol);
      std::vector<NetTerm> terms;
      Rational             w = (r - 1) / r;
      for (std::size_t k = 0; k < res.truncation_index; ++k) {
        terms.push_back({name + "^" + std::to_string(k), w});
        w /= r;
      }
      net.steps.push_back(
          {"r=" + to_fraction_string(r), std::move(res.matrix), {terms}});
    }
    return net;
  }

  inline void require_commuting(std::vector<OperatorMatrix> const& gens) {
    for (std::size_t a = 0; a < gens.size(); ++a) {
      for (std::size_t b = a + 1; b < gens.size(); ++b) {
        if (gens[a] * gens[b] != gens[b] * gens[a]) {
          throw PreconditionError("Folner box average needs commuting "
                                  "generators; generators "
                                  + std::to_string(a) + " and "
                                  + std::to_string(b) + " do not commute");
        }
      }
    }
  }

  /// N^{-d} sum over k in {0..N-1}^d of M_1^{k_1} ... M_d^{k_d}. Under
  /// commutativity the box sum factorises into per-generator power sums.
  inline OperatorMatrix folner_box(std::vector<OperatorMatrix> const& gens,
                                   std::size_t                        big_n) {
    if (gens.empty()) {
      throw InvalidInput("Folner box average needs at least one generator");
    }
    if (big_n == 0) {
      throw PreconditionError("Folner box average needs N >= 1");
    }
    require_commuting(gens);
    OperatorMatrix result = OperatorMatrix::identity(gens.front().rows());
    for (auto const& m : gens) {
      result = result * cesaro(m, big_n);
    }
    return result;
  }

  inline NetSample folner_net(std::vector<OperatorMatrix> const& gens,
                              std::vector<std::size_t> const&    ns,
                              std::vector<std::string> const&    names) {
    if (names.size() != gens.size()) {
      throw InvalidInput("one name per generator required");
    }
    NetSample net;
    for (auto big_n : ns) {
      std::vector<std::vector<NetTerm>> factors;
      for (auto const& name : names) {
        factors.push_back(cesaro_terms(name, big_n));
      }
      net.steps.push_back({"box=" + std::to_string(big_n),
                           folner_box(gens, big_n), std::move(factors)});
    }
    return net;
  }

  enum class Side { left, right, two_sided };

  inline char const* to_string(Side s) {
    switch (s) {
      case Side::left:
        return "left";
      case Side::right:
        return "right";
      default:
        return "two_sided";
    }
  }

  enum class NetVerdict { ergodic, not_ergodic, undetermined };

  inline char const* to_string(NetVerdict v) {
    switch (v) {
      case NetVerdict::ergodic:
        return "ergodic";
      case NetVerdict::not_ergodic:
        return "not_ergodic";
      default:
        return "undetermined";
    }
  }

  struct DefectRow {
    std::string descriptor;
    std::size_t generator;
    Side        side;  // left or right, never two_sided
    Rational    defect;
  };

  struct NetReport {
    NetVerdict             verdict = NetVerdict::undetermined;
    std::vector<DefectRow> trace;
  };

  namespace detail {

    inline NetVerdict judge(std::vector<Rational> const& d,
                            Rational const&              tol,
                            std::size_t                  k) {
      if (d.size() < k) {
        return NetVerdict::undetermined;
      }
      auto tail = d.end() - static_cast<std::ptrdiff_t>(k);
      if (std::all_of(tail, d.end(), [&](Rational const& x) {
            return x <= tol;
          })) {
        return NetVerdict::ergodic;
      }
      if (d.size() == k) {
        return NetVerdict::undetermined;
      }
      Rational tail_min = *std::min_element(tail, d.end());
      Rational head_min = *std::min_element(d.begin(), tail);
      if (tail_min > tol && tail_min >= head_min) {
        return NetVerdict::not_ergodic;
      }
      return NetVerdict::undetermined;
    }

  }  // namespace detail

  /// Left defect ||(I - M_s) T||, right defect ||T (I - M_s)|| along the net.
  ///
  /// A side is ergodic when the last `window` defects are all <= tol for every
  /// generator; not ergodic when they are all above tol without having
  /// decreased below the earlier minimum; undetermined otherwise.
  inline NetReport verify_net(NetSample const&                   net,
                              std::vector<OperatorMatrix> const& gens,
                              Side                               side,
                              Rational const&                    tol,
                              std::size_t                        window = 3) {
    if (net.steps.empty()) {
      throw InvalidInput("cannot verify an empty net");
    }
    if (window == 0) {
      throw PreconditionError("verification window must be positive");
    }
    std::vector<Side> sides;
    if (side != Side::right) {
      sides.push_back(Side::left);
    }
    if (side != Side::left) {
      sides.push_back(Side::right);
    }
    std::vector<OperatorMatrix> diffs;
    for (auto const& m : gens) {
      diffs.push_back(OperatorMatrix::identity(m.rows()) - m);
    }
    // defects[side][generator] along the net
    std::vector<std::vector<std::vector<Rational>>> defects(
        sides.size(), std::vector<std::vector<Rational>>(gens.size()));
    NetReport rep;
    for (auto const& step : net.steps) {
      for (std::size_t g = 0; g < gens.size(); ++g) {
        for (std::size_t k = 0; k < sides.size(); ++k) {
          OperatorMatrix prod = sides[k] == Side::left
                                    ? diffs[g] * step.matrix
                                    : step.matrix * diffs[g];
          defects[k][g].push_back(prod.max_abs_entry());
          rep.trace.push_back(
              {step.descriptor, g, sides[k], defects[k][g].back()});
        }
      }
    }
    bool all_ergodic = true;
    bool any_not     = false;
    for (auto const& per_side : defects) {
      for (auto const& d : per_side) {
        auto v      = detail::judge(d, tol, window);
        all_ergodic = all_ergodic && v == NetVerdict::ergodic;
        any_not     = any_not || v == NetVerdict::not_ergodic;
      }
    }
    rep.verdict = all_ergodic ? NetVerdict::ergodic
                  : any_not   ? NetVerdict::not_ergodic
                              : NetVerdict::undetermined;
    return rep;
  }

  inline Rational distance(OperatorMatrix const& a, OperatorMatrix const& b) {
    return (a - b).max_abs_entry();
  }

  inline Rational distance(Vector const& a, Vector const& b) {
    return max_abs_distance(a, b);
  }

  /// The final element, if all pairwise distances in the trailing window are
  /// within tol.
  template <typename T>
  std::optional<T> detect_limit(std::vector<T> const& trace,
                                Rational const&       tol,
                                std::size_t           window) {
    if (window < 2) {
      throw PreconditionError("limit detection needs a window of at least 2");
    }
    if (trace.size() < window) {
      return std::nullopt;
    }
    std::size_t const start = trace.size() - window;
    for (std::size_t i = start; i < trace.size(); ++i) {
      for (std::size_t j = i + 1; j < trace.size(); ++j) {
        if (distance(trace[i], trace[j]) > tol) {
          return std::nullopt;
        }
      }
    }
    return trace.back();
  }

  /// CSV with columns descriptor,generator,side,defect_norm,defect_norm_float.
  inline void write_trace_csv(std::ostream&                   out,
                              NetReport const&                rep,
                              std::vector<std::string> const& generator_names
                              = {}) {
    out << "descriptor,generator,side,defect_norm,defect_norm_float\n";
    for (auto const& row : rep.trace) {
      out << row.descriptor << ','
          << (row.generator < generator_names.size()
                  ? generator_names[row.generator]
                  : std::to_string(row.generator))
          << ',' << to_string(row.side) << ','
          << to_fraction_string(row.defect) << ','
          << format_double(to_double(row.defect)) << '\n';
    }
  }

}  // namespace ergoscope
