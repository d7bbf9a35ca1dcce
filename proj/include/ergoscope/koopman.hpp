#pragma once

// Koopman matrices, their adjoints acting on measures, fixed spaces and
// invariant measures. Everything here is exact.
//
// Functions on the state set are column vectors; M_s f = f o s. Measures are
// column vectors too and the adjoint acts as A_s = M_s^T, so A_s delta_x =
// delta_{s(x)}. Consequently M_{s*t} = M_t M_s while A_{s*t} = A_s A_t.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ergoscope/dynsys.hpp"
#include "ergoscope/error.hpp"
#include "ergoscope/linalg.hpp"
#include "ergoscope/rational.hpp"
#include "ergoscope/semigroup.hpp"

namespace ergoscope {

  /// A probability vector on the state set, validated on construction.
  class Measure {
   public:
    explicit Measure(Vector weights) : weights_(std::move(weights)) {
      Rational total = 0;
      for (auto const& w : weights_) {
        if (w < 0) {
          throw InvalidInput("measure with a negative weight");
        }
        total += w;
      }
      if (total != 1) {
        throw InvalidInput("measure weights sum to " + to_fraction_string(total)
                           + ", not 1");
      }
    }

    static Measure dirac(std::size_t n, State x) {
      Vector w(n, Rational(0));
      w.at(x) = 1;
      return Measure(std::move(w));
    }

    static Measure uniform(std::size_t n) {
      return Measure(Vector(n, make_rational(1, static_cast<std::int64_t>(n))));
    }

    static Measure uniform_on(std::size_t n, std::vector<State> const& support) {
      if (support.empty()) {
        throw InvalidInput("uniform measure on an empty set");
      }
      Vector w(n, Rational(0));
      for (auto x : support) {
        w.at(x) = make_rational(1, static_cast<std::int64_t>(support.size()));
      }
      return Measure(std::move(w));
    }

    std::size_t size() const noexcept {
      return weights_.size();
    }
    Vector const& weights() const noexcept {
      return weights_;
    }
    Rational const& operator[](std::size_t i) const {
      return weights_[i];
    }

    std::vector<State> support() const {
      std::vector<State> s;
      for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (weights_[i] != 0) {
          s.push_back(static_cast<State>(i));
        }
      }
      return s;
    }

    friend bool operator==(Measure const&, Measure const&) = default;

   private:
    Vector weights_;
  };

  /// <f, mu> = sum_x f(x) mu({x}).
  inline Rational pairing(Vector const& f, Vector const& mu) {
    return dot(f, mu);
  }

  /// M[x][y] = 1 iff s(x) = y, so (M f)(x) = f(s(x)).
  inline OperatorMatrix koopman_matrix(Transformation const& s) {
    OperatorMatrix m(s.degree(), s.degree());
    for (std::size_t x = 0; x < s.degree(); ++x) {
      m(x, s[x]) = 1;
    }
    return m;
  }

  inline OperatorMatrix koopman_matrix(FiniteSystem const&   sys,
                                       Transformation const& s) {
    if (s.degree() != sys.size()) {
      throw InvalidInput("map and system have different state sets");
    }
    return koopman_matrix(s);
  }

  /// A_s = M_s^T, the action on measures.
  inline OperatorMatrix adjoint_matrix(Transformation const& s) {
    return koopman_matrix(s).transpose();
  }

  /// M^T v for an arbitrary vector (no measure semantics).
  inline Vector apply_adjoint(OperatorMatrix const& m, Vector const& v) {
    if (!m.is_square() || m.rows() != v.size()) {
      throw InvalidInput("adjoint applied to a vector of the wrong size");
    }
    Vector out(v.size());
    for (std::size_t x = 0; x < m.rows(); ++x) {
      if (v[x] == 0) {
        continue;
      }
      for (std::size_t y = 0; y < m.cols(); ++y) {
        if (m(x, y) != 0) {
          out[y] += m(x, y) * v[x];
        }
      }
    }
    return out;
  }

  /// Image of a probability measure under the adjoint of a row-stochastic M.
  inline Measure adjoint_on_measure(OperatorMatrix const& m, Measure const& mu) {
    if (!m.is_row_stochastic()) {
      throw PreconditionError(
          "adjoint of a non-stochastic matrix does not preserve measures");
    }
    return Measure(apply_adjoint(m, mu.weights()));
  }

  /// Exact basis of the common fixed space of the given square matrices.
  inline std::vector<Vector> fixed_space(
      std::vector<OperatorMatrix> const& matrices) {
    if (matrices.empty()) {
      throw InvalidInput("fixed_space of an empty family");
    }
    std::size_t const n = matrices.front().rows();
    Matrix            stacked(matrices.size() * n, n);
    for (std::size_t k = 0; k < matrices.size(); ++k) {
      if (matrices[k].rows() != n || !matrices[k].is_square()) {
        throw InvalidInput("fixed_space of matrices of different sizes");
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          stacked(k * n + i, j) = matrices[k](i, j) - (i == j ? 1 : 0);
        }
      }
    }
    return nullspace(stacked);
  }

  inline std::vector<OperatorMatrix> koopman_generators(FiniteSystem const& sys) {
    std::vector<OperatorMatrix> out;
    for (auto const& g : sys.generators()) {
      out.push_back(koopman_matrix(g.map));
    }
    return out;
  }

  inline std::vector<OperatorMatrix> adjoint_generators(FiniteSystem const& sys) {
    std::vector<OperatorMatrix> out;
    for (auto const& g : sys.generators()) {
      out.push_back(adjoint_matrix(g.map));
    }
    return out;
  }

  /// True iff no nonzero element of span(fix_adjoint) vanishes on all of
  /// fix_functions, decided by the rank of the pairing matrix.
  inline bool separation_check(std::vector<Vector> const& fix_functions,
                               std::vector<Vector> const& fix_adjoint) {
    if (fix_adjoint.empty()) {
      return true;
    }
    std::size_t const   width = fix_functions.size();
    std::vector<Vector> rows;
    for (auto const& mu : fix_adjoint) {
      Vector row(width);
      for (std::size_t i = 0; i < width; ++i) {
        row[i] = pairing(fix_functions[i], mu);
      }
      rows.push_back(std::move(row));
    }
    if (width == 0) {
      return false;
    }
    std::size_t const dim_adjoint
        = rank_of_rows(fix_adjoint, fix_adjoint.front().size());
    return rank_of_rows(rows, width) == dim_adjoint;
  }

  struct DecompositionReport {
    std::size_t dim_fix        = 0;
    std::size_t dim_range_span = 0;
    bool        direct_sum     = false;
  };

  /// Whether C^n = fix(S) (+) span{(I - M_s) e_i}.
  inline DecompositionReport decomposition_check(FiniteSystem const& sys) {
    auto              ms  = koopman_generators(sys);
    auto              fix = fixed_space(ms);
    std::size_t const n   = sys.size();
    std::vector<Vector> range;
    for (auto const& m : ms) {
      for (std::size_t i = 0; i < n; ++i) {
        Vector col(n);
        for (std::size_t r = 0; r < n; ++r) {
          col[r] = (r == i ? Rational(1) : Rational(0)) - m(r, i);
        }
        range.push_back(std::move(col));
      }
    }
    DecompositionReport rep;
    rep.dim_fix        = fix.size();
    rep.dim_range_span = rank_of_rows(range, n);
    std::vector<Vector> both = fix;
    both.insert(both.end(), range.begin(), range.end());
    std::size_t const joint = rank_of_rows(both, n);
    rep.direct_sum = joint == rep.dim_fix + rep.dim_range_span && joint == n;
    return rep;
  }

  /// Extreme invariant probability measures, ordered by smallest support point.
  ///
  /// A measure invariant under a map s must be supported on a set that s maps
  /// bijectively onto itself. The extreme points are therefore the uniform
  /// measures on the orbits of the generated permutation action on the
  /// largest set Z with s(Z) = Z for every generator. Each result is verified
  /// invariant and extreme exactly.
  inline std::vector<Measure> invariant_measures(FiniteSystem const& sys) {
    std::size_t const n = sys.size();
    std::vector<bool> in(n, true);
    for (bool changed = true; changed;) {
      changed = false;
      std::vector<bool> hit(n * sys.generators().size(), false);
      for (std::size_t g = 0; g < sys.generators().size(); ++g) {
        for (State x = 0; x < n; ++x) {
          if (in[x]) {
            hit[g * n + sys.generators()[g].map[x]] = true;
          }
        }
      }
      for (State x = 0; x < n; ++x) {
        if (!in[x]) {
          continue;
        }
        for (std::size_t g = 0; g < sys.generators().size(); ++g) {
          if (!in[sys.generators()[g].map[x]] || !hit[g * n + x]) {
            in[x]   = false;
            changed = true;
            break;
          }
        }
      }
    }
    // Orbits of the permutation action on Z.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x         = parent[x];
      }
      return x;
    };
    for (State x = 0; x < n; ++x) {
      if (!in[x]) {
        continue;
      }
      for (auto const& g : sys.generators()) {
        auto a = find(x);
        auto b = find(g.map[x]);
        if (a != b) {
          parent[std::max(a, b)] = std::min(a, b);
        }
      }
    }
    std::vector<std::vector<State>> classes(n);
    for (State x = 0; x < n; ++x) {
      if (in[x]) {
        classes[find(x)].push_back(x);
      }
    }
    auto                 adjoints = adjoint_generators(sys);
    std::vector<Measure> result;
    for (auto const& support : classes) {
      if (support.empty()) {
        continue;
      }
      Measure mu = Measure::uniform_on(n, support);
      for (auto const& a : adjoints) {
        if (a * mu.weights() != mu.weights()) {
          throw InvariantViolation("candidate invariant measure is not fixed");
        }
      }
      // Extreme: invariant vectors supported on the support form a line.
      std::vector<OperatorMatrix> restricted;
      std::vector<std::size_t>    idx(support.begin(), support.end());
      for (auto const& a : adjoints) {
        restricted.push_back(a.restrict_to(idx));
      }
      if (fixed_space(restricted).size() != 1) {
        throw InvariantViolation("candidate invariant measure is not extreme");
      }
      result.push_back(std::move(mu));
    }
    if (result.empty() && sys.commuting()) {
      throw InvariantViolation(
          "commuting system without an invariant probability measure");
    }
    return result;
  }

}  // namespace ergoscope
