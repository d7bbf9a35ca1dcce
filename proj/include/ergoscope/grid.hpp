#pragma once

// The multiplication operator f -> |cos| f sampled on a grid of [0, K pi].
// Its adjoint acts on grid measures entrywise; mass at multiples of pi stays,
// all other mass decays geometrically.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ergoscope/error.hpp"
#include "ergoscope/nets.hpp"

namespace ergoscope {

  /// Off-pi entries are clamped to at most this value.
  inline constexpr double kGridCeiling = 1.0 - 1e-12;

  class GridModel {
   public:
    /// Points x_i = i pi / m for i = 0 .. K m.
    GridModel(std::size_t multiples_of_pi, std::size_t subdivisions)
        : k_(multiples_of_pi), m_(subdivisions) {
      if (k_ == 0 || m_ == 0) {
        throw InvalidInput("grid needs at least one multiple of pi and one "
                           "subdivision");
      }
      std::size_t const n = k_ * m_ + 1;
      diagonal_.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (i % m_ == 0) {
          diagonal_[i] = 1.0;
          pi_indices_.push_back(i);
        } else {
          double x     = static_cast<double>(i) * std::numbers::pi
                     / static_cast<double>(m_);
          diagonal_[i] = std::min(std::abs(std::cos(x)), kGridCeiling);
          contraction_ = std::max(contraction_, diagonal_[i]);
        }
      }
    }

    std::size_t size() const noexcept {
      return diagonal_.size();
    }
    std::size_t multiples_of_pi() const noexcept {
      return k_;
    }
    std::size_t subdivisions() const noexcept {
      return m_;
    }
    double point(std::size_t i) const {
      return static_cast<double>(i) * std::numbers::pi
             / static_cast<double>(m_);
    }
    std::vector<double> const& diagonal() const noexcept {
      return diagonal_;
    }
    std::vector<std::size_t> const& pi_indices() const noexcept {
      return pi_indices_;
    }
    bool is_pi_index(std::size_t i) const noexcept {
      return i % m_ == 0;
    }
    /// Largest off-pi entry c; off-pi mass after n steps is at most c^n times
    /// the initial one.
    double contraction() const noexcept {
      return contraction_;
    }

    std::vector<double> uniform() const {
      return std::vector<double>(size(), 1.0 / static_cast<double>(size()));
    }
    std::vector<double> dirac(std::size_t i) const {
      std::vector<double> v(size(), 0.0);
      v.at(i) = 1.0;
      return v;
    }

   private:
    std::size_t              k_;
    std::size_t              m_;
    std::vector<double>      diagonal_;
    std::vector<std::size_t> pi_indices_;
    double                   contraction_ = 0.0;
  };

  /// mu restricted to the multiples of pi: the weak* limit of (T')^n mu.
  inline std::vector<double> pi_projection(GridModel const&           g,
                                           std::vector<double> const& mu) {
    std::vector<double> p(g.size(), 0.0);
    for (auto i : g.pi_indices()) {
      p[i] = mu[i];
    }
    return p;
  }

  inline double l1_distance(std::vector<double> const& a,
                            std::vector<double> const& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      d += std::abs(a[i] - b[i]);
    }
    return d;
  }

  struct GridIteration {
    std::vector<double> measure;
    std::vector<double> off_pi_mass;  // entry k: after k steps, k = 0..n
  };

  namespace detail {

    inline double off_pi_mass(GridModel const& g, std::vector<double> const& v) {
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!g.is_pi_index(i)) {
          s += v[i];
        }
      }
      return s;
    }

  }  // namespace detail

  /// n applications of the adjoint, one step at a time. After every step the
  /// mass at each multiple of pi must be bit-identical to its initial value
  /// and the off-pi mass must respect the c^n bound; either failure throws.
  inline GridIteration iterate_adjoint(GridModel const&    g,
                                       std::vector<double> mu,
                                       std::size_t         n) {
    if (mu.size() != g.size()) {
      throw InvalidInput("measure does not live on the grid");
    }
    for (double w : mu) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw InvalidInput("grid measure needs finite nonnegative weights");
      }
    }
    std::vector<std::uint64_t> pinned;
    for (auto i : g.pi_indices()) {
      pinned.push_back(std::bit_cast<std::uint64_t>(mu[i]));
    }
    GridIteration it;
    double const  initial_off = detail::off_pi_mass(g, mu);
    double        bound       = initial_off;
    it.off_pi_mass.reserve(n + 1);
    it.off_pi_mass.push_back(initial_off);
    auto const& d = g.diagonal();
    for (std::size_t step = 1; step <= n; ++step) {
      for (std::size_t i = 0; i < mu.size(); ++i) {
        mu[i] *= d[i];
      }
      for (std::size_t j = 0; j < pinned.size(); ++j) {
        if (std::bit_cast<std::uint64_t>(mu[g.pi_indices()[j]]) != pinned[j]) {
          throw InvariantViolation("mass at a multiple of pi changed");
        }
      }
      bound *= g.contraction();
      double off = detail::off_pi_mass(g, mu);
      // Relative slack covers rounding in the two products.
      if (off > bound * (1.0 + 1e-9) + 1e-300) {
        throw InvariantViolation("off-pi mass exceeds the geometric bound at "
                                 "step "
                                 + std::to_string(step));
      }
      it.off_pi_mass.push_back(off);
    }
    it.measure = std::move(mu);
    return it;
  }

  struct LimitProbe {
    std::uint64_t n;
    double        raw_distance;
    double        cesaro_distance;
  };

  struct WeakStarReport {
    bool                         verified = false;
    std::optional<std::uint64_t> n_raw;
    std::optional<std::uint64_t> n_cesaro;
    double                       raw_distance    = 0.0;
    double                       cesaro_distance = 0.0;
    double                       mutual_distance = 0.0;
    double                       limit_mass      = 0.0;
    std::vector<double>          limit;
    std::vector<LimitProbe>      trace;
  };

  namespace detail {

    // (T')^n mu in closed form.
    inline std::vector<double> raw_power(GridModel const&           g,
                                         std::vector<double> const& mu,
                                         std::uint64_t              n) {
      std::vector<double> v(mu.size());
      for (std::size_t i = 0; i < mu.size(); ++i) {
        v[i] = mu[i] * std::pow(g.diagonal()[i], static_cast<double>(n));
      }
      return v;
    }

    // (1/N) sum_{k<N} (T')^k mu via the geometric sum.
    inline std::vector<double> cesaro_mean(GridModel const&           g,
                                           std::vector<double> const& mu,
                                           std::uint64_t              big_n) {
      std::vector<double> v(mu.size());
      double const        nd = static_cast<double>(big_n);
      for (std::size_t i = 0; i < mu.size(); ++i) {
        double d = g.diagonal()[i];
        v[i] = d == 1.0 ? mu[i]
                        : mu[i] * (1.0 - std::pow(d, nd)) / ((1.0 - d) * nd);
      }
      return v;
    }

  }  // namespace detail

  /// Doubling search (n = 1, 2, 4, ...) for the first n at which raw powers,
  /// and separately Cesaro means, are within tol of the pi projection in l1.
  /// Unverified when either search passes max_n.
  inline WeakStarReport weak_star_limit_check(GridModel const&           g,
                                              std::vector<double> const& mu,
                                              double                     tol,
                                              std::uint64_t max_n
                                              = 1ULL << 40) {
    if (mu.size() != g.size()) {
      throw InvalidInput("measure does not live on the grid");
    }
    if (!(tol > 0.0)) {
      throw InvalidInput("tolerance must be positive");
    }
    WeakStarReport rep;
    rep.limit = pi_projection(g, mu);
    for (double w : rep.limit) {
      rep.limit_mass += w;
    }
    for (std::uint64_t n = 1; n <= max_n && !(rep.n_raw && rep.n_cesaro);
         n *= 2) {
      double raw = l1_distance(detail::raw_power(g, mu, n), rep.limit);
      double ces = l1_distance(detail::cesaro_mean(g, mu, n), rep.limit);
      rep.trace.push_back({n, raw, ces});
      if (!rep.n_raw && raw <= tol) {
        rep.n_raw        = n;
        rep.raw_distance = raw;
      }
      if (!rep.n_cesaro && ces <= tol) {
        rep.n_cesaro        = n;
        rep.cesaro_distance = ces;
      }
    }
    if (rep.n_raw && rep.n_cesaro) {
      rep.mutual_distance
          = l1_distance(detail::raw_power(g, mu, *rep.n_raw),
                        detail::cesaro_mean(g, mu, *rep.n_cesaro));
      rep.verified = rep.mutual_distance <= 2 * tol;
    }
    return rep;
  }

  /// CSV with header n,off_pi_mass, one row every `stride` steps and the last.
  inline void write_grid_trace_csv(std::ostream&        out,
                                   GridIteration const& it,
                                   std::size_t          stride = 1) {
    stride = std::max<std::size_t>(stride, 1);
    out << "n,off_pi_mass\n";
    std::size_t const last = it.off_pi_mass.size() - 1;
    for (std::size_t k = 0; k <= last; ++k) {
      if (k % stride == 0 || k == last) {
        out << k << ',' << format_double(it.off_pi_mass[k]) << '\n';
      }
    }
  }

}  // namespace ergoscope
