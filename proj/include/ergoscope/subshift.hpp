#pragma once

// One-sided binary shift: run-length encoded words, the rolandex point with
// its block structure, finite-resolution window closures and Cesaro traces
// of cylinder functionals.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ergoscope/error.hpp"
#include "ergoscope/nets.hpp"
#include "ergoscope/rational.hpp"

namespace ergoscope {

  /// Longest rolandex prefix generated. Run-length encoding keeps memory
  /// proportional to the number of blocks, so this is far above 10^8.
  inline constexpr std::uint64_t kMaxPrefix = 1'000'000'000'000'000ULL;

  /// k(N) = sum_{n=1}^{N-1} (n + 10^n), by direct summation.
  inline std::uint64_t k_sum(unsigned big_n) {
    if (big_n == 0 || big_n > 19) {
      throw PreconditionError("k(N) needs 1 <= N <= 19");
    }
    std::uint64_t total = 0;
    std::uint64_t ten   = 1;
    for (unsigned n = 1; n < big_n; ++n) {
      ten *= 10;
      total += n + ten;
    }
    return total;
  }

  /// k(N) = N(N-1)/2 + 10 (10^{N-1} - 1) / 9.
  inline std::uint64_t k_closed(unsigned big_n) {
    if (big_n == 0 || big_n > 19) {
      throw PreconditionError("k(N) needs 1 <= N <= 19");
    }
    std::uint64_t ten = 1;
    for (unsigned n = 1; n < big_n; ++n) {
      ten *= 10;
    }
    std::uint64_t const n = big_n;
    return n * (n - 1) / 2 + 10 * ((ten - 1) / 9);
  }

  struct Run {
    bool          bit;
    std::uint64_t length;

    friend bool operator==(Run const&, Run const&) = default;
  };

  enum class WordOrigin { rolandex, user };

  class BinaryWord {
   public:
    BinaryWord(std::vector<Run> runs, WordOrigin origin)
        : origin_(origin) {
      for (auto const& r : runs) {
        append(r.bit, r.length);
      }
      if (length_ == 0) {
        throw InvalidInput("binary word must be nonempty");
      }
    }

    /// Parses a string of '0' and '1' characters.
    static BinaryWord from_bits(std::string const& bits) {
      std::vector<Run> runs;
      for (char c : bits) {
        if (c != '0' && c != '1') {
          throw InvalidInput(std::string("bit string contains '") + c + "'");
        }
        bool b = c == '1';
        if (!runs.empty() && runs.back().bit == b) {
          ++runs.back().length;
        } else {
          runs.push_back({b, 1});
        }
      }
      return BinaryWord(std::move(runs), WordOrigin::user);
    }

    /// u^reps, truncated to `length` symbols.
    static BinaryWord periodic(std::string const& u, std::uint64_t length) {
      if (u.empty()) {
        throw InvalidInput("empty period");
      }
      std::string bits;
      while (bits.size() < length) {
        bits += u;
      }
      bits.resize(length);
      return from_bits(bits);
    }

    std::uint64_t length() const noexcept {
      return length_;
    }
    WordOrigin origin() const noexcept {
      return origin_;
    }
    std::vector<Run> const& runs() const noexcept {
      return runs_;
    }
    /// Start offset of each run.
    std::vector<std::uint64_t> const& offsets() const noexcept {
      return offsets_;
    }

    bool at(std::uint64_t pos) const {
      if (pos >= length_) {
        throw PreconditionError("bit position beyond the word");
      }
      auto it = std::upper_bound(offsets_.begin(), offsets_.end(), pos);
      return runs_[static_cast<std::size_t>(it - offsets_.begin()) - 1].bit;
    }

    std::uint64_t count_ones() const {
      std::uint64_t c = 0;
      for (auto const& r : runs_) {
        c += r.bit ? r.length : 0;
      }
      return c;
    }

    /// First `len` symbols.
    BinaryWord prefix(std::uint64_t len) const {
      if (len == 0 || len > length_) {
        throw PreconditionError("prefix length out of range");
      }
      std::vector<Run> out;
      std::uint64_t    left = len;
      for (auto const& r : runs_) {
        if (left == 0) {
          break;
        }
        out.push_back({r.bit, std::min(left, r.length)});
        left -= out.back().length;
      }
      return BinaryWord(std::move(out), origin_);
    }

    /// The word with every run shortened to at most `cap`, as a string.
    std::string capped_bits(std::uint64_t cap) const {
      std::string s;
      for (auto const& r : runs_) {
        s.append(static_cast<std::size_t>(std::min(r.length, cap)),
                 r.bit ? '1' : '0');
      }
      return s;
    }

   private:
    void append(bool bit, std::uint64_t len) {
      if (len == 0) {
        return;
      }
      if (!runs_.empty() && runs_.back().bit == bit) {
        runs_.back().length += len;
      } else {
        offsets_.push_back(length_);
        runs_.push_back({bit, len});
      }
      length_ += len;
    }

    std::vector<Run>           runs_;
    std::vector<std::uint64_t> offsets_;
    std::uint64_t              length_ = 0;
    WordOrigin                 origin_;
  };

  /// First L symbols of the point with x_n = 1 exactly for
  /// n in {k(N)+1, ..., k(N)+N} (1-based): blocks of N ones, each followed by
  /// 10^N zeros.
  inline BinaryWord rolandex_prefix(std::uint64_t len) {
    if (len == 0 || len > kMaxPrefix) {
      throw PreconditionError("rolandex prefix length must be in [1, 10^15]");
    }
    std::vector<Run> runs;
    std::uint64_t    pos  = 0;
    std::uint64_t    ten  = 1;
    for (unsigned big_n = 1; pos < len; ++big_n) {
      if (k_sum(big_n) != k_closed(big_n) || k_sum(big_n) != pos) {
        throw InvariantViolation("k(N) forms disagree at N = "
                                 + std::to_string(big_n));
      }
      ten *= 10;
      std::uint64_t ones = std::min<std::uint64_t>(big_n, len - pos);
      runs.push_back({true, ones});
      pos += ones;
      std::uint64_t zeros = std::min(ten, len - pos);
      if (zeros > 0) {
        runs.push_back({false, zeros});
      }
      pos += zeros;
    }
    return BinaryWord(std::move(runs), WordOrigin::rolandex);
  }

  struct WindowSystem {
    std::size_t                                   window = 0;
    std::set<std::string>                         windows;
    std::map<std::string, std::set<std::string>>  successors;
  };

  /// All length-W factors of the word, with the shift edges given by its
  /// length W+1 factors. Runs longer than W+1 contribute no new factors of
  /// either length, so the scan works on the word with runs capped at W+1.
  inline WindowSystem window_closure(BinaryWord const& word, std::size_t w) {
    if (w == 0 || w > word.length()) {
      throw PreconditionError("window must be in [1, word length]");
    }
    std::string const s = word.capped_bits(w + 1);
    WindowSystem      ws;
    ws.window = w;
    for (std::size_t i = 0; i + w <= s.size(); ++i) {
      ws.windows.insert(s.substr(i, w));
      if (i + w < s.size()) {
        ws.successors[s.substr(i, w)].insert(s.substr(i + 1, w));
      }
    }
    return ws;
  }

  /// Constant windows present, 0^W before 1^W.
  inline std::vector<std::string> fixed_windows(WindowSystem const& ws) {
    std::vector<std::string> out;
    for (char c : {'0', '1'}) {
      std::string w(ws.window, c);
      if (ws.windows.count(w) != 0) {
        out.push_back(std::move(w));
      }
    }
    return out;
  }

  /// A periodic orbit visible at resolution W: root u with |u| < W, all of
  /// whose |u| windows of u^infinity are present.
  struct MinimalCandidate {
    std::string              root;  // least rotation of a primitive word
    std::vector<std::string> windows;
  };

  namespace detail {

    inline std::size_t minimal_period(std::string const& w) {
      for (std::size_t p = 1; p < w.size(); ++p) {
        bool ok = true;
        for (std::size_t i = 0; i + p < w.size() && ok; ++i) {
          ok = w[i] == w[i + p];
        }
        if (ok) {
          return p;
        }
      }
      return w.size();
    }

    inline std::string least_rotation(std::string const& u) {
      std::string best = u;
      for (std::size_t r = 1; r < u.size(); ++r) {
        best = std::min(best, u.substr(r) + u.substr(0, r));
      }
      return best;
    }

    inline std::vector<std::string> periodic_windows(std::string const& u,
                                                     std::size_t        w) {
      std::vector<std::string> out;
      for (std::size_t r = 0; r < u.size(); ++r) {
        std::string s;
        for (std::size_t i = 0; i < w; ++i) {
          s += u[(r + i) % u.size()];
        }
        out.push_back(std::move(s));
      }
      std::sort(out.begin(), out.end());
      return out;
    }

  }  // namespace detail

  inline std::vector<MinimalCandidate> minimal_candidates(
      WindowSystem const& ws) {
    std::set<std::string> roots;
    for (auto const& w : ws.windows) {
      std::size_t p = detail::minimal_period(w);
      if (p < ws.window) {
        roots.insert(detail::least_rotation(w.substr(0, p)));
      }
    }
    std::vector<MinimalCandidate> out;
    for (auto const& root : roots) {
      auto wins = detail::periodic_windows(root, ws.window);
      bool all  = std::all_of(wins.begin(), wins.end(), [&](auto const& x) {
        return ws.windows.count(x) != 0;
      });
      if (all) {
        out.push_back({root, std::move(wins)});
      }
    }
    return out;
  }

  enum class SubshiftVerdict { not_weak_star_mean_ergodic, consistent, undetermined };

  struct SubshiftReport {
    std::size_t                   window  = 0;
    std::uint64_t                 horizon = 0;
    std::size_t                   window_count = 0;
    std::vector<std::string>      fixed_windows;
    std::vector<MinimalCandidate> candidates;
    bool                          candidates_disjoint = true;
    SubshiftVerdict               verdict = SubshiftVerdict::undetermined;
    std::string                   verdict_text;
    std::vector<std::string>      notes;
  };

  /// Minimal-set candidates at resolution W in the first `horizon` symbols.
  /// Two disjoint candidates inside the orbit closure of one point refute
  /// weak* mean ergodicity at that resolution.
  inline SubshiftReport classify_subshift(BinaryWord const& word,
                                          std::size_t       w,
                                          std::uint64_t     horizon) {
    if (horizon == 0 || horizon > word.length()) {
      throw PreconditionError("horizon must be in [1, word length]");
    }
    if (w > horizon) {
      throw PreconditionError("window exceeds the horizon");
    }
    BinaryWord const   pre = horizon == word.length() ? word : word.prefix(horizon);
    auto const         ws  = window_closure(pre, w);
    SubshiftReport     rep;
    rep.window       = w;
    rep.horizon      = horizon;
    rep.window_count = ws.windows.size();
    rep.fixed_windows = fixed_windows(ws);
    rep.candidates    = minimal_candidates(ws);
    std::set<std::string> used;
    for (auto const& c : rep.candidates) {
      for (auto const& x : c.windows) {
        rep.candidates_disjoint = used.insert(x).second && rep.candidates_disjoint;
      }
    }
    std::string const res = "resolution W=" + std::to_string(w) + ", horizon "
                            + std::to_string(horizon);
    if (rep.candidates.size() >= 2 && rep.candidates_disjoint) {
      rep.verdict      = SubshiftVerdict::not_weak_star_mean_ergodic;
      rep.verdict_text = "not weak* mean ergodic (resolution-qualified)";
      rep.notes.push_back(
          "orbit closure of the generating point holds "
          + std::to_string(rep.candidates.size())
          + " disjoint minimal candidates at " + res
          + "; unique-minimal-set criterion fails");
    } else if (rep.candidates.size() == 1) {
      rep.verdict      = SubshiftVerdict::consistent;
      rep.verdict_text = "consistent with weak* mean ergodicity ("
                         + res + ")";
    } else {
      rep.verdict      = SubshiftVerdict::undetermined;
      rep.verdict_text = "undetermined at " + res;
    }
    if (word.origin() == WordOrigin::rolandex) {
      rep.notes.push_back(
          "tameness of the orbit closure is taken from the literature via the "
          "cardinality of its Ellis semigroup; it is not computed");
    }
    return rep;
  }

  /// f(x) = values[index of x_0 ... x_{d-1}], x_0 the most significant bit.
  struct CylinderFunctional {
    std::size_t           depth = 1;
    std::vector<Rational> values;

    static CylinderFunctional first_coordinate() {
      return {1, {Rational(0), Rational(1)}};
    }

    Rational const& operator()(std::size_t index) const {
      return values.at(index);
    }
  };

  /// (1/N) sum_{n<N} f(shift^n x), exactly, for each N in order.
  /// Requires N - 1 + depth <= length, i.e. every window read lies in the word.
  inline std::vector<Rational> cesaro_trace(BinaryWord const&                 word,
                                            CylinderFunctional const&         f,
                                            std::vector<std::uint64_t> const& ns) {
    if (f.depth == 0 || f.depth > 20 || f.values.size() != (1ULL << f.depth)) {
      throw InvalidInput("cylinder functional needs 2^depth values");
    }
    std::uint64_t max_n = 0;
    for (auto n : ns) {
      if (n == 0) {
        throw PreconditionError("Cesaro trace needs N >= 1");
      }
      max_n = std::max(max_n, n);
    }
    if (ns.empty()) {
      return {};
    }
    if (max_n - 1 + f.depth > word.length()) {
      throw PreconditionError("word too short for the requested Cesaro trace");
    }
    std::vector<std::size_t> order(ns.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return ns[a] < ns[b]; });
    std::vector<Rational> out(ns.size());
    std::size_t           next = 0;
    Rational              acc  = 0;
    std::uint64_t const   d    = f.depth;
    auto value_at = [&](std::uint64_t pos) -> Rational const& {
      std::size_t idx = 0;
      for (std::uint64_t j = 0; j < d; ++j) {
        idx = (idx << 1) | (word.at(pos + j) ? 1U : 0U);
      }
      return f(idx);
    };
    // Segment [a, b) where every start position contributes value v.
    auto segment = [&](std::uint64_t a, std::uint64_t b, Rational const& v) {
      while (next < order.size() && ns[order[next]] <= b) {
        std::uint64_t big_n = ns[order[next]];
        out[order[next]]
            = (acc + v * Rational(Integer(big_n - a))) / Rational(Integer(big_n));
        ++next;
      }
      acc += v * Rational(Integer(b - a));
    };
    auto const&   runs    = word.runs();
    auto const&   offsets = word.offsets();
    for (std::size_t r = 0; r < runs.size() && next < order.size(); ++r) {
      std::uint64_t start = offsets[r];
      std::uint64_t end   = start + runs[r].length;
      std::uint64_t stop  = std::min(end, max_n);
      // Start positions whose window stays inside this run.
      std::uint64_t bulk_end = runs[r].length >= d ? end - d + 1 : start;
      bulk_end               = std::min(bulk_end, stop);
      if (bulk_end > start) {
        std::size_t idx = runs[r].bit ? (1ULL << d) - 1 : 0;
        segment(start, bulk_end, f(idx));
      }
      for (std::uint64_t p = std::max(start, bulk_end); p < stop; ++p) {
        segment(p, p + 1, value_at(p));
      }
    }
    return out;
  }

  /// CSV with header N,value,value_float.
  inline void write_cesaro_trace_csv(std::ostream&                     out,
                                     std::vector<std::uint64_t> const& ns,
                                     std::vector<Rational> const&      values) {
    out << "N,value,value_float\n";
    for (std::size_t i = 0; i < ns.size(); ++i) {
      out << ns[i] << ',' << to_fraction_string(values[i]) << ','
          << format_double(to_double(values[i])) << '\n';
    }
  }

}  // namespace ergoscope
