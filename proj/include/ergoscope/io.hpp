#pragma once

// JSON descriptors in, JSON reports and CSV traces out. Fractions cross the
// boundary as "p/q" strings.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ergoscope/dynsys.hpp"
#include "ergoscope/envelope.hpp"
#include "ergoscope/error.hpp"
#include "ergoscope/grid.hpp"
#include "ergoscope/koopman.hpp"
#include "ergoscope/semigroup.hpp"
#include "ergoscope/subshift.hpp"

namespace ergoscope {

  using Json = nlohmann::ordered_json;

  struct SubshiftDescriptor {
    std::string   generator;  // "rolandex" or "explicit"
    std::string   bits;
    std::size_t   window  = 0;
    std::uint64_t horizon = 0;

    BinaryWord word() const {
      if (generator == "rolandex") {
        return rolandex_prefix(horizon);
      }
      return BinaryWord::from_bits(bits).prefix(horizon);
    }
  };

  struct GridDescriptor {
    std::size_t multiples_of_pi = 2;
    std::size_t subdivisions    = 100;
  };

  struct Descriptor {
    std::string                                                   id;
    std::variant<FiniteSystem, SubshiftDescriptor, GridDescriptor> body;
  };

  namespace detail {

    inline std::pair<std::size_t, std::size_t> line_column(std::string const& text,
                                                           std::size_t byte) {
      std::size_t line = 1;
      std::size_t col  = 1;
      for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      return {line, col};
    }

    template <typename T>
    T require(Json const& obj, char const* key, char const* where) {
      if (!obj.is_object() || !obj.contains(key)) {
        throw InvalidInput(std::string(where) + ": missing \"" + key + "\"");
      }
      try {
        return obj.at(key).get<T>();
      } catch (nlohmann::json::exception const&) {
        throw InvalidInput(std::string(where) + ": \"" + key
                           + "\" has the wrong type");
      }
    }

    inline FiniteSystem parse_finite(Json const& doc) {
      auto labels = require<std::vector<std::string>>(doc, "states", "system");
      std::unordered_map<std::string, State> index;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        index.emplace(labels[i], static_cast<State>(i));
      }
      if (!doc.contains("generators") || !doc["generators"].is_array()) {
        throw InvalidInput("system: \"generators\" must be an array");
      }
      std::vector<NamedMap> gens;
      for (auto const& g : doc["generators"]) {
        auto name = require<std::string>(g, "name", "generator");
        if (!g.contains("map") || !g["map"].is_object()) {
          throw InvalidInput("generator '" + name + "': \"map\" must be an object");
        }
        std::vector<State> image(labels.size());
        std::vector<bool>  defined(labels.size(), false);
        for (auto const& [from, to] : g["map"].items()) {
          auto src = index.find(from);
          if (src == index.end() || !to.is_string()) {
            throw InvalidInput("generator '" + name + "' maps unknown state '"
                               + from + "'");
          }
          auto dst = index.find(to.get<std::string>());
          if (dst == index.end()) {
            throw InvalidInput("generator '" + name + "' maps to unknown state '"
                               + to.get<std::string>() + "'");
          }
          image[src->second]   = dst->second;
          defined[src->second] = true;
        }
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (!defined[i]) {
            throw InvalidInput("generator '" + name + "' is not defined on '"
                               + labels[i] + "'");
          }
        }
        gens.push_back({std::move(name), Transformation(std::move(image))});
      }
      return FiniteSystem(std::move(labels), std::move(gens));
    }

    inline SubshiftDescriptor parse_subshift(Json const& s) {
      SubshiftDescriptor d;
      d.generator = require<std::string>(s, "generator", "subshift");
      d.window    = require<std::size_t>(s, "window", "subshift");
      if (d.generator == "rolandex") {
        d.horizon = require<std::uint64_t>(s, "horizon", "subshift");
      } else if (d.generator == "explicit") {
        d.bits    = require<std::string>(s, "bits", "subshift");
        d.horizon = s.contains("horizon")
                        ? require<std::uint64_t>(s, "horizon", "subshift")
                        : d.bits.size();
        if (d.horizon > d.bits.size()) {
          throw InvalidInput("subshift: horizon exceeds the bit string");
        }
      } else {
        throw InvalidInput("subshift: unknown generator '" + d.generator + "'");
      }
      if (d.window == 0 || d.horizon == 0 || d.window > d.horizon) {
        throw InvalidInput("subshift: need 1 <= window <= horizon");
      }
      return d;
    }

  }  // namespace detail

  /// Parses a descriptor; malformed JSON reports line and column.
  inline Descriptor parse_descriptor(std::string const& text) {
    Json doc;
    try {
      doc = Json::parse(text);
    } catch (nlohmann::json::parse_error const& e) {
      auto [line, col] = detail::line_column(text, e.byte);
      throw InvalidInput("malformed JSON at line " + std::to_string(line)
                         + ", column " + std::to_string(col));
    }
    if (!doc.is_object()) {
      throw InvalidInput("descriptor must be a JSON object");
    }
    std::string id = doc.contains("id") && doc["id"].is_string()
                         ? doc["id"].get<std::string>()
                         : std::string();
    if (doc.contains("subshift")) {
      return {id, detail::parse_subshift(doc["subshift"])};
    }
    if (doc.contains("grid")) {
      GridDescriptor g;
      g.multiples_of_pi
          = detail::require<std::size_t>(doc["grid"], "multiples_of_pi", "grid");
      g.subdivisions
          = detail::require<std::size_t>(doc["grid"], "subdivisions", "grid");
      if (g.multiples_of_pi == 0 || g.subdivisions == 0) {
        throw InvalidInput("grid: sizes must be positive");
      }
      return {id, g};
    }
    return {id, detail::parse_finite(doc)};
  }

  inline std::string read_file(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw InvalidInput("cannot read '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  /// Writes via a sibling temporary file and a rename.
  inline void write_atomically(std::filesystem::path const& path,
                               std::string const&           content) {
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) {
        throw Error("cannot write '" + tmp.string() + "'");
      }
      out << content;
      if (!out.flush()) {
        throw Error("short write to '" + tmp.string() + "'");
      }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
      std::filesystem::remove(tmp);
      throw Error("cannot rename onto '" + path.string() + "': " + ec.message());
    }
  }

  inline std::string dump(Json const& j) {
    return j.dump(2) + "\n";
  }

  inline Json to_json(Transformation const& t, std::vector<std::string> const& labels) {
    Json m = Json::object();
    for (std::size_t x = 0; x < t.degree(); ++x) {
      m[labels[x]] = labels[t[x]];
    }
    return m;
  }

  inline Json to_json(Matrix const& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      Json row = Json::array();
      for (std::size_t j = 0; j < m.cols(); ++j) {
        row.push_back(to_fraction_string(m(i, j)));
      }
      rows.push_back(std::move(row));
    }
    return rows;
  }

  inline Json to_json(Measure const& mu, std::vector<std::string> const& labels) {
    Json w = Json::object();
    for (std::size_t x = 0; x < mu.size(); ++x) {
      w[labels[x]] = to_fraction_string(mu[x]);
    }
    Json support = Json::array();
    for (auto x : mu.support()) {
      support.push_back(labels[x]);
    }
    return Json{{"weights", w}, {"support", support}};
  }

  inline Json to_json(Verdict const& v) {
    if (v.value) {
      return Json{{"status", "determined"}, {"value", *v.value}};
    }
    return Json{{"status", "undetermined"}, {"reason", v.reason}};
  }

  template <typename T>
  Json tri_state(std::optional<T> const& v, std::string const& reason) {
    if (v) {
      return Json{{"status", "determined"}, {"value", *v}};
    }
    return Json{{"status", "undetermined"}, {"reason", reason}};
  }

  inline Json to_json(ZeroCertificate const& c, std::vector<std::string> const& labels) {
    Json witness = Json::array();
    for (auto const& t : c.witness) {
      witness.push_back(
          Json{{"map", to_json(t.element, labels)}, {"weight", to_fraction_string(t.weight)}});
    }
    return Json{{"strategy", c.strategy},
                {"matrix", to_json(c.q)},
                {"witness", witness},
                {"limit_marker", c.limit_marker},
                {"identities_checked", c.identities_checked}};
  }

  inline Json state_sets(std::vector<std::vector<State>> const& sets,
                         std::vector<std::string> const&        labels) {
    Json out = Json::array();
    for (auto const& s : sets) {
      Json one = Json::array();
      for (auto x : s) {
        one.push_back(labels[x]);
      }
      out.push_back(std::move(one));
    }
    return out;
  }

  inline Json to_json(ClassificationReport const& r, FiniteSystem const& sys) {
    auto const&       labels = sys.labels();
    std::string const capped = "Ellis semigroup exceeded the element cap";
    Json              j;
    j["system_id"]   = r.system_id;
    j["states"]      = labels;
    j["commuting"]   = r.commuting;
    j["ellis_size"]  = tri_state(r.ellis_size, capped);
    j["kernel_size"] = tri_state(r.kernel_size, capped);
    j["zero"]        = r.zero ? to_json(*r.zero, labels) : Json(nullptr);
    j["zero_rank"]   = r.zero_rank ? Json(*r.zero_rank) : Json(nullptr);
    j["unique_ergodic"]         = to_json(r.unique_ergodic);
    j["norm_mean_ergodic"]      = to_json(r.norm_mean_ergodic);
    j["weak_star_mean_ergodic"] = to_json(r.weak_star_mean_ergodic);
    j["minimal_sets"]           = state_sets(r.minimal_sets, labels);
    j["transitive"] = r.transitive ? Json{{"witness", labels[*r.transitive]}}
                                   : Json(nullptr);
    j["invariant_measure"] = r.invariant_measure
                                 ? to_json(*r.invariant_measure, labels)
                                 : Json(nullptr);
    j["invariant_measure_count"] = r.invariant_measure_count;
    j["separation"]              = r.separation;
    j["decomposition"] = Json{{"dim_fix", r.decomposition.dim_fix},
                              {"dim_range_span", r.decomposition.dim_range_span},
                              {"direct_sum", r.decomposition.direct_sum}};
    j["orbits_unique_minimal"] = r.orbits_unique_minimal;
    j["notes"]                 = r.notes;
    return j;
  }

  inline Json ellis_json(TransSemigroup const& e, FiniteSystem const& sys) {
    Json elems = Json::array();
    for (auto const& t : e.elements()) {
      elems.push_back(to_json(t, sys.labels()));
    }
    return Json{{"size", e.size()},
                {"contains_identity", e.contains_identity()},
                {"generator_indices", e.generator_indices()},
                {"elements", elems}};
  }

  inline Json kernel_json(TransSemigroup const& e, FiniteSystem const& sys) {
    auto ker = kernel(e);
    Json elems = Json::array();
    for (auto i : ker) {
      elems.push_back(to_json(e.at(i), sys.labels()));
    }
    auto z = zero(e);
    return Json{{"ellis_size", e.size()},
                {"kernel", ker},
                {"elements", elems},
                {"right_zeros", right_zeros(e)},
                {"zero", z ? Json(*z) : Json(nullptr)}};
  }

  inline Json measures_json(std::vector<Measure> const& ms, FiniteSystem const& sys) {
    Json out = Json::array();
    for (auto const& m : ms) {
      out.push_back(to_json(m, sys.labels()));
    }
    return Json{{"count", ms.size()}, {"measures", out}};
  }

  inline char const* to_string(SubshiftVerdict v) {
    switch (v) {
      case SubshiftVerdict::not_weak_star_mean_ergodic:
        return "not_weak_star_mean_ergodic";
      case SubshiftVerdict::consistent:
        return "consistent";
      default:
        return "undetermined";
    }
  }

  inline Json to_json(SubshiftReport const& r) {
    Json cands = Json::array();
    for (auto const& c : r.candidates) {
      cands.push_back(Json{{"root", c.root}, {"windows", c.windows}});
    }
    return Json{{"window", r.window},
                {"horizon", r.horizon},
                {"window_count", r.window_count},
                {"fixed_windows", r.fixed_windows},
                {"minimal_candidates", cands},
                {"candidates_disjoint", r.candidates_disjoint},
                {"verdict", to_string(r.verdict)},
                {"verdict_text", r.verdict_text},
                {"notes", r.notes}};
  }

  inline Json to_json(WeakStarReport const& r) {
    Json trace = Json::array();
    for (auto const& p : r.trace) {
      trace.push_back(Json{{"n", p.n},
                           {"raw_distance", format_double(p.raw_distance)},
                           {"cesaro_distance", format_double(p.cesaro_distance)}});
    }
    auto opt = [](std::optional<std::uint64_t> const& v) {
      return v ? Json(*v) : Json(nullptr);
    };
    return Json{{"verified", r.verified},
                {"n_raw", opt(r.n_raw)},
                {"n_cesaro", opt(r.n_cesaro)},
                {"raw_distance", format_double(r.raw_distance)},
                {"cesaro_distance", format_double(r.cesaro_distance)},
                {"mutual_distance", format_double(r.mutual_distance)},
                {"limit_mass", format_double(r.limit_mass)},
                {"trace", trace}};
  }

}  // namespace ergoscope
