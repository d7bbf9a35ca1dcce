// ergoscope command-line front end.
//
// Exit codes: 0 determinate result, 1 input error, 2 internal invariant
// failure, 3 undetermined.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ergoscope/envelope.hpp"
#include "ergoscope/grid.hpp"
#include "ergoscope/io.hpp"
#include "ergoscope/koopman.hpp"
#include "ergoscope/nets.hpp"
#include "ergoscope/subshift.hpp"

namespace fs = std::filesystem;
using namespace ergoscope;

namespace {

  constexpr int kOk           = 0;
  constexpr int kInputError   = 1;
  constexpr int kInternal     = 2;
  constexpr int kUndetermined = 3;

  struct Common {
    std::string              input;
    std::optional<std::size_t> budget;
    std::string              tol;  // empty: 1e-9 exact, 1e-6 grid
    std::string              json_out;
  };

  std::size_t element_cap(Common const& c) {
    if (c.budget) {
      return *c.budget;
    }
    if (char const* env = std::getenv("ERGOSCOPE_MAX_ELEMENTS")) {
      try {
        std::size_t pos = 0;
        auto        v   = std::stoull(env, &pos);
        if (pos == std::string(env).size() && v > 0) {
          return static_cast<std::size_t>(v);
        }
      } catch (std::exception const&) {
      }
      throw InvalidInput("ERGOSCOPE_MAX_ELEMENTS must be a positive integer");
    }
    return kDefaultElementCap;
  }

  void emit(std::string const& path, std::string const& content) {
    if (path.empty()) {
      std::cout << content;
    } else {
      write_atomically(path, content);
    }
  }

  Descriptor load(Common const& c) {
    return parse_descriptor(read_file(c.input));
  }

  FiniteSystem const& finite(Descriptor const& d, char const* cmd) {
    if (auto const* sys = std::get_if<FiniteSystem>(&d.body)) {
      return *sys;
    }
    throw InvalidInput(std::string(cmd) + " needs a finite system descriptor");
  }

  Json subshift_json(Descriptor const& d, SubshiftDescriptor const& s,
                     SubshiftReport const& rep) {
    Json j = to_json(rep);
    j["system_id"] = d.id;
    j["generator"] = s.generator;
    return j;
  }

  int cmd_classify(Common const& c) {
    auto d = load(c);
    if (auto const* s = std::get_if<SubshiftDescriptor>(&d.body)) {
      auto rep = classify_subshift(s->word(), s->window, s->horizon);
      emit(c.json_out, dump(subshift_json(d, *s, rep)));
      return rep.verdict == SubshiftVerdict::not_weak_star_mean_ergodic
                 ? kOk
                 : kUndetermined;
    }
    if (auto const* g = std::get_if<GridDescriptor>(&d.body)) {
      GridModel model(g->multiples_of_pi, g->subdivisions);
      auto      rep = weak_star_limit_check(model, model.uniform(),
                                            std::stod(c.tol.empty() ? "1e-6" : c.tol));
      Json      j   = to_json(rep);
      j["system_id"] = d.id;
      emit(c.json_out, dump(j));
      return rep.verified ? kOk : kUndetermined;
    }
    auto const& sys = finite(d, "classify");
    Budget      budget;
    budget.max_elements = element_cap(c);
    auto rep = classify(sys, budget, d.id);
    emit(c.json_out, dump(to_json(rep, sys)));
    return rep.any_undetermined() ? kUndetermined : kOk;
  }

  template <typename F>
  int with_ellis(Common const& c, char const* cmd, F&& render) {
    auto        d   = load(c);
    auto const& sys = finite(d, cmd);
    try {
      auto e = ellis(sys, element_cap(c));
      emit(c.json_out, dump(render(e, sys)));
      return kOk;
    } catch (SizeLimitError const& err) {
      Json j{{"status", "undetermined"},
             {"reason", std::string("size cap: ") + err.what()},
             {"cap", err.cap()}};
      emit(c.json_out, dump(j));
      return kUndetermined;
    }
  }

  std::vector<std::size_t> parse_sizes(std::string const& list) {
    std::vector<std::size_t> out;
    std::stringstream        ss(list);
    std::string              item;
    while (std::getline(ss, item, ',')) {
      std::size_t pos = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(item, &pos);
      } catch (std::exception const&) {
        pos = 0;
      }
      if (pos != item.size() || item.empty() || v == 0) {
        throw InvalidInput("expected a comma-separated list of positive "
                           "integers, got '" + list + "'");
      }
      out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) {
      throw InvalidInput("empty list");
    }
    return out;
  }

  struct TraceOpts {
    std::string net       = "cesaro";
    std::string ns        = "10,20,40,80";
    std::string rs        = "2,4,8,16";
    std::string side      = "left";
    std::size_t generator = 0;
    std::size_t window    = 3;
    std::string csv_out;
  };

  int cmd_trace(Common const& c, TraceOpts const& t) {
    auto d = load(c);
    std::ostringstream csv;
    if (auto const* s = std::get_if<SubshiftDescriptor>(&d.body)) {
      auto                       sizes = parse_sizes(t.ns);
      std::vector<std::uint64_t> ns(sizes.begin(), sizes.end());
      auto values = cesaro_trace(s->word(), CylinderFunctional::first_coordinate(), ns);
      write_cesaro_trace_csv(csv, ns, values);
      emit(t.csv_out, csv.str());
      return kOk;
    }
    if (auto const* g = std::get_if<GridDescriptor>(&d.body)) {
      GridModel model(g->multiples_of_pi, g->subdivisions);
      auto      sizes = parse_sizes(t.ns);
      auto      it    = iterate_adjoint(model, model.uniform(),
                                        *std::max_element(sizes.begin(), sizes.end()));
      write_grid_trace_csv(csv, it);
      emit(t.csv_out, csv.str());
      return kOk;
    }
    auto const& sys  = finite(d, "trace");
    auto        gens = koopman_generators(sys);
    std::vector<std::string> names;
    for (auto const& g : sys.generators()) {
      names.push_back(g.name);
    }
    Side side = t.side == "right" ? Side::right
                : t.side == "two_sided" ? Side::two_sided
                                        : Side::left;
    Rational  tol = parse_rational(c.tol.empty() ? "1e-9" : c.tol);
    NetSample net;
    if (t.net == "folner") {
      net = folner_net(gens, parse_sizes(t.ns), names);
    } else {
      if (t.generator >= gens.size()) {
        throw InvalidInput("--generator out of range");
      }
      auto const& m    = gens[t.generator];
      auto const& name = names[t.generator];
      if (t.net == "abel") {
        std::vector<Rational> rs;
        std::stringstream     ss(t.rs);
        for (std::string item; std::getline(ss, item, ',');) {
          rs.push_back(parse_rational(item));
        }
        net = abel_net(m, rs, tol, name);
      } else {
        net = cesaro_net(m, parse_sizes(t.ns), name);
      }
    }
    auto rep = verify_net(net, gens, side, tol, t.window);
    write_trace_csv(csv, rep, names);
    emit(t.csv_out, csv.str());
    std::cerr << "verdict: " << to_string(rep.verdict) << '\n';
    return rep.verdict == NetVerdict::undetermined ? kUndetermined : kOk;
  }

  struct ReproduceOpts {
    std::string                  name;
    std::optional<std::uint64_t> horizon;
    std::size_t                  window = 7;
    std::string                  out_dir = ".";
  };

  int reproduce_rolandex(ReproduceOpts const& r) {
    std::uint64_t const horizon = r.horizon.value_or(k_closed(8));
    if (r.window == 0 || r.window > horizon) {
      throw InvalidInput("need 1 <= window <= horizon");
    }
    auto word = rolandex_prefix(horizon);
    auto rep  = classify_subshift(word, r.window, horizon);

    std::vector<std::uint64_t> ns;
    for (unsigned big_n = 2; big_n <= 15 && k_closed(big_n) <= horizon; ++big_n) {
      ns.push_back(k_closed(big_n));
    }
    if (ns.empty() || ns.back() != horizon) {
      ns.push_back(horizon);
    }
    auto values = cesaro_trace(word, CylinderFunctional::first_coordinate(), ns);

    Json j = to_json(rep);
    j["system_id"]   = "rolandex";
    j["ones_count"]  = word.count_ones();
    Json trace       = Json::array();
    for (std::size_t i = 0; i < ns.size(); ++i) {
      trace.push_back(Json{{"N", ns[i]}, {"value", to_fraction_string(values[i])}});
    }
    j["cesaro_first_coordinate"] = trace;

    fs::create_directories(r.out_dir);
    write_atomically(fs::path(r.out_dir) / "rolandex_report.json", dump(j));
    std::ostringstream csv;
    write_cesaro_trace_csv(csv, ns, values);
    write_atomically(fs::path(r.out_dir) / "rolandex_trace.csv", csv.str());

    std::cout << rep.verdict_text << "; fixed windows:";
    for (auto const& w : rep.fixed_windows) {
      std::cout << ' ' << w;
    }
    std::cout << '\n';
    bool ok = rep.verdict == SubshiftVerdict::not_weak_star_mean_ergodic
              && rep.fixed_windows.size() == 2;
    return ok ? kOk : kUndetermined;
  }

  int reproduce_coscos(ReproduceOpts const& r, double tol) {
    GridModel           model(2, 100);
    std::size_t const   steps = 100'000;
    auto const          mu    = model.uniform();
    auto                it    = iterate_adjoint(model, mu, steps);
    auto                proj  = pi_projection(model, mu);
    double const        dist  = l1_distance(it.measure, proj);
    auto                check = weak_star_limit_check(model, mu, tol);

    Json j = to_json(check);
    j["system_id"]          = "coscos";
    j["multiples_of_pi"]    = model.multiples_of_pi();
    j["subdivisions"]       = model.subdivisions();
    j["steps"]              = steps;
    j["l1_distance_at_steps"] = format_double(dist);
    j["contraction"]        = format_double(model.contraction());

    fs::create_directories(r.out_dir);
    write_atomically(fs::path(r.out_dir) / "coscos_report.json", dump(j));
    std::ostringstream csv;
    write_grid_trace_csv(csv, it, 1000);
    write_atomically(fs::path(r.out_dir) / "coscos_trace.csv", csv.str());

    std::cout << "l1 distance after " << steps << " steps: " << format_double(dist)
              << (check.verified ? "; weak* limit verified" : "; weak* limit unverified")
              << '\n';
    return dist <= tol && check.verified ? kOk : kUndetermined;
  }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enveloping semigroups and mean ergodicity of finite systems"};
  app.require_subcommand(1);

  Common common;
  auto   add_common = [&](CLI::App* sub, bool tol) {
    sub->add_option("input", common.input, "System descriptor (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--budget", common.budget, "Element cap for closures");
    sub->add_option("--json-out", common.json_out, "Write JSON here instead of stdout");
    if (tol) {
      sub->add_option("--tol", common.tol,
                      "Tolerance (default 1e-9, grid models 1e-6)");
    }
  };

  auto* classify_cmd = app.add_subcommand("classify", "Classify a system");
  add_common(classify_cmd, true);
  auto* ellis_cmd = app.add_subcommand("ellis", "List the Ellis semigroup");
  add_common(ellis_cmd, false);
  auto* kernel_cmd = app.add_subcommand("kernel", "Kernel of the Ellis semigroup");
  add_common(kernel_cmd, false);
  auto* measures_cmd
      = app.add_subcommand("invariant-measures", "Extreme invariant measures");
  add_common(measures_cmd, false);

  TraceOpts trace_opts;
  auto*     trace_cmd = app.add_subcommand("trace", "Defect trace of an ergodic net");
  add_common(trace_cmd, true);
  trace_cmd->add_option("--net", trace_opts.net)
      ->check(CLI::IsMember({"cesaro", "abel", "folner"}))
      ->capture_default_str();
  trace_cmd->add_option("--N", trace_opts.ns, "Comma-separated sample sizes")
      ->capture_default_str();
  trace_cmd->add_option("--r", trace_opts.rs, "Comma-separated Abel parameters")
      ->capture_default_str();
  trace_cmd->add_option("--side", trace_opts.side)
      ->check(CLI::IsMember({"left", "right", "two_sided"}))
      ->capture_default_str();
  trace_cmd->add_option("--generator", trace_opts.generator,
                        "Generator index for single-operator nets")
      ->capture_default_str();
  trace_cmd->add_option("--window", trace_opts.window)->capture_default_str();
  trace_cmd->add_option("--csv-out", trace_opts.csv_out);

  ReproduceOpts repro;
  std::string   repro_tol = "1e-6";
  auto* repro_cmd = app.add_subcommand("reproduce", "Run a shipped example pipeline");
  repro_cmd->add_option("name", repro.name, "rolandex or coscos")->required();
  repro_cmd->add_option("--horizon", repro.horizon, "Prefix length (rolandex)");
  repro_cmd->add_option("--window", repro.window, "Window length (rolandex)")
      ->capture_default_str();
  repro_cmd->add_option("--out-dir", repro.out_dir)->capture_default_str();
  repro_cmd->add_option("--tol", repro_tol, "Tolerance (coscos)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*classify_cmd) {
      return cmd_classify(common);
    }
    if (*ellis_cmd) {
      return with_ellis(common, "ellis", ellis_json);
    }
    if (*kernel_cmd) {
      return with_ellis(common, "kernel", kernel_json);
    }
    if (*measures_cmd) {
      auto        d   = load(common);
      auto const& sys = finite(d, "invariant-measures");
      emit(common.json_out, dump(measures_json(invariant_measures(sys), sys)));
      return kOk;
    }
    if (*trace_cmd) {
      return cmd_trace(common, trace_opts);
    }
    if (repro.name == "rolandex") {
      return reproduce_rolandex(repro);
    }
    if (repro.name == "coscos") {
      return reproduce_coscos(repro, std::stod(repro_tol));
    }
    std::cerr << "error: unknown pipeline '" << repro.name << "'\n";
    return kInputError;
  } catch (InvalidInput const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (PreconditionError const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (SizeLimitError const& e) {
    std::cerr << "undetermined: " << e.what() << '\n';
    return kUndetermined;
  } catch (InvariantViolation const& e) {
    std::cerr << "internal invariant failed: " << e.what() << '\n';
    return kInternal;
  } catch (std::invalid_argument const& e) {
    std::cerr << "error: bad number: " << e.what() << '\n';
    return kInputError;
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}
