#include <catch_amalgamated.hpp>

#include <filesystem>

#include "ergoscope/io.hpp"
#include "fixtures.hpp"

using namespace ergoscope;

namespace {

  std::string const kCyclic = R"({
  "id": "z3",
  "states": ["a", "b", "c"],
  "generators": [ { "name": "rot", "map": { "a": "b", "b": "c", "c": "a" } } ]
})";

  std::string message_of(std::string const& text) {
    try {
      parse_descriptor(text);
    } catch (InvalidInput const& e) {
      return e.what();
    }
    return {};
  }

}  // namespace

TEST_CASE("finite descriptors", "[io]") {
  auto d = parse_descriptor(kCyclic);
  CHECK(d.id == "z3");
  auto const& sys = std::get<FiniteSystem>(d.body);
  CHECK(sys.size() == 3);
  CHECK(sys.labels() == std::vector<std::string>{"a", "b", "c"});
  CHECK(sys.generators()[0].name == "rot");
  CHECK(sys.generators()[0].map == fixtures::t({1, 2, 0}));
}

TEST_CASE("descriptor errors", "[io]") {
  CHECK(message_of("{\n  \"states\": [\"a\",\n  ]\n}") == "malformed JSON at line 3, column 3");
  CHECK(message_of("[1, 2]") == "descriptor must be a JSON object");
  CHECK(message_of(R"({"states": ["a"], "generators": [{"name": "g", "map": {}}]})")
        == "generator 'g' is not defined on 'a'");
  CHECK(message_of(R"({"states": ["a"], "generators": [{"name": "g", "map": {"a": "z"}}]})")
        == "generator 'g' maps to unknown state 'z'");
  CHECK(message_of(R"({"generators": []})") == "system: missing \"states\"");
  CHECK_FALSE(message_of(R"({"states": ["a", "a"], "generators": []})").empty());
  CHECK(message_of(R"({"subshift": {"generator": "explicit", "bits": "01", "window": 3}})")
        == "subshift: need 1 <= window <= horizon");
  CHECK(message_of(R"({"grid": {"multiples_of_pi": 0, "subdivisions": 3}})")
        == "grid: sizes must be positive");
}

TEST_CASE("subshift and grid descriptors", "[io]") {
  auto rol = parse_descriptor(
      R"({"id": "r", "subshift": {"generator": "rolandex", "window": 7, "horizon": 113}})");
  auto const& s = std::get<SubshiftDescriptor>(rol.body);
  CHECK(s.window == 7);
  CHECK(s.word().length() == 113);

  auto ex = parse_descriptor(
      R"({"subshift": {"generator": "explicit", "bits": "010011", "window": 2, "horizon": 4}})");
  CHECK(std::get<SubshiftDescriptor>(ex.body).word().capped_bits(10) == "0100");

  auto grid = parse_descriptor(R"({"grid": {"multiples_of_pi": 3, "subdivisions": 7}})");
  CHECK(std::get<GridDescriptor>(grid.body).subdivisions == 7);
}

TEST_CASE("classification report JSON", "[io]") {
  auto const sys = std::get<FiniteSystem>(parse_descriptor(kCyclic).body);
  Budget      b;
  b.parallel = false;
  auto j     = to_json(classify(sys, b, "z3"), sys);
  CHECK(j["system_id"] == "z3");
  CHECK(j["ellis_size"]["value"] == 3);
  CHECK(j["unique_ergodic"]["status"] == "determined");
  CHECK(j["unique_ergodic"]["value"] == true);
  CHECK(j["invariant_measure"]["weights"]["a"] == "1/3");
  CHECK(j["zero"]["matrix"][0][0] == "1/3");
  CHECK(j["zero_rank"] == 1);
  CHECK(j["transitive"]["witness"] == "a");

  auto u = to_json(Verdict::undetermined("cap"));
  CHECK(u["status"] == "undetermined");
  CHECK(u["reason"] == "cap");
}

TEST_CASE("report JSON is stable across runs", "[io]") {
  auto const sys = std::get<FiniteSystem>(parse_descriptor(kCyclic).body);
  CHECK(dump(to_json(classify(sys), sys)) == dump(to_json(classify(sys), sys)));
}

TEST_CASE("atomic writes", "[io]") {
  auto dir = std::filesystem::temp_directory_path() / "ergoscope_io_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "out.json";
  write_atomically(path, "first\n");
  write_atomically(path, "second\n");
  CHECK(read_file(path) == "second\n");
  CHECK_FALSE(std::filesystem::exists(dir / "out.json.tmp"));
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(read_file(dir / "missing.json"), InvalidInput);
}
