#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "e2boost/oracle_cache.hpp"
#include "e2boost/scenario_io.hpp"

using namespace e2boost;
namespace fs = std::filesystem;

namespace {

std::string fixture_text() {
  std::ifstream in(std::string(E2BOOST_SCENARIO_DIR) + "/fig3.scenario");
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

fs::path temp_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("e2boost_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("shipped scenario file equals the built-in layout") {
  const auto file = load_scenario(std::string(E2BOOST_SCENARIO_DIR) + "/fig3.scenario");
  const auto builtin = fig3_scenario();
  CHECK(scenario_to_json(file) == scenario_to_json(builtin));
  CHECK(scenario_hash(file) == scenario_hash(builtin));
  CHECK(file.riss[2].elements == builtin.riss[2].elements);
  CHECK(file.radio.noise_plus_interference() == doctest::Approx(1e-12 * std::pow(10, 0.5)).epsilon(1e-9));
}

TEST_CASE("parse errors carry the origin and field path") {
  const auto text = fixture_text();
  SUBCASE("bad activity probability") {
    try {
      parse_scenario(replace(text, "active_prob: 0.2", "active_prob: 1.3"), "x.scenario");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("x.scenario") != std::string::npos);
      CHECK(msg.find("ris_active_prob") != std::string::npos);
    }
  }
  SUBCASE("thresholds not descending") {
    CHECK_THROWS_AS(parse_scenario(replace(text, "[4500, 4000", "[4000, 4500"), "t"), ConfigError);
  }
  SUBCASE("malformed YAML") { CHECK_THROWS_AS(parse_scenario("bs: [1, 2", "t"), ConfigError); }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_scenario("/nonexistent/none.scenario"), ConfigError); }
  SUBCASE("unknown phase mode") {
    CHECK_THROWS_AS(parse_scenario(replace(text, "phase_shift: optimal", "phase_shift: sideways"), "t"), ConfigError);
  }
}

TEST_CASE("per-RIS activity list and constant phase") {
  auto text = replace(fixture_text(), "active_prob: 0.2", "active_prob: [0.1, 0.2, 0.3]");
  text = replace(text, "phase_shift: optimal", "phase_shift: constant:170");
  const auto s = parse_scenario(text);
  CHECK(s.ris_active_prob == std::vector<double>{0.1, 0.2, 0.3});
  CHECK(s.phase.mode == PhaseMode::Constant);
  CHECK(s.phase.rho == 170);
  CHECK(scenario_hash(s) != scenario_hash(fig3_scenario()));
}

TEST_CASE("oracle cache round trip") {
  const auto dir = temp_dir("oracle");
  const auto s = fig3_scenario();
  const auto t = load_or_build_oracle(s, 3000, 5, dir);
  const OracleCacheKey key{scenario_hash(s), 3000, 5};
  const auto file = oracle_cache_file(dir, key);
  REQUIRE(fs::exists(file));
  const auto loaded = load_oracle(file, key);
  REQUIRE(loaded.has_value());
  CHECK(loaded->ris_assisted == t.ris_assisted);
  CHECK(loaded->raw_direct == t.raw_direct);
  CHECK_FALSE(load_oracle(file, {key.scenario_hash, 3001, 5}).has_value());
  CHECK_FALSE(load_oracle(dir / "missing.json", key).has_value());

  // a second build with the same key writes an identical file
  std::ifstream a(file, std::ios::binary);
  const std::string first{std::istreambuf_iterator<char>(a), {}};
  fs::remove(file);
  load_or_build_oracle(s, 3000, 5, dir);
  std::ifstream b(file, std::ios::binary);
  const std::string second{std::istreambuf_iterator<char>(b), {}};
  CHECK(first == second);
  fs::remove_all(dir);
}
