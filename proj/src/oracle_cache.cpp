#include "e2boost/oracle_cache.hpp"

#include <fstream>

#include "e2boost/scenario_io.hpp"
#include "json.hpp"

namespace e2boost {

std::filesystem::path oracle_cache_file(const std::filesystem::path& dir, const OracleCacheKey& key) {
  return dir / ("oracle-" + hex64(key.scenario_hash) + "-" + std::to_string(key.trials) + "-" +
                std::to_string(key.seed) + ".json");
}

void save_oracle(const std::filesystem::path& path, const SuccessProbTable& t, const OracleCacheKey& key) {
  nlohmann::json j;
  j["format"] = "e2boost-oracle";
  j["version"] = kOracleCacheVersion;
  j["scenario_hash"] = hex64(key.scenario_hash);
  j["trials"] = key.trials;
  j["seed"] = key.seed;
  j["devices"] = t.devices;
  j["riss"] = t.riss;
  j["sfs"] = t.sfs;
  j["ris_assisted"] = t.ris_assisted;
  j["direct"] = t.direct;
  j["raw_ris_assisted"] = t.raw_ris_assisted;
  j["raw_direct"] = t.raw_direct;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write oracle cache");
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::optional<SuccessProbTable> load_oracle(const std::filesystem::path& path, const OracleCacheKey& key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format") != "e2boost-oracle" || j.at("version") != kOracleCacheVersion) return std::nullopt;
    if (j.at("scenario_hash") != hex64(key.scenario_hash) || j.at("trials") != key.trials ||
        j.at("seed") != key.seed)
      return std::nullopt;
    SuccessProbTable t;
    t.devices = j.at("devices");
    t.riss = j.at("riss");
    t.sfs = j.at("sfs");
    t.sample_count = key.trials;
    t.ris_assisted = j.at("ris_assisted").get<std::vector<double>>();
    t.direct = j.at("direct").get<std::vector<double>>();
    t.raw_ris_assisted = j.at("raw_ris_assisted").get<std::vector<double>>();
    t.raw_direct = j.at("raw_direct").get<std::vector<double>>();
    const auto n = static_cast<std::size_t>(t.devices), k = static_cast<std::size_t>(t.riss),
               m = static_cast<std::size_t>(t.sfs);
    if (t.ris_assisted.size() != n * k * m || t.raw_ris_assisted.size() != n * k * m || t.direct.size() != n * m ||
        t.raw_direct.size() != n * m)
      return std::nullopt;
    return t;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

SuccessProbTable load_or_build_oracle(const Scenario& s, std::uint64_t trials, std::uint64_t seed,
                                      const std::filesystem::path& dir) {
  const OracleCacheKey key{scenario_hash(s), trials, seed};
  if (!dir.empty()) {
    if (auto cached = load_oracle(oracle_cache_file(dir, key), key)) return *cached;
  }
  auto table = estimate_success_probs(s, trials, seed);
  if (!dir.empty()) save_oracle(oracle_cache_file(dir, key), table, key);
  return table;
}

}  // namespace e2boost
