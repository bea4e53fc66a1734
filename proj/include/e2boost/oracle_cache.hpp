#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "e2boost/channel.hpp"

namespace e2boost {

inline constexpr int kOracleCacheVersion = 1;

struct OracleCacheKey {
  std::uint64_t scenario_hash = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const OracleCacheKey&, const OracleCacheKey&) = default;
};

/// `oracle-<hash>-<trials>-<seed>.json`
std::filesystem::path oracle_cache_file(const std::filesystem::path& dir, const OracleCacheKey& key);

void save_oracle(const std::filesystem::path& path, const SuccessProbTable& table, const OracleCacheKey& key);

/// Returns nullopt when the file is missing, unreadable, from another version, or keyed differently.
std::optional<SuccessProbTable> load_oracle(const std::filesystem::path& path, const OracleCacheKey& key);

/// Reads the table from `dir` when a matching cache file exists, otherwise estimates and writes it.
/// An empty `dir` disables caching.
SuccessProbTable load_or_build_oracle(const Scenario& s, std::uint64_t trials, std::uint64_t seed,
                                      const std::filesystem::path& dir);

}  // namespace e2boost
