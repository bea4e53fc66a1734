#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "e2boost/netmodel.hpp"
#include "json.hpp"

namespace e2boost {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loads a YAML scenario file. Positions are meters, powers dBm, carrier GHz,
/// bandwidth MHz, shadow sigma dB; everything is converted to SI linear units.
/// Throws ConfigError (message carries the path) on I/O, parse or validation failure.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& yaml_text, const std::string& origin = "<string>");

/// Canonical JSON form (SI units, no element grids); used for cache keys and echoes.
nlohmann::json scenario_to_json(const Scenario& s);

/// FNV-1a 64 of the canonical JSON.
std::uint64_t scenario_hash(const Scenario& s);
std::string hex64(std::uint64_t v);

double dbm_to_watts(double dbm);

}  // namespace e2boost
