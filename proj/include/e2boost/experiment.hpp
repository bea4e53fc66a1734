#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "e2boost/baselines.hpp"
#include "e2boost/bandit/e2boost_player.hpp"
#include "e2boost/netmodel.hpp"
#include "e2boost/simengine.hpp"
#include "json.hpp"

namespace e2boost {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kAggregateHeader = "time,mean_throughput,stderr,pseudo_regret";
inline constexpr const char* kCompareHeader = "policy,time,mean_throughput,pseudo_regret";

struct ExperimentSpec {
  std::string scenario;  // YAML path; empty selects the built-in fixed layout
  std::vector<std::string> policies;
  int epochs = 10;
  std::int64_t horizon = 0;  // 0: derived from the epoch schedule
  int repetitions = 1;
  std::uint64_t seed = 1;
  std::string out_dir;
  std::uint64_t oracle_trials = 100000;
  std::uint64_t oracle_seed = 1;
  std::string cache_dir;  // empty: no oracle cache
  std::optional<PhaseShiftSetting> phase;
  std::optional<double> rician_factor;
  std::optional<int> devices;  // resample this many device positions (fixed for the run)
  bool random_scenario = false;
  bool full_channel = false;
  bool trace = false;
  int jobs = 1;
  std::int64_t stride = 100;
  E2BoostConfig e2boost;
  QLearningConfig qlearning;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

nlohmann::json spec_to_json(const ExperimentSpec& spec);
/// Throws ConfigError naming the offending field.
ExperimentSpec spec_from_json(const nlohmann::json& j);

/// Checks ranges and that referenced files exist; throws ConfigError.
void validate_spec(const ExperimentSpec& spec);

/// Loads the scenario and applies the spec's overrides (phase mode, Rician factor, device count).
Scenario prepare_scenario(const ExperimentSpec& spec);

struct PolicyRun {
  std::string policy;
  std::filesystem::path csv;
  MonteCarloResult result;
};

struct RunArtifacts {
  std::vector<PolicyRun> runs;
  std::filesystem::path summary;
  double optimal_value = 0.0;
};

/// Estimates (or loads) the success table and writes it to `out`, which may be
/// a directory (cache naming) or a file path. Returns the written file.
std::filesystem::path cmd_oracle(const std::string& scenario_path, std::uint64_t trials, std::uint64_t seed,
                                 const std::filesystem::path& out, const std::optional<PhaseShiftSetting>& phase);

RunArtifacts cmd_run(const ExperimentSpec& spec);

/// Merges aggregate CSVs (files, or run directories holding summary.json) into
/// one long table. Throws ConfigError when horizons differ.
std::string cmd_compare(const std::vector<std::filesystem::path>& inputs);

std::string aggregate_csv(const MonteCarloResult& r);
std::string policy_file_stem(const std::string& policy);
std::string format_number(double v);

}  // namespace e2boost
