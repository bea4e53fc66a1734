// e2boost: oracle estimation, Monte Carlo runs and run comparison.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"
#include "e2boost/experiment.hpp"
#include "e2boost/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace e2boost;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string default_out_dir() {
  if (const char* env = std::getenv("E2BOOST_OUT"); env && *env) return env;
  return "out";
}

double parse_rician(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size() || !(v >= 0)) throw ConfigError("--rician-factor: expected a number >= 0 or 'inf'");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS selection and spreading-factor learning simulator"};
  app.require_subcommand(1);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Estimate per-arm success probabilities and write the cache file");
  std::string o_scenario;
  std::uint64_t o_trials = 100000, o_seed = 1;
  std::string o_out;
  std::string o_phase;
  oracle->add_option("--scenario", o_scenario, "Scenario YAML (default: built-in fixed layout)");
  oracle->add_option("--oracle-trials,--trials", o_trials, "Channel draws per link")->capture_default_str();
  oracle->add_option("--seed", o_seed, "Estimation seed")->capture_default_str();
  oracle->add_option("--out", o_out, "Output file or directory (default: $E2BOOST_OUT or ./out)");
  oracle->add_option("--phase-mode", o_phase, "optimal | constant:<rho>");

  // run
  auto* run = app.add_subcommand("run", "Monte Carlo comparison of policies");
  ExperimentSpec spec;
  std::string r_phase, r_rician, r_config;
  int r_devices = 0;
  run->add_option("--config", r_config, "Experiment JSON (flags given on the command line override it)");
  run->add_option("--scenario", spec.scenario, "Scenario YAML (default: built-in fixed layout)");
  run->add_option("--policy", spec.policies,
                  "e2boost | e2boost-no-ts | e2boost-fixed-eps:<v> | got | qlearning | random | optimal (repeatable)");
  run->add_option("--epochs", spec.epochs, "Epochs of the three-phase schedule")->capture_default_str();
  run->add_option("--horizon", spec.horizon, "Slots (default: the slots of --epochs epochs)");
  run->add_option("--reps", spec.repetitions, "Monte Carlo repetitions")->capture_default_str();
  run->add_option("--seed", spec.seed, "Master seed")->capture_default_str();
  run->add_option("--out", spec.out_dir, "Output directory (default: $E2BOOST_OUT or ./out)");
  run->add_option("--oracle-trials", spec.oracle_trials, "Channel draws per link for the success table")
      ->capture_default_str();
  run->add_option("--oracle-seed", spec.oracle_seed, "Seed of the success-table estimation")->capture_default_str();
  run->add_option("--cache-dir", spec.cache_dir, "Reuse/write success tables here");
  run->add_option("--phase-mode", r_phase, "optimal | constant:<rho>");
  run->add_flag("--full-channel", spec.full_channel, "Sample the channel every slot instead of the success table");
  run->add_option("--jobs", spec.jobs, "Parallel trial workers")->capture_default_str();
  run->add_option("--nu1", spec.e2boost.schedule.nu1, "Exploration phase length factor")->capture_default_str();
  run->add_option("--nu2", spec.e2boost.schedule.nu2, "Game phase length factor")->capture_default_str();
  run->add_option("--nu3", spec.e2boost.schedule.nu3, "Exploitation phase length factor")->capture_default_str();
  run->add_option("--delta", spec.e2boost.schedule.delta, "Phase growth exponent")->capture_default_str();
  run->add_option("--game-epsilon", spec.e2boost.game_epsilon, "Mood perturbation")->capture_default_str();
  run->add_option("--rician-factor", r_rician, "Override the Rician factor (number or 'inf')");
  run->add_option("--devices", r_devices, "Resample this many device positions in the device disc");
  run->add_flag("--random-scenario", spec.random_scenario, "Resample device positions for every trial");
  run->add_flag("--trace", spec.trace, "Also write the per-slot trace of trial 0");
  run->add_option("--stride", spec.stride, "Checkpoint spacing in slots")->capture_default_str();

  // compare
  auto* compare = app.add_subcommand("compare", "Merge aggregate CSVs into one long table");
  std::vector<std::string> c_inputs;
  std::string c_out;
  compare->add_option("inputs", c_inputs, "Aggregate CSVs or run directories")->required();
  compare->add_option("--out", c_out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*oracle) {
      std::optional<PhaseShiftSetting> phase;
      if (!o_phase.empty()) phase = parse_phase_mode(o_phase);
      const auto path = cmd_oracle(o_scenario, o_trials, o_seed, o_out.empty() ? default_out_dir() : o_out, phase);
      std::cout << path.string() << '\n';
    } else if (*run) {
      if (!r_config.empty()) {
        std::ifstream in(r_config);
        if (!in) throw ConfigError(r_config + ": cannot read");
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw ConfigError(r_config + ": " + e.what());
        }
        ExperimentSpec file_spec = spec_from_json(j);
        // command-line values win over the file
        for (auto* opt : run->get_options()) {
          if (opt->count() == 0) continue;
          const auto& n = opt->get_name();
          if (n == "--scenario") file_spec.scenario = spec.scenario;
          else if (n == "--policy") file_spec.policies = spec.policies;
          else if (n == "--epochs") file_spec.epochs = spec.epochs;
          else if (n == "--horizon") file_spec.horizon = spec.horizon;
          else if (n == "--reps") file_spec.repetitions = spec.repetitions;
          else if (n == "--seed") file_spec.seed = spec.seed;
          else if (n == "--out") file_spec.out_dir = spec.out_dir;
          else if (n == "--oracle-trials") file_spec.oracle_trials = spec.oracle_trials;
          else if (n == "--oracle-seed") file_spec.oracle_seed = spec.oracle_seed;
          else if (n == "--cache-dir") file_spec.cache_dir = spec.cache_dir;
          else if (n == "--full-channel") file_spec.full_channel = spec.full_channel;
          else if (n == "--jobs") file_spec.jobs = spec.jobs;
          else if (n == "--nu1") file_spec.e2boost.schedule.nu1 = spec.e2boost.schedule.nu1;
          else if (n == "--nu2") file_spec.e2boost.schedule.nu2 = spec.e2boost.schedule.nu2;
          else if (n == "--nu3") file_spec.e2boost.schedule.nu3 = spec.e2boost.schedule.nu3;
          else if (n == "--delta") file_spec.e2boost.schedule.delta = spec.e2boost.schedule.delta;
          else if (n == "--game-epsilon") file_spec.e2boost.game_epsilon = spec.e2boost.game_epsilon;
          else if (n == "--random-scenario") file_spec.random_scenario = spec.random_scenario;
          else if (n == "--trace") file_spec.trace = spec.trace;
          else if (n == "--stride") file_spec.stride = spec.stride;
        }
        spec = std::move(file_spec);
      }
      if (!r_phase.empty()) {
        try {
          spec.phase = parse_phase_mode(r_phase);
        } catch (const std::exception& e) {
          throw ConfigError(std::string("--phase-mode: ") + e.what());
        }
      }
      if (!r_rician.empty()) {
        try {
          spec.rician_factor = parse_rician(r_rician);
        } catch (const std::invalid_argument&) {
          throw ConfigError("--rician-factor: expected a number >= 0 or 'inf'");
        }
      }
      if (r_devices > 0) spec.devices = r_devices;
      if (spec.out_dir.empty()) spec.out_dir = default_out_dir();
      const auto art = cmd_run(spec);
      for (const auto& r : art.runs) {
        const auto& res = r.result;
        std::cout << r.policy << ": mean sum throughput " << format_number(res.mean_throughput.back())
                  << " Mbps (optimum " << format_number(res.optimal_value) << "), pseudo-regret "
                  << format_number(res.mean_regret.back()) << " -> " << r.csv.string() << '\n';
      }
      std::cout << "summary: " << art.summary.string() << '\n';
    } else if (*compare) {
      std::vector<fs::path> inputs(c_inputs.begin(), c_inputs.end());
      for (const auto& p : inputs)
        if (!fs::exists(p)) throw ConfigError(p.string() + ": no such file or directory");
      const auto table = cmd_compare(inputs);
      if (c_out.empty()) {
        std::cout << table;
      } else {
        std::ofstream out(c_out, std::ios::binary);
        if (!out || !(out << table)) throw std::runtime_error(c_out + ": cannot write");
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
