#include "e2boost/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "e2boost/oracle_cache.hpp"
#include "e2boost/scenario_io.hpp"

namespace fs = std::filesystem;

namespace e2boost {

namespace {

template <class T>
T field(const nlohmann::json& j, const char* key, const T& fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config.") + key + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot read");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

nlohmann::json histogram_json(const Environment& env, const std::vector<std::uint64_t>& pulls) {
  const int k_count = env.riss(), m_count = env.sfs();
  nlohmann::json ris = nlohmann::json::array();
  for (int k = 0; k < k_count; ++k) {
    std::vector<std::uint64_t> row(pulls.begin() + k * m_count, pulls.begin() + (k + 1) * m_count);
    ris.push_back(row);
  }
  std::vector<std::uint64_t> direct(pulls.begin() + k_count * m_count, pulls.begin() + (k_count + 1) * m_count);
  return {{"ris", ris},
          {"direct", direct},
          {"collision", pulls[static_cast<std::size_t>(env.collision_arm())]},
          {"blocked", pulls[static_cast<std::size_t>(env.blocked_arm())]}};
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) throw std::runtime_error("non-finite value in output");
  if (v == 0.0) v = 0.0;  // no negative zero in files
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string policy_file_stem(const std::string& policy) {
  std::string s = policy;
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_')) c = '_';
  return s;
}

nlohmann::json spec_to_json(const ExperimentSpec& s) {
  nlohmann::json j;
  j["scenario"] = s.scenario;
  j["policies"] = s.policies;
  j["epochs"] = s.epochs;
  j["horizon"] = s.horizon;
  j["repetitions"] = s.repetitions;
  j["seed"] = s.seed;
  j["out_dir"] = s.out_dir;
  j["oracle_trials"] = s.oracle_trials;
  j["oracle_seed"] = s.oracle_seed;
  j["cache_dir"] = s.cache_dir;
  j["phase_mode"] = s.phase ? nlohmann::json(to_string(*s.phase)) : nlohmann::json(nullptr);
  if (!s.rician_factor) j["rician_factor"] = nullptr;
  else if (std::isinf(*s.rician_factor)) j["rician_factor"] = "inf";
  else j["rician_factor"] = *s.rician_factor;
  j["devices"] = s.devices ? nlohmann::json(*s.devices) : nlohmann::json(nullptr);
  j["random_scenario"] = s.random_scenario;
  j["full_channel"] = s.full_channel;
  j["trace"] = s.trace;
  j["jobs"] = s.jobs;
  j["stride"] = s.stride;
  j["e2boost"] = s.e2boost;
  j["qlearning"] = {{"learning_rate", s.qlearning.learning_rate},
                    {"discount", s.qlearning.discount},
                    {"exploration", s.qlearning.exploration},
                    {"decay_slots", s.qlearning.decay_slots}};
  return j;
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected an object");
  ExperimentSpec s;
  s.scenario = field<std::string>(j, "scenario", "");
  s.policies = field<std::vector<std::string>>(j, "policies", {});
  s.epochs = field<int>(j, "epochs", s.epochs);
  s.horizon = field<std::int64_t>(j, "horizon", 0);
  s.repetitions = field<int>(j, "repetitions", s.repetitions);
  s.seed = field<std::uint64_t>(j, "seed", s.seed);
  s.out_dir = field<std::string>(j, "out_dir", "");
  s.oracle_trials = field<std::uint64_t>(j, "oracle_trials", s.oracle_trials);
  s.oracle_seed = field<std::uint64_t>(j, "oracle_seed", s.oracle_seed);
  s.cache_dir = field<std::string>(j, "cache_dir", "");
  if (j.contains("phase_mode") && !j.at("phase_mode").is_null()) {
    try {
      s.phase = parse_phase_mode(field<std::string>(j, "phase_mode", ""));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config.phase_mode: ") + e.what());
    }
  }
  if (j.contains("rician_factor") && !j.at("rician_factor").is_null()) {
    const auto& r = j.at("rician_factor");
    if (r.is_string() && r == "inf") s.rician_factor = std::numeric_limits<double>::infinity();
    else s.rician_factor = field<double>(j, "rician_factor", 0.0);
  }
  if (j.contains("devices") && !j.at("devices").is_null()) s.devices = field<int>(j, "devices", 0);
  s.random_scenario = field<bool>(j, "random_scenario", false);
  s.full_channel = field<bool>(j, "full_channel", false);
  s.trace = field<bool>(j, "trace", false);
  s.jobs = field<int>(j, "jobs", 1);
  s.stride = field<std::int64_t>(j, "stride", s.stride);
  if (j.contains("e2boost")) {
    try {
      s.e2boost = j.at("e2boost").get<E2BoostConfig>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config.e2boost: ") + e.what());
    }
  }
  if (j.contains("qlearning")) {
    const auto& q = j.at("qlearning");
    s.qlearning.learning_rate = field<double>(q, "learning_rate", s.qlearning.learning_rate);
    s.qlearning.discount = field<double>(q, "discount", s.qlearning.discount);
    s.qlearning.exploration = field<double>(q, "exploration", s.qlearning.exploration);
    s.qlearning.decay_slots = field<double>(q, "decay_slots", s.qlearning.decay_slots);
  }
  return s;
}

void validate_spec(const ExperimentSpec& s) {
  if (s.policies.empty()) throw ConfigError("config.policies: at least one policy is required");
  for (std::size_t i = 0; i < s.policies.size(); ++i) {
    try {
      parse_policy(s.policies[i]);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config.policies[" + std::to_string(i) + "]: " + e.what());
    }
  }
  if (s.epochs < 1) throw ConfigError("config.epochs: must be >= 1");
  if (s.horizon < 0) throw ConfigError("config.horizon: must be >= 0");
  if (s.repetitions < 1) throw ConfigError("config.repetitions: must be >= 1");
  if (s.oracle_trials < 1) throw ConfigError("config.oracle_trials: must be >= 1");
  if (s.jobs < 1) throw ConfigError("config.jobs: must be >= 1");
  if (s.stride < 0) throw ConfigError("config.stride: must be >= 0");
  if (s.devices && *s.devices < 1) throw ConfigError("config.devices: must be >= 1");
  if (s.rician_factor && !(*s.rician_factor >= 0.0)) throw ConfigError("config.rician_factor: must be >= 0");
  const auto& sc = s.e2boost.schedule;
  if (!(sc.nu1 > 0 && sc.nu2 > 0 && sc.nu3 > 0)) throw ConfigError("config.e2boost: nu1, nu2, nu3 must be positive");
  if (!(sc.delta >= 0)) throw ConfigError("config.e2boost.delta: must be >= 0");
  if (!(s.e2boost.game_epsilon > 0 && s.e2boost.game_epsilon < 1))
    throw ConfigError("config.e2boost.game_epsilon: must be in (0,1)");
  if (!(s.e2boost.nu > 0)) throw ConfigError("config.e2boost.nu: must be positive");
  if (!s.scenario.empty() && !fs::exists(s.scenario)) throw ConfigError("config.scenario: " + s.scenario + ": no such file");
}

Scenario prepare_scenario(const ExperimentSpec& spec) {
  Scenario s = spec.scenario.empty() ? fig3_scenario() : load_scenario(spec.scenario);
  if (spec.phase) s.phase = *spec.phase;
  if (spec.rician_factor) s.radio.rician_factor = *spec.rician_factor;
  if (spec.devices) {
    Rng rng = make_rng(spec.seed, 0xDE71CE5ULL);
    try {
      s.devices = sample_devices_in_disc(s.device_area, *spec.devices, s.min_device_distance, s.device_height, rng);
    } catch (const GeometryError& e) {
      throw ConfigError(std::string("config.devices: ") + e.what());
    }
  }
  const auto violations = validate_scenario(s);
  if (!violations.empty()) {
    std::string msg = "scenario invalid after overrides:";
    for (const auto& v : violations) msg += "\n  " + v.path + ": " + v.message;
    throw ConfigError(msg);
  }
  return s;
}

std::filesystem::path cmd_oracle(const std::string& scenario_path, std::uint64_t trials, std::uint64_t seed,
                                 const fs::path& out, const std::optional<PhaseShiftSetting>& phase) {
  if (trials < 1) throw ConfigError("--trials: must be >= 1");
  if (!scenario_path.empty() && !fs::exists(scenario_path)) throw ConfigError(scenario_path + ": no such file");
  Scenario s = scenario_path.empty() ? fig3_scenario() : load_scenario(scenario_path);
  if (phase) s.phase = *phase;
  const OracleCacheKey key{scenario_hash(s), trials, seed};
  const bool as_dir = fs::is_directory(out) || out.extension().empty();
  const fs::path path = as_dir ? oracle_cache_file(out, key) : out;
  save_oracle(path, estimate_success_probs(s, trials, seed), key);
  return path;
}

std::string aggregate_csv(const MonteCarloResult& r) {
  std::string out = kAggregateHeader;
  out += '\n';
  for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
    out += std::to_string(r.checkpoints[i]);
    out += ',' + format_number(r.mean_throughput[i]);
    out += ',' + format_number(r.stderr_throughput[i]);
    out += ',' + format_number(r.mean_regret[i]);
    out += '\n';
  }
  return out;
}

RunArtifacts cmd_run(const ExperimentSpec& spec) {
  validate_spec(spec);
  const Scenario s = prepare_scenario(spec);
  auto table = load_or_build_oracle(s, spec.oracle_trials, spec.oracle_seed, spec.cache_dir);
  const Environment env = make_environment(s, std::move(table), spec.full_channel);

  const fs::path out_dir = spec.out_dir.empty() ? fs::path("out") : fs::path(spec.out_dir);
  fs::create_directories(out_dir);

  RunArtifacts art;
  art.optimal_value = env.optimal_value;
  nlohmann::json summary;
  summary["csv_schema"] = kCsvSchemaVersion;
  summary["aggregate_columns"] = kAggregateHeader;
  summary["config"] = spec_to_json(spec);
  summary["scenario_hash"] = hex64(scenario_hash(s));
  summary["scenario"] = scenario_to_json(s);
  summary["horizon"] = TrialSpec{parse_policy(spec.policies[0]), spec.e2boost, spec.qlearning, spec.epochs,
                                 spec.horizon, spec.full_channel, spec.stride}
                           .resolved_horizon();
  summary["optimal_sum_throughput"] = env.optimal_value;
  nlohmann::json assignment = nlohmann::json::array();
  for (int n = 0; n < env.players(); ++n)
    assignment.push_back({{"ris", env.optimum.ris[static_cast<std::size_t>(n)]},
                          {"sf", env.optimum.sf[static_cast<std::size_t>(n)]},
                          {"direct_sf", env.genie_direct_sf[static_cast<std::size_t>(n)]}});
  summary["optimal_assignment"] = assignment;
  summary["policies"] = nlohmann::json::array();

  for (const auto& name : spec.policies) {
    MonteCarloSpec mc;
    mc.trial = {parse_policy(name), spec.e2boost, spec.qlearning, spec.epochs, spec.horizon, spec.full_channel, spec.stride};
    mc.repetitions = spec.repetitions;
    mc.seed = spec.seed;
    mc.jobs = spec.jobs;
    mc.random_scenario = spec.random_scenario;
    mc.oracle_trials = spec.oracle_trials;
    mc.want_trace = spec.trace;
    PolicyRun run{name, out_dir / (policy_file_stem(name) + ".csv"), run_monte_carlo(env, mc)};
    write_file(run.csv, aggregate_csv(run.result));

    nlohmann::json pj;
    pj["policy"] = name;
    pj["aggregate_csv"] = run.csv.filename().string();
    if (spec.trace) {
      const auto trace_path = out_dir / (policy_file_stem(name) + ".trace.csv");
      write_file(trace_path, run.result.trace_csv);
      pj["trace_csv"] = trace_path.filename().string();
      run.result.trace_csv.clear();
    }
    const auto& r = run.result;
    pj["final_mean_throughput"] = r.mean_throughput.empty() ? 0.0 : r.mean_throughput.back();
    pj["final_stderr"] = r.stderr_throughput.empty() ? 0.0 : r.stderr_throughput.back();
    pj["final_pseudo_regret"] = r.mean_regret.empty() ? 0.0 : r.mean_regret.back();
    pj["mean_optimal_sum_throughput"] = r.optimal_value;
    std::uint64_t mismatch = 0;
    for (const auto& t : r.trials) mismatch += t.full_mode_mismatch;
    pj["full_mode_mismatch_slots"] = mismatch;
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& p : r.pulls) hist.push_back(histogram_json(env, p));
    pj["histograms"] = hist;
    summary["policies"].push_back(pj);
    art.runs.push_back(std::move(run));
  }
  art.summary = out_dir / "summary.json";
  write_file(art.summary, summary.dump(2) + "\n");
  return art;
}

std::string cmd_compare(const std::vector<fs::path>& inputs) {
  if (inputs.empty()) throw ConfigError("compare: no inputs");
  std::vector<std::pair<std::string, fs::path>> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      nlohmann::json summary;
      try {
        summary = nlohmann::json::parse(read_file(in / "summary.json"));
        for (const auto& p : summary.at("policies"))
          files.emplace_back(p.at("policy").get<std::string>(), in / p.at("aggregate_csv").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError((in / "summary.json").string() + ": " + e.what());
      }
    } else {
      files.emplace_back(in.stem().string(), in);
    }
  }

  std::string out = kCompareHeader;
  out += '\n';
  std::optional<std::string> horizon;
  std::string horizon_source;
  for (const auto& [policy, path] : files) {
    std::istringstream is(read_file(path));
    std::string line;
    if (!std::getline(is, line) || line != kAggregateHeader)
      throw ConfigError(path.string() + ": not an aggregate CSV (header mismatch)");
    std::string last_time;
    std::string rows;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cols;
      std::stringstream ls(line);
      for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
      if (cols.size() != 4) throw ConfigError(path.string() + ": malformed row '" + line + "'");
      rows += policy + ',' + cols[0] + ',' + cols[1] + ',' + cols[3] + '\n';
      last_time = cols[0];
    }
    if (last_time.empty()) throw ConfigError(path.string() + ": no data rows");
    if (!horizon) {
      horizon = last_time;
      horizon_source = path.string();
    } else if (*horizon != last_time) {
      throw ConfigError("horizon mismatch: " + horizon_source + " ends at " + *horizon + ", " + path.string() +
                        " ends at " + last_time);
    }
    out += rows;
  }
  return out;
}

}  // namespace e2boost
