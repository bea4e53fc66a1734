#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "e2boost/baselines.hpp"
#include "e2boost/bandit/e2boost_player.hpp"
#include "e2boost/channel.hpp"
#include "e2boost/netmodel.hpp"
#include "e2boost/policy.hpp"

namespace e2boost {

/// Independent per-slot Bernoulli activity of every RIS.
struct OccupancyProcess {
  std::vector<double> active_prob;
  void sample(Rng& rng, std::vector<std::uint8_t>& busy) const;
};

struct PlayerOutcome {
  Action action;
  bool collision = false;  // two or more players on the same RIS
  Feedback feedback = Feedback::Failure;
  double reward = 0.0;     // Mbps
};

/// Everything a trial needs that is fixed by the scenario: the success table,
/// rates, the optimal profile and the per-arm means used for regret.
///
/// Arms of player n, in order: K*M RIS-assisted (k, m), M direct, then the
/// collision arm and the blocked arm (pattern-I attempt on a busy RIS).
struct Environment {
  Scenario scenario;
  SuccessProbTable table;
  std::vector<double> rates_mbps;
  AssignmentMatrix values;
  AssignmentResult optimum;
  double optimal_value = 0.0;  // expected sum throughput per slot, Mbps
  std::vector<int> genie_direct_sf;
  std::vector<std::vector<double>> mu;     // [n][arm]
  std::vector<std::vector<double>> delta;  // [n][arm]
  std::shared_ptr<const ChannelModel> channel;  // only for per-slot channel sampling

  int players() const { return scenario.device_count(); }
  int riss() const { return scenario.ris_count(); }
  int sfs() const { return scenario.sf_count(); }
  int arm_count() const { return riss() * sfs() + sfs() + 2; }
  int collision_arm() const { return riss() * sfs() + sfs(); }
  int blocked_arm() const { return collision_arm() + 1; }
  int arm_of(const PlayerOutcome& o) const;
};

Environment make_environment(Scenario s, SuccessProbTable table, bool with_channel = false);

/// Success-probability of a feedback-bearing transmission.
double success_probability(const Environment& env, int player, const Action& a);

/// Collisions and occupancy first, then one success draw per surviving
/// transmission in player order.
std::vector<PlayerOutcome> resolve_slot(std::span<const Action> actions, std::span<const std::uint8_t> busy,
                                        const Environment& env, bool full_channel, Rng& rng);

struct TrialSpec {
  PolicySpec policy;
  E2BoostConfig e2boost;
  QLearningConfig qlearning;
  int epochs = 10;
  std::int64_t horizon = 0;  // 0: the slots of `epochs` epochs of the schedule
  bool full_channel = false;
  std::int64_t stride = 100;  // throughput/regret checkpoint spacing

  std::int64_t resolved_horizon() const { return horizon > 0 ? horizon : e2boost.schedule.total_slots(epochs); }
};

/// Sorted checkpoint slots (1-based counts): stride multiples, epoch ends, the horizon.
std::vector<std::int64_t> checkpoints_for(const TrialSpec& spec);

struct TrialResult {
  std::vector<double> avg_throughput;  // per checkpoint: (1/t) sum_s sum_n mu
  std::vector<double> pseudo_regret;   // per checkpoint
  std::vector<std::vector<std::uint64_t>> pulls;        // [n][arm]
  std::vector<std::vector<std::uint64_t>> final_epoch_pulls;  // slots after the second-to-last epoch end
  double regret_direct = 0.0;     // sum over slots of the per-slot gaps
  double regret_from_pulls = 0.0; // sum Delta * W at the horizon
  double realized_reward = 0.0;   // Mbps summed over slots and players
  std::uint64_t full_mode_mismatch = 0;  // slots where the number of full-mode players was not min(K, N)
};

using TraceSink = std::function<void(std::int64_t slot, int player, const PlayerOutcome&)>;

std::vector<std::unique_ptr<Policy>> make_players(const Environment& env, const TrialSpec& spec, Rng& setup_rng);

TrialResult run_trial(const Environment& env, const TrialSpec& spec, std::uint64_t trial_seed,
                      const TraceSink& trace = {});

/// Pseudo-regret of a pull-count ledger: sum_n sum_i Delta[n][i] * W[n][i].
double compute_pseudo_regret(const Environment& env, const std::vector<std::vector<std::uint64_t>>& pulls);

struct MonteCarloSpec {
  TrialSpec trial;
  int repetitions = 1;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool random_scenario = false;  // resample device positions per trial
  std::uint64_t oracle_trials = 100000;
  bool want_trace = false;       // CSV rows of trial 0
};

struct TrialSummary {
  double final_throughput = 0.0;
  double final_regret = 0.0;
  double regret_direct = 0.0;
  double optimal_value = 0.0;
  std::vector<int> final_epoch_top_arm;  // per player
  std::uint64_t full_mode_mismatch = 0;
};

struct MonteCarloResult {
  std::vector<std::int64_t> checkpoints;
  std::vector<double> mean_throughput;
  std::vector<double> stderr_throughput;
  std::vector<double> mean_regret;
  std::vector<std::vector<std::uint64_t>> pulls;  // summed over trials
  std::vector<TrialSummary> trials;
  double optimal_value = 0.0;  // mean over trials (constant in fixed-scenario mode)
  std::string trace_csv;
};

/// Trials run with seeds derive_seed(seed, trial); results do not depend on `jobs`.
MonteCarloResult run_monte_carlo(const Environment& env, const MonteCarloSpec& spec);

/// Mean/stderr of per-trial series, accumulated in trial order.
void aggregate_series(const std::vector<std::vector<double>>& series, std::vector<double>& mean,
                      std::vector<double>& stderr_out);

inline constexpr const char* kTraceHeader = "slot,player,pattern,ris,sf,collision,feedback,reward";
std::string trace_row(std::int64_t slot, int player, const PlayerOutcome& o);

}  // namespace e2boost
