#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "e2boost/bandit/e2boost_player.hpp"
#include "e2boost/bandit/epoch_schedule.hpp"
#include "e2boost/bandit/fhistory.hpp"
#include "e2boost/bandit/game.hpp"
#include "e2boost/channel.hpp"
#include "e2boost/policy.hpp"

namespace e2boost {

// ---------------------------------------------------------------------------
// Centralised assignment

/// value[n][k*M + m]: expected reward of player n on RIS k with SF m. When
/// `direct` is non-empty, direct[n] is player n's best direct-link value and
/// any number of players may take it.
struct AssignmentMatrix {
  int players = 0;
  int riss = 0;
  int sfs = 0;
  std::vector<double> value;
  std::vector<double> direct;

  double at(int n, int k, int m) const {
    return value[(static_cast<std::size_t>(n) * riss + k) * sfs + m];
  }
};

struct AssignmentResult {
  std::vector<int> ris;  // -1: direct link
  std::vector<int> sf;   // SF on the RIS, or -1 when direct
  double total = 0.0;
};

/// Maximum-weight assignment of every row to a distinct column (rows <= cols).
/// Returns the column chosen per row.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& value);

/// Best profile with at most one player per RIS. Throws std::invalid_argument
/// when players outnumber RISs and no direct values are given.
AssignmentResult hungarian_assign(const AssignmentMatrix& m);

/// Exhaustive reference for small instances.
AssignmentResult brute_force_assign(const AssignmentMatrix& m);

/// argmax_m rates[m] * theta[m], ties to the lowest index.
int genie_optimal_sf(std::span<const double> theta, std::span<const double> rates);

/// Per-slot expected-value matrix from the success table: a player parked on
/// RIS k earns (1 - Pa_k) max_m c_m theta + Pa_k * (genie direct value).
AssignmentMatrix expected_value_matrix(const SuccessProbTable& t, std::span<const double> rates,
                                       std::span<const double> active_prob);

// ---------------------------------------------------------------------------
// Joint (RIS, SF) arm players: GoT and the E2Boost ablation without TS

struct JointArmConfig {
  EpochSchedule schedule;
  double game_epsilon = 0.01;
  double nu = 1.4;
  /// false: uniform exploration in phase 1 (GoT). true: epsilon-greedy with
  /// the Wasserstein adaptation of the exploration rate.
  bool adaptive_explore = false;
};

class JointArmPlayer final : public Policy {
 public:
  JointArmPlayer(int ris_count, std::vector<double> rates, JointArmConfig cfg);

  Action decide(std::span<const std::uint8_t> busy, Rng& rng) override;
  void observe(const Action& action, Feedback feedback, Rng& rng) override;

  int arms() const { return ris_count_ * sf_count(); }
  int sf_count() const { return static_cast<int>(rates_.size()); }
  int epoch() const { return z_; }
  EpochPhase phase() const { return phase_; }
  int best_arm() const { return best_arm_; }
  double explore_epsilon() const { return explore_eps_; }
  const GameState& game() const { return game_; }
  const FHistory& history() const { return history_; }
  const Phase1Stats& phase1() const { return stats_; }

 private:
  void advance(Rng& rng);
  Action arm_action(int j) const { return {Pattern::RisAssisted, j / sf_count(), j % sf_count()}; }
  double utility(int j) const;

  int ris_count_;
  std::vector<double> rates_;
  double rate_max_;
  JointArmConfig cfg_;

  int z_ = 1;
  EpochPhase phase_ = EpochPhase::Explore;
  std::int64_t t_in_phase_ = 0;
  double explore_eps_ = 1.0;
  int best_arm_ = 0;

  Phase1Stats stats_;    // over joint arms
  Phase1Stats direct_;   // over SFs, fed by busy fallbacks
  GameState game_;
  FHistory history_;
  std::vector<int> last_game_arm_;
  bool pending_fallback_ = false;
};

// ---------------------------------------------------------------------------
// Tabular Q-learning

struct QLearningConfig {
  double learning_rate = 0.1;
  double discount = 0.9;
  double exploration = 0.1;
  /// exploration at slot t is exploration / (1 + t / decay_slots); 0 disables decay
  double decay_slots = 10000;

  friend bool operator==(const QLearningConfig&, const QLearningConfig&) = default;
};

/// Two states: the RIS of the current greedy idle action is idle or busy.
/// Idle: actions are the K*M joint arms. Busy: actions are the M direct SFs.
class QLearningPlayer final : public Policy {
 public:
  enum State : int { Idle = 0, Busy = 1 };

  QLearningPlayer(int ris_count, std::vector<double> rates, QLearningConfig cfg = {});

  Action decide(std::span<const std::uint8_t> busy, Rng& rng) override;
  void observe(const Action& action, Feedback feedback, Rng& rng) override;

  /// q <- q + lr (reward + discount * max q[next] - q)
  void update(State s, int a, double reward, State next);
  int greedy(State s) const;
  double q(State s, int a) const { return table_[s][static_cast<std::size_t>(a)]; }
  double exploration_now() const;
  const QLearningConfig& config() const { return cfg_; }

 private:
  int ris_count_;
  std::vector<double> rates_;
  QLearningConfig cfg_;
  std::vector<double> table_[2];
  std::int64_t t_ = 0;
  // transition waiting for the next state
  bool pending_ = false;
  State pending_state_ = Idle;
  int pending_action_ = 0;
  double pending_reward_ = 0.0;
  State cur_state_ = Idle;
  int cur_action_ = 0;
};

// ---------------------------------------------------------------------------

class RandomPlayer final : public Policy {
 public:
  RandomPlayer(int ris_count, int sf_count) : ris_count_(ris_count), sf_count_(sf_count) {}
  Action decide(std::span<const std::uint8_t> busy, Rng& rng) override;
  void observe(const Action&, Feedback, Rng&) override {}

 private:
  int ris_count_;
  int sf_count_;
};

/// Follows a precomputed assignment; switches to the genie direct SF when its
/// RIS is busy or it was assigned no RIS.
class OptimalPlayer final : public Policy {
 public:
  OptimalPlayer(int ris, int ris_sf, int direct_sf) : ris_(ris), ris_sf_(ris_sf), direct_sf_(direct_sf) {}
  Action decide(std::span<const std::uint8_t> busy, Rng& rng) override;
  void observe(const Action&, Feedback, Rng&) override {}

 private:
  int ris_;
  int ris_sf_;
  int direct_sf_;
};

// ---------------------------------------------------------------------------

enum class PolicyKind { E2Boost, E2BoostNoTs, E2BoostFixedEps, GoT, QLearning, Random, Optimal };

struct PolicySpec {
  PolicyKind kind = PolicyKind::E2Boost;
  double fixed_epsilon = 0.0;  // E2BoostFixedEps only
  std::string name;            // canonical spelling
};

/// Parses `e2boost`, `e2boost-no-ts`, `e2boost-fixed-eps:<v>`, `got`,
/// `qlearning`, `random`, `optimal`. Throws std::invalid_argument otherwise.
PolicySpec parse_policy(const std::string& name);

}  // namespace e2boost
