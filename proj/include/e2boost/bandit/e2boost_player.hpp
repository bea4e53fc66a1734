#pragma once

#include <optional>
#include <span>
#include <vector>

#include "e2boost/bandit/beta_posterior.hpp"
#include "e2boost/bandit/epoch_schedule.hpp"
#include "e2boost/bandit/fhistory.hpp"
#include "e2boost/bandit/game.hpp"
#include "e2boost/policy.hpp"
#include "json.hpp"

namespace e2boost {

struct E2BoostConfig {
  EpochSchedule schedule;
  double game_epsilon = 0.01;
  double nu = 1.4;
  /// When set, the exploration rate is pinned to this value from epoch 2 on
  /// instead of following the Wasserstein adaptation.
  std::optional<double> fixed_explore;

  friend bool operator==(const E2BoostConfig&, const E2BoostConfig&) = default;
};

void to_json(nlohmann::json& j, const E2BoostConfig& c);
void from_json(const nlohmann::json& j, E2BoostConfig& c);

/// Phase-1 counters for one epoch-spanning player. V counts feedback-bearing
/// transmissions, Q successes; both accumulate over epochs.
struct Phase1Stats {
  std::vector<double> V;
  std::vector<double> Q;
  std::vector<double> theta_hat;

  explicit Phase1Stats(int arms = 0)
      : V(static_cast<std::size_t>(arms), 0.0), Q(V), theta_hat(V) {}
  void record(int arm, Feedback f);
  void finalize();  // theta_hat = Q / V, 0 where V = 0

  friend bool operator==(const Phase1Stats&, const Phase1Stats&) = default;
};

class E2BoostPlayer final : public Policy {
 public:
  E2BoostPlayer(int ris_count, std::vector<double> rates, E2BoostConfig cfg = {});

  Action decide(std::span<const std::uint8_t> busy, Rng& rng) override;
  void observe(const Action& action, Feedback feedback, Rng& rng) override;

  /// Direct-link TS step that leaves the epoch cursor untouched (round-robin
  /// members that are not flagged this slot).
  Action decide_direct(Rng& rng);
  void observe_direct(const Action& action, Feedback feedback);

  int epoch() const { return z_; }
  EpochPhase phase() const { return phase_; }
  std::int64_t slot_in_phase() const { return t_in_phase_; }
  double explore_epsilon() const { return explore_eps_; }
  int best_ris() const { return best_ris_; }
  int best_sf() const { return best_sf_; }
  int ris_count() const { return ris_count_; }
  const std::vector<double>& rates() const { return rates_; }
  const E2BoostConfig& config() const { return cfg_; }
  const Phase1Stats& phase1() const { return stats_; }
  const GameState& game() const { return game_; }
  const FHistory& history() const { return history_; }
  const BetaPosterior& ris_posterior(int k) const { return ris_post_.at(static_cast<std::size_t>(k)); }
  const BetaPosterior& direct_posterior() const { return direct_post_; }
  /// Last RIS picked in the game phase of epoch z, -1 if none.
  int last_game_ris(int z) const;
  /// True when the most recent decide() fell back to a direct TS step.
  bool last_was_fallback() const { return pending_fallback_; }

  nlohmann::json to_json() const;
  static E2BoostPlayer from_json(const nlohmann::json& j);


 private:
  void advance(Rng& rng);
  void end_explore(Rng& rng);
  void end_game();
  void end_exploit();
  Action ts_direct(Rng& rng);

  int ris_count_;
  std::vector<double> rates_;
  E2BoostConfig cfg_;

  int z_ = 1;
  EpochPhase phase_ = EpochPhase::Explore;
  std::int64_t t_in_phase_ = 0;
  double explore_eps_ = 1.0;
  int best_ris_ = 0;
  int best_sf_ = 0;

  Phase1Stats stats_;
  GameState game_;
  FHistory history_;
  std::vector<int> last_game_ris_;
  std::vector<BetaPosterior> ris_post_;
  BetaPosterior direct_post_;

  bool pending_fallback_ = false;
};

}  // namespace e2boost
