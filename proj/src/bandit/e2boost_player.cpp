#include "e2boost/bandit/e2boost_player.hpp"

#include <algorithm>
#include <stdexcept>

namespace e2boost {

void to_json(nlohmann::json& j, const E2BoostConfig& c) {
  j = {{"nu1", c.schedule.nu1},       {"nu2", c.schedule.nu2}, {"nu3", c.schedule.nu3},
       {"delta", c.schedule.delta},   {"game_epsilon", c.game_epsilon}, {"nu", c.nu},
       {"fixed_explore", nullptr}};
  if (c.fixed_explore) j["fixed_explore"] = *c.fixed_explore;
}

void from_json(const nlohmann::json& j, E2BoostConfig& c) {
  c.schedule = {j.at("nu1"), j.at("nu2"), j.at("nu3"), j.at("delta")};
  c.game_epsilon = j.at("game_epsilon");
  c.nu = j.at("nu");
  c.fixed_explore.reset();
  if (j.contains("fixed_explore") && !j.at("fixed_explore").is_null()) c.fixed_explore = j.at("fixed_explore").get<double>();
}

void Phase1Stats::record(int arm, Feedback f) {
  if (f != Feedback::Success && f != Feedback::Failure) return;
  const auto k = static_cast<std::size_t>(arm);
  V[k] += 1.0;
  if (f == Feedback::Success) Q[k] += 1.0;
}

void Phase1Stats::finalize() {
  for (std::size_t k = 0; k < V.size(); ++k) theta_hat[k] = V[k] > 0.0 ? Q[k] / V[k] : 0.0;
}

E2BoostPlayer::E2BoostPlayer(int ris_count, std::vector<double> rates, E2BoostConfig cfg)
    : ris_count_(ris_count), rates_(std::move(rates)), cfg_(cfg), stats_(ris_count), history_(ris_count) {
  if (ris_count_ < 1) throw std::invalid_argument("E2BoostPlayer: need at least one RIS");
  if (rates_.empty()) throw std::invalid_argument("E2BoostPlayer: empty SF table");
  if (cfg_.fixed_explore && (*cfg_.fixed_explore < 0.0 || *cfg_.fixed_explore > 1.0))
    throw std::invalid_argument("E2BoostPlayer: fixed exploration rate outside [0,1]");
  game_.epsilon = cfg_.game_epsilon;
  game_.nu = cfg_.nu;
  ris_post_.assign(static_cast<std::size_t>(ris_count_), BetaPosterior(static_cast<int>(rates_.size())));
  direct_post_ = BetaPosterior(static_cast<int>(rates_.size()));
  history_.begin_epoch(1);
  last_game_ris_.push_back(-1);
}

int E2BoostPlayer::last_game_ris(int z) const {
  if (z < 1 || z > static_cast<int>(last_game_ris_.size())) return -1;
  return last_game_ris_[static_cast<std::size_t>(z - 1)];
}

Action E2BoostPlayer::ts_direct(Rng& rng) {
  return {Pattern::Direct, -1, ts_select(direct_post_, rates_, rng)};
}

Action E2BoostPlayer::decide_direct(Rng& rng) { return ts_direct(rng); }

void E2BoostPlayer::observe_direct(const Action& action, Feedback feedback) {
  ts_update(direct_post_, action.sf, feedback);
}

Action E2BoostPlayer::decide(std::span<const std::uint8_t> busy, Rng& rng) {
  pending_fallback_ = false;
  const int m_count = static_cast<int>(rates_.size());
  int k = 0;
  switch (phase_) {
    case EpochPhase::Explore: {
      const int sf = z_ == 1 ? static_cast<int>(uniform_index(rng, m_count)) : best_sf_;
      k = bernoulli(rng, explore_eps_) ? static_cast<int>(uniform_index(rng, ris_count_))
                                       : best_ris_;
      if (busy[static_cast<std::size_t>(k)]) break;
      return {Pattern::RisAssisted, k, sf};
    }
    case EpochPhase::Game: {
      k = game_step(game_, ris_count_, rng);
      last_game_ris_.back() = k;
      if (busy[static_cast<std::size_t>(k)]) break;
      const int sf = z_ == 1 ? static_cast<int>(uniform_index(rng, m_count)) : best_sf_;
      return {Pattern::RisAssisted, k, sf};
    }
    case EpochPhase::Exploit: {
      k = best_ris_;
      if (busy[static_cast<std::size_t>(k)]) break;
      return {Pattern::RisAssisted, k, ts_select(ris_post_[static_cast<std::size_t>(k)], rates_, rng)};
    }
  }
  pending_fallback_ = true;
  return ts_direct(rng);
}

void E2BoostPlayer::observe(const Action& action, Feedback feedback, Rng& rng) {
  if (pending_fallback_) {
    // busy target: a direct TS slot, counted against the current phase only
    ts_update(direct_post_, action.sf, feedback);
    advance(rng);
    return;
  }
  switch (phase_) {
    case EpochPhase::Explore:
      stats_.record(action.ris, feedback);
      break;
    case EpochPhase::Game: {
      const bool delivered = feedback == Feedback::Success || feedback == Feedback::Failure;
      const double u = delivered ? stats_.theta_hat[static_cast<std::size_t>(action.ris)] : 0.0;
      if (action.ris != game_.baseline || u <= 0.0 || game_.mood == Mood::Discontent)
        game_transition(game_, action.ris, u, rng);
      else
        game_.utility = u;
      history_.record_content_play(action.ris, game_.mood);
      break;
    }
    case EpochPhase::Exploit:
      ts_update(ris_post_[static_cast<std::size_t>(action.ris)], action.sf, feedback);
      break;
  }
  advance(rng);
}

void E2BoostPlayer::advance(Rng& rng) {
  if (++t_in_phase_ < cfg_.schedule.length(z_, phase_)) return;
  t_in_phase_ = 0;
  switch (phase_) {
    case EpochPhase::Explore:
      end_explore(rng);
      phase_ = EpochPhase::Game;
      break;
    case EpochPhase::Game:
      end_game();
      phase_ = EpochPhase::Exploit;
      break;
    case EpochPhase::Exploit:
      end_exploit();
      phase_ = EpochPhase::Explore;
      break;
  }
}

void E2BoostPlayer::end_explore(Rng& rng) {
  stats_.finalize();
  game_.u_max = *std::max_element(stats_.theta_hat.begin(), stats_.theta_hat.end());
  game_.mood = Mood::Content;
  game_.utility = 0.0;
  const int source = z_ - z_ / 2 - 1;
  const int prev = z_ > 2 ? last_game_ris(source) : -1;
  game_.baseline = prev >= 0 ? prev : static_cast<int>(uniform_index(rng, ris_count_));
}

void E2BoostPlayer::end_game() {
  best_ris_ = history_.best_arm(z_);
  if (cfg_.fixed_explore) explore_eps_ = *cfg_.fixed_explore;
  else if (z_ >= 2) explore_eps_ = adapt_epsilon(history_.epoch(z_), history_.epoch(z_ - 1));
}

void E2BoostPlayer::end_exploit() {
  best_sf_ = e2boost::best_sf(ris_post_[static_cast<std::size_t>(best_ris_)], rates_);
  ++z_;
  history_.begin_epoch(z_);
  last_game_ris_.push_back(-1);
}

nlohmann::json E2BoostPlayer::to_json() const {
  nlohmann::json j;
  j["kind"] = "e2boost";
  j["ris_count"] = ris_count_;
  j["rates"] = rates_;
  j["config"] = cfg_;
  j["epoch"] = z_;
  j["phase"] = static_cast<int>(phase_);
  j["slot_in_phase"] = t_in_phase_;
  j["explore_epsilon"] = explore_eps_;
  j["best_ris"] = best_ris_;
  j["best_sf"] = best_sf_;
  j["phase1"] = {{"V", stats_.V}, {"Q", stats_.Q}, {"theta_hat", stats_.theta_hat}};
  j["game"] = game_;
  j["history"] = history_;
  j["last_game_ris"] = last_game_ris_;
  j["ris_posteriors"] = ris_post_;
  j["direct_posterior"] = direct_post_;
  j["pending_fallback"] = pending_fallback_;
  return j;
}

E2BoostPlayer E2BoostPlayer::from_json(const nlohmann::json& j) {
  if (j.at("kind") != "e2boost") throw std::invalid_argument("E2BoostPlayer::from_json: wrong kind");
  E2BoostPlayer p(j.at("ris_count").get<int>(), j.at("rates").get<std::vector<double>>(),
                  j.at("config").get<E2BoostConfig>());
  p.z_ = j.at("epoch");
  p.phase_ = static_cast<EpochPhase>(j.at("phase").get<int>());
  p.t_in_phase_ = j.at("slot_in_phase");
  p.explore_eps_ = j.at("explore_epsilon");
  p.best_ris_ = j.at("best_ris");
  p.best_sf_ = j.at("best_sf");
  p.stats_.V = j.at("phase1").at("V").get<std::vector<double>>();
  p.stats_.Q = j.at("phase1").at("Q").get<std::vector<double>>();
  p.stats_.theta_hat = j.at("phase1").at("theta_hat").get<std::vector<double>>();
  p.game_ = j.at("game").get<GameState>();
  p.history_ = j.at("history").get<FHistory>();
  p.last_game_ris_ = j.at("last_game_ris").get<std::vector<int>>();
  p.ris_post_ = j.at("ris_posteriors").get<std::vector<BetaPosterior>>();
  p.direct_post_ = j.at("direct_posterior").get<BetaPosterior>();
  p.pending_fallback_ = j.at("pending_fallback");
  return p;
}

}  // namespace e2boost
