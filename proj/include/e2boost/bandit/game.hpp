#pragma once

#include "e2boost/rng.hpp"
#include "json.hpp"

namespace e2boost {

enum class Mood : int { Content, Discontent };

struct GameState {
  Mood mood = Mood::Content;
  int baseline = 0;
  double utility = 0.0;  // last realised utility
  double u_max = 0.0;
  double epsilon = 0.01;
  double nu = 1.4;

  friend bool operator==(const GameState&, const GameState&) = default;
};

/// Probability that a Content player keeps its baseline: 1 - epsilon^nu.
double content_keep_probability(const GameState& g);

/// Probability of landing in Content after a trigger with utility u.
double content_transition_probability(const GameState& g, double u);

/// Content: baseline w.p. 1 - eps^nu, otherwise one of the other arms uniformly.
/// Discontent: uniform over all arms.
int game_step(const GameState& g, int arms, Rng& rng);

/// Mood/baseline update after playing `played` with utility `u`.
void game_transition(GameState& g, int played, double u, Rng& rng);

void to_json(nlohmann::json& j, const GameState& g);
void from_json(const nlohmann::json& j, GameState& g);

}  // namespace e2boost
