#include "e2boost/bandit/game.hpp"

#include <algorithm>
#include <cmath>

namespace e2boost {

double content_keep_probability(const GameState& g) { return 1.0 - std::pow(g.epsilon, g.nu); }

double content_transition_probability(const GameState& g, double u) {
  if (g.u_max <= 0.0 || u <= 0.0) return 0.0;
  const double uu = std::min(u, g.u_max);
  return std::clamp(uu / g.u_max * std::pow(g.epsilon, g.u_max - uu), 0.0, 1.0);
}

int game_step(const GameState& g, int arms, Rng& rng) {
  if (arms <= 1) return 0;
  if (g.mood == Mood::Discontent) return static_cast<int>(uniform_index(rng, arms));
  if (!bernoulli(rng, std::pow(g.epsilon, g.nu))) return g.baseline;
  // one of the K-1 other arms, skipping the baseline
  int k = static_cast<int>(uniform_index(rng, arms - 1));
  if (k >= g.baseline) ++k;
  return k;
}

void game_transition(GameState& g, int played, double u, Rng& rng) {
  g.utility = u;
  if (played == g.baseline && u > 0.0 && g.mood == Mood::Content) return;
  g.baseline = played;
  g.mood = bernoulli(rng, content_transition_probability(g, u)) ? Mood::Content : Mood::Discontent;
}

void to_json(nlohmann::json& j, const GameState& g) {
  j = {{"mood", g.mood == Mood::Content ? "content" : "discontent"},
       {"baseline", g.baseline},
       {"utility", g.utility},
       {"u_max", g.u_max},
       {"epsilon", g.epsilon},
       {"nu", g.nu}};
}

void from_json(const nlohmann::json& j, GameState& g) {
  g.mood = j.at("mood") == "content" ? Mood::Content : Mood::Discontent;
  g.baseline = j.at("baseline");
  g.utility = j.at("utility");
  g.u_max = j.at("u_max");
  g.epsilon = j.at("epsilon");
  g.nu = j.at("nu");
}

}  // namespace e2boost
