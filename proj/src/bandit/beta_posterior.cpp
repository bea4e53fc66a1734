#include "e2boost/bandit/beta_posterior.hpp"

#include <limits>

namespace e2boost {

double sample_beta(double a, double b, Rng& rng) {
  const double x = std::gamma_distribution<double>(a, 1.0)(rng);
  const double y = std::gamma_distribution<double>(b, 1.0)(rng);
  const double s = x + y;
  return s > 0.0 ? x / s : 0.5;
}

int ts_select(const BetaPosterior& post, std::span<const double> rates, Rng& rng) {
  const int arms = post.arms();
  if (arms <= 1) return 0;
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < arms; ++m) {
    const double c = rates[static_cast<std::size_t>(m)];
    if (best >= 0 && c <= best_score) continue;  // theta <= 1 cannot lift it past the leader
    const double theta =
        sample_beta(post.alpha[static_cast<std::size_t>(m)] + 1.0, post.beta[static_cast<std::size_t>(m)] + 1.0, rng);
    const double score = c * theta;
    if (score > best_score) {
      best_score = score;
      best = m;
    }
  }
  return best;
}

void ts_update(BetaPosterior& post, int sf, Feedback feedback) {
  const auto m = static_cast<std::size_t>(sf);
  if (feedback == Feedback::Success) post.alpha[m] += 1.0;
  else if (feedback == Feedback::Failure) post.beta[m] += 1.0;
}

int best_sf(const BetaPosterior& post, std::span<const double> rates) {
  int best = 0;
  double best_score = -1.0;
  for (int m = 0; m < post.arms(); ++m) {
    const double n = post.pulls(m);
    const double score = n > 0.0 ? rates[static_cast<std::size_t>(m)] * post.alpha[static_cast<std::size_t>(m)] / n : 0.0;
    if (score > best_score) {
      best_score = score;
      best = m;
    }
  }
  return best;
}

void to_json(nlohmann::json& j, const BetaPosterior& p) { j = {{"alpha", p.alpha}, {"beta", p.beta}}; }

void from_json(const nlohmann::json& j, BetaPosterior& p) {
  p.alpha = j.at("alpha").get<std::vector<double>>();
  p.beta = j.at("beta").get<std::vector<double>>();
}

}  // namespace e2boost
