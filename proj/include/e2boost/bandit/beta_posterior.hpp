#pragma once

#include <span>
#include <vector>

#include "e2boost/policy.hpp"
#include "e2boost/rng.hpp"
#include "json.hpp"

namespace e2boost {

/// Success/failure counts per SF; the sampling prior is Beta(alpha + 1, beta + 1).
struct BetaPosterior {
  std::vector<double> alpha;
  std::vector<double> beta;

  BetaPosterior() = default;
  explicit BetaPosterior(int arms) : alpha(static_cast<std::size_t>(arms), 0.0), beta(static_cast<std::size_t>(arms), 0.0) {}

  int arms() const { return static_cast<int>(alpha.size()); }
  double pulls(int m) const { return alpha[static_cast<std::size_t>(m)] + beta[static_cast<std::size_t>(m)]; }

  friend bool operator==(const BetaPosterior&, const BetaPosterior&) = default;
};

double sample_beta(double a, double b, Rng& rng);

/// argmax_m rates[m] * theta_m with theta_m ~ Beta(alpha_m + 1, beta_m + 1).
/// Arms whose rate cannot beat the running maximum are not sampled; the returned
/// arm has the same distribution as with every draw taken. Ties go to the lowest index.
int ts_select(const BetaPosterior& post, std::span<const double> rates, Rng& rng);

/// Success -> alpha + 1, Failure -> beta + 1, Collision/Busy -> unchanged.
void ts_update(BetaPosterior& post, int sf, Feedback feedback);

/// argmax_m rates[m] * alpha_m / (alpha_m + beta_m); unvisited arms score 0.
int best_sf(const BetaPosterior& post, std::span<const double> rates);

void to_json(nlohmann::json& j, const BetaPosterior& p);
void from_json(const nlohmann::json& j, BetaPosterior& p);

}  // namespace e2boost
