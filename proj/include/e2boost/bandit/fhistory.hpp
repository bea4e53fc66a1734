#pragma once

#include <span>
#include <vector>

#include "e2boost/bandit/game.hpp"
#include "json.hpp"

namespace e2boost {

/// Counts of Content plays per arm, one vector per epoch.
class FHistory {
 public:
  FHistory() = default;
  explicit FHistory(int arms) : arms_(arms) {}

  int arms() const { return arms_; }
  int epochs() const { return static_cast<int>(counts_.size()); }

  /// Opens the vector for epoch `z` (1-based); earlier epochs must already exist.
  void begin_epoch(int z);
  void record_content_play(int arm, Mood mood);

  const std::vector<double>& epoch(int z) const { return counts_.at(static_cast<std::size_t>(z - 1)); }

  /// argmax_k of the summed counts over epochs z-floor(z/2) .. z.
  int best_arm(int z) const;

  friend bool operator==(const FHistory&, const FHistory&) = default;
  friend void to_json(nlohmann::json& j, const FHistory& h);
  friend void from_json(const nlohmann::json& j, FHistory& h);

 private:
  int arms_ = 0;
  std::vector<std::vector<double>> counts_;
};

/// Normalises counts to a PMF; empty when the sum is zero.
std::vector<double> to_pmf(std::span<const double> counts);

/// Order-1 Wasserstein distance between PMFs on arm indices 0..K-1 with metric |i-j|.
double wasserstein1(std::span<const double> p, std::span<const double> q);

/// min(1, W1) between the normalised count vectors; 1 when either vector is all zero.
double adapt_epsilon(std::span<const double> current, std::span<const double> previous);

}  // namespace e2boost
