#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace e2boost {

enum class EpochPhase : int { Explore = 1, Game = 2, Exploit = 3 };

/// Phase lengths of epoch z (1-based): ceil(nu1 z^delta), ceil(nu2 z^delta), ceil(nu3 2^z).
struct EpochSchedule {
  double nu1 = 1000;
  double nu2 = 1000;
  double nu3 = 100;
  double delta = 0;

  std::int64_t length(int z, EpochPhase phase) const {
    const double zd = std::pow(static_cast<double>(z), delta);
    double len = 0;
    switch (phase) {
      case EpochPhase::Explore: len = nu1 * zd; break;
      case EpochPhase::Game: len = nu2 * zd; break;
      case EpochPhase::Exploit: len = nu3 * std::ldexp(1.0, z); break;
    }
    const auto n = static_cast<std::int64_t>(std::ceil(len - 1e-9));
    return n < 1 ? 1 : n;
  }

  std::array<std::int64_t, 3> lengths(int z) const {
    return {length(z, EpochPhase::Explore), length(z, EpochPhase::Game), length(z, EpochPhase::Exploit)};
  }

  std::int64_t epoch_length(int z) const {
    const auto l = lengths(z);
    return l[0] + l[1] + l[2];
  }

  /// Slots consumed by epochs 1..epochs.
  std::int64_t total_slots(int epochs) const {
    std::int64_t t = 0;
    for (int z = 1; z <= epochs; ++z) t += epoch_length(z);
    return t;
  }

  /// Cumulative slot count at the end of each epoch 1..epochs.
  std::vector<std::int64_t> epoch_ends(int epochs) const {
    std::vector<std::int64_t> out;
    std::int64_t t = 0;
    for (int z = 1; z <= epochs; ++z) out.push_back(t += epoch_length(z));
    return out;
  }

  friend bool operator==(const EpochSchedule&, const EpochSchedule&) = default;
};

}  // namespace e2boost
