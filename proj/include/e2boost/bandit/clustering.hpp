#pragma once

#include <span>
#include <vector>

#include "e2boost/bandit/e2boost_player.hpp"
#include "e2boost/netmodel.hpp"
#include "e2boost/rng.hpp"

namespace e2boost {

struct KMeansResult {
  std::vector<int> assignment;  // cluster per point
  std::vector<std::pair<double, double>> centroids;
  int iterations = 0;
};

/// Lloyd's algorithm on XY coordinates with k-means++ seeding.
KMeansResult kmeans_xy(std::span<const Position3D> points, int k, Rng& rng, int max_iter = 100, double tol = 1e-6);

/// Round-robin schedule: in slot t cluster c flags members[c][t mod size].
class ClusterSchedule {
 public:
  ClusterSchedule() = default;
  explicit ClusterSchedule(std::vector<int> assignment, int clusters);

  int clusters() const { return static_cast<int>(members_.size()); }
  int cluster_of(int device) const { return assignment_.at(static_cast<std::size_t>(device)); }
  const std::vector<int>& members(int cluster) const { return members_.at(static_cast<std::size_t>(cluster)); }
  /// Position of the device inside its cluster's member list.
  int rank_of(int device) const { return rank_.at(static_cast<std::size_t>(device)); }
  bool flagged(std::int64_t slot, int device) const;
  const std::vector<int>& assignment() const { return assignment_; }

 private:
  std::vector<int> assignment_;
  std::vector<int> rank_;
  std::vector<std::vector<int>> members_;
};

/// Clusters the devices and builds the round-robin schedule. Throws
/// std::invalid_argument when K > N (every device then gets its own RIS).
ClusterSchedule cluster_round_robin(std::span<const Position3D> devices, int k, Rng& rng);

/// A device in the K < N regime: full E2Boost in the slots where it is
/// flagged, a direct-link TS step otherwise.
class RoundRobinE2Boost final : public Policy {
 public:
  RoundRobinE2Boost(E2BoostPlayer inner, int rank, int cluster_size);

  Action decide(std::span<const std::uint8_t> busy, Rng& rng) override;
  void observe(const Action& action, Feedback feedback, Rng& rng) override;
  bool full_mode() const override { return active_; }

  const E2BoostPlayer& inner() const { return inner_; }
  std::int64_t slot() const { return slot_; }

 private:
  E2BoostPlayer inner_;
  int rank_;
  int cluster_size_;
  std::int64_t slot_ = 0;
  bool active_ = true;
};

}  // namespace e2boost
