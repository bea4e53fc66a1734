#include "e2boost/bandit/clustering.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace e2boost {

namespace {

double sq_dist(const Position3D& p, const std::pair<double, double>& c) {
  const double dx = p.x - c.first, dy = p.y - c.second;
  return dx * dx + dy * dy;
}

int nearest(const Position3D& p, const std::vector<std::pair<double, double>>& cs) {
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cs.size(); ++c) {
    const double d = sq_dist(p, cs[c]);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

KMeansResult kmeans_xy(std::span<const Position3D> points, int k, Rng& rng, int max_iter, double tol) {
  const int n = static_cast<int>(points.size());
  if (k < 1 || k > n) throw std::invalid_argument("kmeans_xy: need 1 <= k <= number of points");
  KMeansResult r;

  // k-means++ seeding
  const auto first = static_cast<std::size_t>(uniform_index(rng, n));
  r.centroids.emplace_back(points[first].x, points[first].y);
  std::vector<double> d2(static_cast<std::size_t>(n));
  while (static_cast<int>(r.centroids.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : r.centroids) best = std::min(best, sq_dist(points[static_cast<std::size_t>(i)], c));
      d2[static_cast<std::size_t>(i)] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total <= 0.0) {
      pick = static_cast<std::size_t>(uniform_index(rng, n));
    } else {
      double u = uniform01(rng) * total;
      for (pick = 0; pick + 1 < d2.size(); ++pick) {
        if (u < d2[pick]) break;
        u -= d2[pick];
      }
    }
    r.centroids.emplace_back(points[pick].x, points[pick].y);
  }

  r.assignment.assign(static_cast<std::size_t>(n), 0);
  for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
    for (int i = 0; i < n; ++i) r.assignment[static_cast<std::size_t>(i)] = nearest(points[static_cast<std::size_t>(i)], r.centroids);

    std::vector<double> sx(static_cast<std::size_t>(k), 0.0), sy(sx);
    std::vector<int> cnt(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(r.assignment[static_cast<std::size_t>(i)]);
      sx[c] += points[static_cast<std::size_t>(i)].x;
      sy[c] += points[static_cast<std::size_t>(i)].y;
      ++cnt[c];
    }
    // an empty cluster takes over the point farthest from its own centroid
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
      if (cnt[c] > 0) continue;
      std::size_t far = 0;
      double fd = -1.0;
      for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
        const auto own = static_cast<std::size_t>(r.assignment[i]);
        if (cnt[own] <= 1) continue;
        const double d = sq_dist(points[i], r.centroids[own]);
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      const auto own = static_cast<std::size_t>(r.assignment[far]);
      sx[own] -= points[far].x;
      sy[own] -= points[far].y;
      --cnt[own];
      r.assignment[far] = static_cast<int>(c);
      sx[c] = points[far].x;
      sy[c] = points[far].y;
      cnt[c] = 1;
    }

    double moved = 0.0;
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
      const std::pair<double, double> nc{sx[c] / cnt[c], sy[c] / cnt[c]};
      moved = std::max(moved, std::sqrt(sq_dist({nc.first, nc.second, 0.0}, r.centroids[c])));
      r.centroids[c] = nc;
    }
    if (moved < tol) break;
  }
  r.iterations = std::min(r.iterations, max_iter);
  return r;
}

ClusterSchedule::ClusterSchedule(std::vector<int> assignment, int clusters)
    : assignment_(std::move(assignment)), rank_(assignment_.size(), 0), members_(static_cast<std::size_t>(clusters)) {
  for (std::size_t n = 0; n < assignment_.size(); ++n) {
    auto& m = members_.at(static_cast<std::size_t>(assignment_[n]));
    rank_[n] = static_cast<int>(m.size());
    m.push_back(static_cast<int>(n));
  }
  for (const auto& m : members_)
    if (m.empty()) throw std::invalid_argument("ClusterSchedule: empty cluster");
}

bool ClusterSchedule::flagged(std::int64_t slot, int device) const {
  const auto& m = members_[static_cast<std::size_t>(cluster_of(device))];
  return slot % static_cast<std::int64_t>(m.size()) == rank_of(device);
}

ClusterSchedule cluster_round_robin(std::span<const Position3D> devices, int k, Rng& rng) {
  const int n = static_cast<int>(devices.size());
  if (k > n) throw std::invalid_argument("more RISs than devices: run plain E2Boost players without clustering");
  if (k < 1) throw std::invalid_argument("cluster_round_robin: need at least one RIS");
  if (k == n) {
    std::vector<int> a(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = i;
    return ClusterSchedule(std::move(a), k);
  }
  return ClusterSchedule(kmeans_xy(devices, k, rng).assignment, k);
}

RoundRobinE2Boost::RoundRobinE2Boost(E2BoostPlayer inner, int rank, int cluster_size)
    : inner_(std::move(inner)), rank_(rank), cluster_size_(cluster_size) {
  if (cluster_size_ < 1 || rank_ < 0 || rank_ >= cluster_size_)
    throw std::invalid_argument("RoundRobinE2Boost: bad rank or cluster size");
}

Action RoundRobinE2Boost::decide(std::span<const std::uint8_t> busy, Rng& rng) {
  active_ = slot_ % cluster_size_ == rank_;
  return active_ ? inner_.decide(busy, rng) : inner_.decide_direct(rng);
}

void RoundRobinE2Boost::observe(const Action& action, Feedback feedback, Rng& rng) {
  if (active_) inner_.observe(action, feedback, rng);
  else inner_.observe_direct(action, feedback);
  ++slot_;
}

}  // namespace e2boost
