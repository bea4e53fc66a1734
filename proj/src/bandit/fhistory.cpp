#include "e2boost/bandit/fhistory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace e2boost {

void FHistory::begin_epoch(int z) {
  if (z != epochs() + 1) throw std::logic_error("FHistory: epochs must be opened in order");
  counts_.emplace_back(static_cast<std::size_t>(arms_), 0.0);
}

void FHistory::record_content_play(int arm, Mood mood) {
  if (counts_.empty()) throw std::logic_error("FHistory: no open epoch");
  if (mood == Mood::Content) counts_.back()[static_cast<std::size_t>(arm)] += 1.0;
}

int FHistory::best_arm(int z) const {
  if (z < 1 || z > epochs()) throw std::out_of_range("FHistory::best_arm: epoch not recorded");
  std::vector<double> sum(static_cast<std::size_t>(arms_), 0.0);
  for (int j = 0; j <= z / 2; ++j) {
    const auto& v = epoch(z - j);
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += v[k];
  }
  return static_cast<int>(std::max_element(sum.begin(), sum.end()) - sum.begin());
}

void to_json(nlohmann::json& j, const FHistory& h) { j = {{"arms", h.arms_}, {"counts", h.counts_}}; }

void from_json(const nlohmann::json& j, FHistory& h) {
  h.arms_ = j.at("arms");
  h.counts_ = j.at("counts").get<std::vector<std::vector<double>>>();
}

std::vector<double> to_pmf(std::span<const double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (total <= 0.0) return {};
  std::vector<double> p(counts.begin(), counts.end());
  for (double& x : p) x /= total;
  return p;
}

double wasserstein1(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("wasserstein1: size mismatch");
  double cp = 0.0, cq = 0.0, w = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    cp += p[i];
    cq += q[i];
    w += std::abs(cp - cq);
  }
  return w;
}

double adapt_epsilon(std::span<const double> current, std::span<const double> previous) {
  const auto p = to_pmf(current);
  const auto q = to_pmf(previous);
  if (p.empty() || q.empty()) return 1.0;
  return std::min(1.0, wasserstein1(p, q));
}

}  // namespace e2boost
