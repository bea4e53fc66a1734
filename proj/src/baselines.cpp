#include "e2boost/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace e2boost {

// ---------------------------------------------------------------------------
// Assignment

std::vector<int> solve_assignment(const std::vector<std::vector<double>>& value) {
  const int n = static_cast<int>(value.size());
  if (n == 0) return {};
  const int m = static_cast<int>(value[0].size());
  if (m < n) throw std::invalid_argument("solve_assignment: more rows than columns");
  // shortest augmenting path with potentials, minimising -value (1-based)
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(m) + 1, 0), way(static_cast<std::size_t>(m) + 1, 0);
  auto cost = [&](int i, int j) { return -value[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]; };
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0, j) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j)
    if (p[static_cast<std::size_t>(j)] != 0) col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return col;
}

namespace {

void check_matrix(const AssignmentMatrix& m) {
  if (m.players < 0 || m.riss < 0 || m.sfs < 1 ||
      m.value.size() != static_cast<std::size_t>(m.players) * m.riss * m.sfs)
    throw std::invalid_argument("assignment matrix: dimensions do not match the value array");
  if (!m.direct.empty() && m.direct.size() != static_cast<std::size_t>(m.players))
    throw std::invalid_argument("assignment matrix: direct values need one entry per player");
  if (m.direct.empty() && m.players > m.riss)
    throw std::invalid_argument("assignment infeasible: more players than RISs and no direct link");
}

// best SF of player n on RIS k
std::pair<int, double> best_on_ris(const AssignmentMatrix& m, int n, int k) {
  int best = 0;
  double bv = m.at(n, k, 0);
  for (int s = 1; s < m.sfs; ++s) {
    if (m.at(n, k, s) > bv) {
      bv = m.at(n, k, s);
      best = s;
    }
  }
  return {best, bv};
}

double profile_value(const AssignmentMatrix& m, const AssignmentResult& r) {
  double total = 0.0;
  for (int n = 0; n < m.players; ++n) {
    const auto i = static_cast<std::size_t>(n);
    total += r.ris[i] < 0 ? m.direct[i] : m.at(n, r.ris[i], r.sf[i]);
  }
  return total;
}

}  // namespace

AssignmentResult hungarian_assign(const AssignmentMatrix& m) {
  check_matrix(m);
  AssignmentResult r;
  r.ris.assign(static_cast<std::size_t>(m.players), -1);
  r.sf.assign(static_cast<std::size_t>(m.players), -1);
  if (m.players == 0) return r;
  const bool with_direct = !m.direct.empty();
  const int cols = m.riss + (with_direct ? m.players : 0);
  std::vector<std::vector<double>> value(static_cast<std::size_t>(m.players),
                                         std::vector<double>(static_cast<std::size_t>(cols), 0.0));
  for (int n = 0; n < m.players; ++n) {
    auto& row = value[static_cast<std::size_t>(n)];
    for (int k = 0; k < m.riss; ++k) row[static_cast<std::size_t>(k)] = best_on_ris(m, n, k).second;
    for (int c = m.riss; c < cols; ++c) row[static_cast<std::size_t>(c)] = m.direct[static_cast<std::size_t>(n)];
  }
  const auto col = solve_assignment(value);
  for (int n = 0; n < m.players; ++n) {
    const int c = col[static_cast<std::size_t>(n)];
    if (c < m.riss) {
      r.ris[static_cast<std::size_t>(n)] = c;
      r.sf[static_cast<std::size_t>(n)] = best_on_ris(m, n, c).first;
    }
  }
  r.total = profile_value(m, r);
  return r;
}

AssignmentResult brute_force_assign(const AssignmentMatrix& m) {
  check_matrix(m);
  AssignmentResult best, cur;
  best.total = -std::numeric_limits<double>::infinity();
  cur.ris.assign(static_cast<std::size_t>(m.players), -1);
  cur.sf.assign(static_cast<std::size_t>(m.players), -1);
  std::vector<char> taken(static_cast<std::size_t>(m.riss), 0);
  std::function<void(int)> rec = [&](int n) {
    if (n == m.players) {
      const double v = profile_value(m, cur);
      if (v > best.total) {
        best = cur;
        best.total = v;
      }
      return;
    }
    const auto i = static_cast<std::size_t>(n);
    for (int k = 0; k < m.riss; ++k) {
      if (taken[static_cast<std::size_t>(k)]) continue;
      taken[static_cast<std::size_t>(k)] = 1;
      for (int s = 0; s < m.sfs; ++s) {
        cur.ris[i] = k;
        cur.sf[i] = s;
        rec(n + 1);
      }
      taken[static_cast<std::size_t>(k)] = 0;
    }
    if (!m.direct.empty()) {
      cur.ris[i] = -1;
      cur.sf[i] = -1;
      rec(n + 1);
    }
  };
  rec(0);
  return best;
}

int genie_optimal_sf(std::span<const double> theta, std::span<const double> rates) {
  int best = 0;
  double bv = -1.0;
  for (std::size_t m = 0; m < theta.size(); ++m) {
    const double v = rates[m] * theta[m];
    if (v > bv) {
      bv = v;
      best = static_cast<int>(m);
    }
  }
  return best;
}

AssignmentMatrix expected_value_matrix(const SuccessProbTable& t, std::span<const double> rates,
                                       std::span<const double> active_prob) {
  AssignmentMatrix a;
  a.players = t.devices;
  a.riss = t.riss;
  a.sfs = t.sfs;
  a.value.resize(static_cast<std::size_t>(t.devices) * t.riss * t.sfs);
  a.direct.resize(static_cast<std::size_t>(t.devices));
  for (int n = 0; n < t.devices; ++n) {
    double g = 0.0;
    for (int m = 0; m < t.sfs; ++m) g = std::max(g, rates[static_cast<std::size_t>(m)] * t.dir(n, m));
    a.direct[static_cast<std::size_t>(n)] = g;
    for (int k = 0; k < t.riss; ++k) {
      const double pa = active_prob[static_cast<std::size_t>(k)];
      for (int m = 0; m < t.sfs; ++m)
        a.value[t.index(n, k, m)] = (1.0 - pa) * rates[static_cast<std::size_t>(m)] * t.ris(n, k, m) + pa * g;
    }
  }
  return a;
}

// ---------------------------------------------------------------------------
// Joint-arm player

JointArmPlayer::JointArmPlayer(int ris_count, std::vector<double> rates, JointArmConfig cfg)
    : ris_count_(ris_count),
      rates_(std::move(rates)),
      rate_max_(rates_.empty() ? 0.0 : *std::max_element(rates_.begin(), rates_.end())),
      cfg_(cfg),
      stats_(ris_count * static_cast<int>(rates_.size())),
      direct_(static_cast<int>(rates_.size())),
      history_(ris_count * static_cast<int>(rates_.size())) {
  if (ris_count_ < 1 || rates_.empty() || rate_max_ <= 0.0)
    throw std::invalid_argument("JointArmPlayer: need at least one RIS and a positive rate");
  game_.epsilon = cfg_.game_epsilon;
  game_.nu = cfg_.nu;
  history_.begin_epoch(1);
  last_game_arm_.push_back(-1);
}

double JointArmPlayer::utility(int j) const {
  // theta * (c / c_max): exact theta for the fastest SF
  return stats_.theta_hat[static_cast<std::size_t>(j)] * (rates_[static_cast<std::size_t>(j % sf_count())] / rate_max_);
}

Action JointArmPlayer::decide(std::span<const std::uint8_t> busy, Rng& rng) {
  pending_fallback_ = false;
  int j = 0;
  switch (phase_) {
    case EpochPhase::Explore:
      j = bernoulli(rng, explore_eps_) ? uniform_index(rng, arms()) : best_arm_;
      break;
    case EpochPhase::Game:
      j = game_step(game_, arms(), rng);
      last_game_arm_.back() = j;
      break;
    case EpochPhase::Exploit:
      j = best_arm_;
      break;
  }
  const Action a = arm_action(j);
  if (!busy[static_cast<std::size_t>(a.ris)]) return a;
  pending_fallback_ = true;
  if (phase_ != EpochPhase::Exploit) return {Pattern::Direct, -1, uniform_index(rng, sf_count())};
  int best = 0;
  double bv = -1.0;
  for (int m = 0; m < sf_count(); ++m) {
    const auto i = static_cast<std::size_t>(m);
    const double v = direct_.V[i] > 0.0 ? rates_[i] * direct_.Q[i] / direct_.V[i] : 0.0;
    if (v > bv) {
      bv = v;
      best = m;
    }
  }
  return {Pattern::Direct, -1, best};
}

void JointArmPlayer::observe(const Action& action, Feedback feedback, Rng& rng) {
  if (pending_fallback_) {
    direct_.record(action.sf, feedback);
  } else {
    const int j = action.ris * sf_count() + action.sf;
    if (phase_ == EpochPhase::Explore) {
      stats_.record(j, feedback);
    } else if (phase_ == EpochPhase::Game) {
      const bool delivered = feedback == Feedback::Success || feedback == Feedback::Failure;
      const double u = delivered ? utility(j) : 0.0;
      if (j != game_.baseline || u <= 0.0 || game_.mood == Mood::Discontent)
        game_transition(game_, j, u, rng);
      else
        game_.utility = u;
      history_.record_content_play(j, game_.mood);
    }
  }
  advance(rng);
}

void JointArmPlayer::advance(Rng& rng) {
  if (++t_in_phase_ < cfg_.schedule.length(z_, phase_)) return;
  t_in_phase_ = 0;
  switch (phase_) {
    case EpochPhase::Explore: {
      stats_.finalize();
      double u_max = 0.0;
      for (int j = 0; j < arms(); ++j) u_max = std::max(u_max, utility(j));
      game_.u_max = u_max;
      game_.mood = Mood::Content;
      game_.utility = 0.0;
      const int source = z_ - z_ / 2 - 1;
      const int prev = z_ > 2 && source >= 1 ? last_game_arm_[static_cast<std::size_t>(source - 1)] : -1;
      game_.baseline = prev >= 0 ? prev : uniform_index(rng, arms());
      phase_ = EpochPhase::Game;
      break;
    }
    case EpochPhase::Game:
      best_arm_ = history_.best_arm(z_);
      if (cfg_.adaptive_explore && z_ >= 2)
        explore_eps_ = adapt_epsilon(history_.epoch(z_), history_.epoch(z_ - 1));
      phase_ = EpochPhase::Exploit;
      break;
    case EpochPhase::Exploit:
      ++z_;
      history_.begin_epoch(z_);
      last_game_arm_.push_back(-1);
      phase_ = EpochPhase::Explore;
      break;
  }
}

// ---------------------------------------------------------------------------
// Q-learning

QLearningPlayer::QLearningPlayer(int ris_count, std::vector<double> rates, QLearningConfig cfg)
    : ris_count_(ris_count), rates_(std::move(rates)), cfg_(cfg) {
  if (ris_count_ < 1 || rates_.empty()) throw std::invalid_argument("QLearningPlayer: empty arm space");
  table_[Idle].assign(static_cast<std::size_t>(ris_count_) * rates_.size(), 0.0);
  table_[Busy].assign(rates_.size(), 0.0);
}

int QLearningPlayer::greedy(State s) const {
  const auto& row = table_[s];
  return static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
}

double QLearningPlayer::exploration_now() const {
  if (cfg_.decay_slots <= 0.0) return cfg_.exploration;
  return cfg_.exploration / (1.0 + static_cast<double>(t_) / cfg_.decay_slots);
}

void QLearningPlayer::update(State s, int a, double reward, State next) {
  auto& q = table_[s][static_cast<std::size_t>(a)];
  const double next_best = *std::max_element(table_[next].begin(), table_[next].end());
  q += cfg_.learning_rate * (reward + cfg_.discount * next_best - q);
}

Action QLearningPlayer::decide(std::span<const std::uint8_t> busy, Rng& rng) {
  const int m_count = static_cast<int>(rates_.size());
  const int target = greedy(Idle) / m_count;
  cur_state_ = busy[static_cast<std::size_t>(target)] ? Busy : Idle;
  if (pending_) {
    update(pending_state_, pending_action_, pending_reward_, cur_state_);
    pending_ = false;
  }
  const int actions = static_cast<int>(table_[cur_state_].size());
  cur_action_ = bernoulli(rng, exploration_now()) ? uniform_index(rng, actions) : greedy(cur_state_);
  if (cur_state_ == Busy) return {Pattern::Direct, -1, cur_action_};
  return {Pattern::RisAssisted, cur_action_ / m_count, cur_action_ % m_count};
}

void QLearningPlayer::observe(const Action& action, Feedback feedback, Rng&) {
  pending_ = true;
  pending_state_ = cur_state_;
  pending_action_ = cur_action_;
  pending_reward_ = feedback == Feedback::Success ? rates_[static_cast<std::size_t>(action.sf)] : 0.0;
  ++t_;
}

// ---------------------------------------------------------------------------

Action RandomPlayer::decide(std::span<const std::uint8_t> busy, Rng& rng) {
  const int j = uniform_index(rng, ris_count_ * sf_count_);
  const int k = j / sf_count_;
  if (busy[static_cast<std::size_t>(k)]) return {Pattern::Direct, -1, uniform_index(rng, sf_count_)};
  return {Pattern::RisAssisted, k, j % sf_count_};
}

Action OptimalPlayer::decide(std::span<const std::uint8_t> busy, Rng&) {
  if (ris_ >= 0 && !busy[static_cast<std::size_t>(ris_)]) return {Pattern::RisAssisted, ris_, ris_sf_};
  return {Pattern::Direct, -1, direct_sf_};
}

// ---------------------------------------------------------------------------

PolicySpec parse_policy(const std::string& name) {
  static const std::string fixed_prefix = "e2boost-fixed-eps:";
  if (name == "e2boost") return {PolicyKind::E2Boost, 0.0, name};
  if (name == "e2boost-no-ts") return {PolicyKind::E2BoostNoTs, 0.0, name};
  if (name == "got") return {PolicyKind::GoT, 0.0, name};
  if (name == "qlearning") return {PolicyKind::QLearning, 0.0, name};
  if (name == "random") return {PolicyKind::Random, 0.0, name};
  if (name == "optimal") return {PolicyKind::Optimal, 0.0, name};
  if (name.rfind(fixed_prefix, 0) == 0) {
    const std::string v = name.substr(fixed_prefix.size());
    std::size_t used = 0;
    double eps = 0.0;
    try {
      eps = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size() || !(eps >= 0.0 && eps <= 1.0))
      throw std::invalid_argument("policy '" + name + "': exploration rate must be a number in [0,1]");
    return {PolicyKind::E2BoostFixedEps, eps, name};
  }
  throw std::invalid_argument("unknown policy '" + name +
                              "' (expected e2boost, e2boost-no-ts, e2boost-fixed-eps:<v>, got, qlearning, random, optimal)");
}

}  // namespace e2boost
