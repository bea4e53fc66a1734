#include "e2boost/simengine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "e2boost/bandit/clustering.hpp"

namespace e2boost {

const char* to_string(Feedback f) {
  switch (f) {
    case Feedback::Success: return "success";
    case Feedback::Failure: return "failure";
    case Feedback::Collision: return "collision";
    case Feedback::Busy: return "busy";
  }
  return "?";
}

const char* to_string(Pattern p) { return p == Pattern::RisAssisted ? "ris" : "direct"; }

void OccupancyProcess::sample(Rng& rng, std::vector<std::uint8_t>& busy) const {
  busy.resize(active_prob.size());
  for (std::size_t k = 0; k < active_prob.size(); ++k) busy[k] = bernoulli(rng, active_prob[k]) ? 1 : 0;
}

int Environment::arm_of(const PlayerOutcome& o) const {
  if (o.feedback == Feedback::Busy) return blocked_arm();
  if (o.collision) return collision_arm();
  if (o.action.pattern == Pattern::Direct) return riss() * sfs() + o.action.sf;
  return o.action.ris * sfs() + o.action.sf;
}

Environment make_environment(Scenario s, SuccessProbTable table, bool with_channel) {
  Environment env;
  env.scenario = std::move(s);
  env.table = std::move(table);
  const int n_count = env.players(), k_count = env.riss(), m_count = env.sfs();
  if (env.table.devices != n_count || env.table.riss != k_count || env.table.sfs != m_count)
    throw std::invalid_argument("success table dimensions do not match the scenario");
  for (double r : env.scenario.sf_table.rates) env.rates_mbps.push_back(r / 1e6);

  env.values = expected_value_matrix(env.table, env.rates_mbps, env.scenario.ris_active_prob);
  env.optimum = hungarian_assign(env.values);
  env.optimal_value = env.optimum.total;

  env.mu.assign(static_cast<std::size_t>(n_count), std::vector<double>(static_cast<std::size_t>(env.arm_count()), 0.0));
  env.delta = env.mu;
  for (int n = 0; n < n_count; ++n) {
    std::vector<double> direct_theta(static_cast<std::size_t>(m_count));
    for (int m = 0; m < m_count; ++m) direct_theta[static_cast<std::size_t>(m)] = env.table.dir(n, m);
    const int gsf = genie_optimal_sf(direct_theta, env.rates_mbps);
    env.genie_direct_sf.push_back(gsf);
    const double best_direct = env.rates_mbps[static_cast<std::size_t>(gsf)] * env.table.dir(n, gsf);
    const int ok = env.optimum.ris[static_cast<std::size_t>(n)];
    const double best_ris =
        ok >= 0 ? env.rates_mbps[static_cast<std::size_t>(env.optimum.sf[static_cast<std::size_t>(n)])] *
                      env.table.ris(n, ok, env.optimum.sf[static_cast<std::size_t>(n)])
                : best_direct;
    auto& mu = env.mu[static_cast<std::size_t>(n)];
    auto& d = env.delta[static_cast<std::size_t>(n)];
    for (int k = 0; k < k_count; ++k)
      for (int m = 0; m < m_count; ++m) {
        const auto i = static_cast<std::size_t>(k * m_count + m);
        mu[i] = env.rates_mbps[static_cast<std::size_t>(m)] * env.table.ris(n, k, m);
        d[i] = best_ris - mu[i];
      }
    for (int m = 0; m < m_count; ++m) {
      const auto i = static_cast<std::size_t>(k_count * m_count + m);
      mu[i] = env.rates_mbps[static_cast<std::size_t>(m)] * env.table.dir(n, m);
      d[i] = best_direct - mu[i];
    }
    d[static_cast<std::size_t>(env.collision_arm())] = best_ris;
    d[static_cast<std::size_t>(env.blocked_arm())] = best_direct;
  }
  if (with_channel) env.channel = std::make_shared<const ChannelModel>(env.scenario, false);
  return env;
}

double success_probability(const Environment& env, int player, const Action& a) {
  return a.pattern == Pattern::Direct ? env.table.dir(player, a.sf) : env.table.ris(player, a.ris, a.sf);
}

std::vector<PlayerOutcome> resolve_slot(std::span<const Action> actions, std::span<const std::uint8_t> busy,
                                        const Environment& env, bool full_channel, Rng& rng) {
  std::vector<int> load(static_cast<std::size_t>(env.riss()), 0);
  for (const auto& a : actions)
    if (a.pattern == Pattern::RisAssisted) ++load[static_cast<std::size_t>(a.ris)];

  const auto& thresholds = env.scenario.sf_table.thresholds;
  std::vector<PlayerOutcome> out(actions.size());
  for (std::size_t n = 0; n < actions.size(); ++n) {
    auto& o = out[n];
    o.action = actions[n];
    if (o.action.pattern == Pattern::RisAssisted) {
      const auto k = static_cast<std::size_t>(o.action.ris);
      if (busy[k]) {
        o.feedback = Feedback::Busy;
        continue;
      }
      if (load[k] > 1) {
        o.collision = true;
        o.feedback = Feedback::Collision;
        continue;
      }
    }
    bool ok = false;
    if (full_channel) {
      if (!env.channel) throw std::logic_error("per-slot channel sampling needs an environment built with a channel");
      const int dev = static_cast<int>(n);
      const double sinr = o.action.pattern == Pattern::Direct ? env.channel->sample_direct_sinr(dev, rng)
                                                              : env.channel->sample_ris_sinr(dev, o.action.ris, rng);
      ok = sinr >= thresholds[static_cast<std::size_t>(o.action.sf)];
    } else {
      ok = bernoulli(rng, success_probability(env, static_cast<int>(n), o.action));
    }
    o.feedback = ok ? Feedback::Success : Feedback::Failure;
    o.reward = ok ? env.rates_mbps[static_cast<std::size_t>(o.action.sf)] : 0.0;
  }
  return out;
}

std::vector<std::int64_t> checkpoints_for(const TrialSpec& spec) {
  const std::int64_t T = spec.resolved_horizon();
  std::vector<std::int64_t> cp;
  if (T <= 0) return cp;
  if (spec.stride > 0)
    for (std::int64_t t = spec.stride; t <= T; t += spec.stride) cp.push_back(t);
  for (std::int64_t e : spec.e2boost.schedule.epoch_ends(spec.epochs))
    if (e <= T) cp.push_back(e);
  cp.push_back(T);
  std::sort(cp.begin(), cp.end());
  cp.erase(std::unique(cp.begin(), cp.end()), cp.end());
  return cp;
}

std::vector<std::unique_ptr<Policy>> make_players(const Environment& env, const TrialSpec& spec, Rng& setup_rng) {
  const int n_count = env.players(), k_count = env.riss(), m_count = env.sfs();
  std::vector<std::unique_ptr<Policy>> players;
  const auto& p = spec.policy;
  const bool e2boost_like = p.kind == PolicyKind::E2Boost || p.kind == PolicyKind::E2BoostFixedEps;

  E2BoostConfig e2 = spec.e2boost;
  if (p.kind == PolicyKind::E2BoostFixedEps) e2.fixed_explore = p.fixed_epsilon;

  if (e2boost_like && n_count > k_count) {
    const auto schedule = cluster_round_robin(env.scenario.devices, k_count, setup_rng);
    for (int n = 0; n < n_count; ++n) {
      const int c = schedule.cluster_of(n);
      players.push_back(std::make_unique<RoundRobinE2Boost>(E2BoostPlayer(k_count, env.rates_mbps, e2),
                                                            schedule.rank_of(n),
                                                            static_cast<int>(schedule.members(c).size())));
    }
    return players;
  }
  for (int n = 0; n < n_count; ++n) {
    switch (p.kind) {
      case PolicyKind::E2Boost:
      case PolicyKind::E2BoostFixedEps:
        players.push_back(std::make_unique<E2BoostPlayer>(k_count, env.rates_mbps, e2));
        break;
      case PolicyKind::GoT:
      case PolicyKind::E2BoostNoTs: {
        JointArmConfig jc{spec.e2boost.schedule, spec.e2boost.game_epsilon, spec.e2boost.nu,
                          p.kind == PolicyKind::E2BoostNoTs};
        players.push_back(std::make_unique<JointArmPlayer>(k_count, env.rates_mbps, jc));
        break;
      }
      case PolicyKind::QLearning:
        players.push_back(std::make_unique<QLearningPlayer>(k_count, env.rates_mbps, spec.qlearning));
        break;
      case PolicyKind::Random:
        players.push_back(std::make_unique<RandomPlayer>(k_count, m_count));
        break;
      case PolicyKind::Optimal: {
        const auto i = static_cast<std::size_t>(n);
        players.push_back(std::make_unique<OptimalPlayer>(env.optimum.ris[i], env.optimum.sf[i],
                                                          env.genie_direct_sf[i]));
        break;
      }
    }
  }
  return players;
}

TrialResult run_trial(const Environment& env, const TrialSpec& spec, std::uint64_t trial_seed,
                      const TraceSink& trace) {
  const int n_count = env.players();
  const std::int64_t T = spec.resolved_horizon();
  const auto cps = checkpoints_for(spec);
  const auto ends = spec.e2boost.schedule.epoch_ends(spec.epochs);
  const std::int64_t final_epoch_start = ends.size() >= 2 ? ends[ends.size() - 2] : 0;

  Rng env_rng = make_rng(trial_seed, 0);
  Rng setup_rng = make_rng(trial_seed, 1);
  std::vector<Rng> rngs;
  for (int n = 0; n < n_count; ++n) rngs.push_back(make_rng(trial_seed, 2 + static_cast<std::uint64_t>(n)));
  auto players = make_players(env, spec, setup_rng);

  const OccupancyProcess occ{env.scenario.ris_active_prob};
  const bool clustered = n_count > env.riss() &&
                         (spec.policy.kind == PolicyKind::E2Boost || spec.policy.kind == PolicyKind::E2BoostFixedEps);
  const int expected_full = clustered ? env.riss() : n_count;

  TrialResult r;
  r.pulls.assign(static_cast<std::size_t>(n_count), std::vector<std::uint64_t>(static_cast<std::size_t>(env.arm_count()), 0));
  r.final_epoch_pulls = r.pulls;
  std::vector<std::uint8_t> busy;
  std::vector<Action> actions(static_cast<std::size_t>(n_count));
  double cum_mu = 0.0;
  std::size_t next_cp = 0;

  for (std::int64_t t = 0; t < T; ++t) {
    occ.sample(env_rng, busy);
    int full = 0;
    for (int n = 0; n < n_count; ++n) {
      actions[static_cast<std::size_t>(n)] = players[static_cast<std::size_t>(n)]->decide(busy, rngs[static_cast<std::size_t>(n)]);
      full += players[static_cast<std::size_t>(n)]->full_mode() ? 1 : 0;
    }
    if (full != expected_full) ++r.full_mode_mismatch;
    const auto outcome = resolve_slot(actions, busy, env, spec.full_channel, env_rng);
    for (int n = 0; n < n_count; ++n) {
      const auto i = static_cast<std::size_t>(n);
      players[i]->observe(actions[i], outcome[i].feedback, rngs[i]);
      const int arm = env.arm_of(outcome[i]);
      const auto a = static_cast<std::size_t>(arm);
      ++r.pulls[i][a];
      if (t >= final_epoch_start) ++r.final_epoch_pulls[i][a];
      // collision and blocked arms carry mu = 0
      cum_mu += env.mu[i][a];
      r.regret_direct += env.delta[i][a];
      r.realized_reward += outcome[i].reward;
      if (trace) trace(t + 1, n, outcome[i]);
    }
    if (next_cp < cps.size() && t + 1 == cps[next_cp]) {
      r.avg_throughput.push_back(cum_mu / static_cast<double>(t + 1));
      r.pseudo_regret.push_back(r.regret_direct);
      ++next_cp;
    }
  }
  r.regret_from_pulls = compute_pseudo_regret(env, r.pulls);
  return r;
}

double compute_pseudo_regret(const Environment& env, const std::vector<std::vector<std::uint64_t>>& pulls) {
  double total = 0.0;
  for (std::size_t n = 0; n < pulls.size(); ++n)
    for (std::size_t a = 0; a < pulls[n].size(); ++a) total += env.delta[n][a] * static_cast<double>(pulls[n][a]);
  return total;
}

void aggregate_series(const std::vector<std::vector<double>>& series, std::vector<double>& mean,
                      std::vector<double>& stderr_out) {
  mean.clear();
  stderr_out.clear();
  if (series.empty()) return;
  const std::size_t len = series[0].size();
  const double r = static_cast<double>(series.size());
  mean.assign(len, 0.0);
  stderr_out.assign(len, 0.0);
  for (const auto& s : series)
    for (std::size_t i = 0; i < len; ++i) mean[i] += s[i];
  for (double& m : mean) m /= r;
  if (series.size() < 2) return;
  for (const auto& s : series)
    for (std::size_t i = 0; i < len; ++i) stderr_out[i] += (s[i] - mean[i]) * (s[i] - mean[i]);
  for (double& v : stderr_out) v = std::sqrt(v / (r - 1.0) / r);
}

std::string trace_row(std::int64_t slot, int player, const PlayerOutcome& o) {
  std::ostringstream os;
  os.precision(17);
  os << slot << ',' << player << ',' << to_string(o.action.pattern) << ',' << o.action.ris << ',' << o.action.sf
     << ',' << (o.collision ? 1 : 0) << ',' << to_string(o.feedback) << ',' << o.reward;
  return os.str();
}

namespace {

int top_arm(const std::vector<std::uint64_t>& pulls) {
  return static_cast<int>(std::max_element(pulls.begin(), pulls.end()) - pulls.begin());
}

}  // namespace

MonteCarloResult run_monte_carlo(const Environment& env, const MonteCarloSpec& spec) {
  if (spec.repetitions < 1) throw std::invalid_argument("run_monte_carlo: need at least one repetition");
  const int reps = spec.repetitions;
  std::vector<TrialResult> results(static_cast<std::size_t>(reps));
  std::vector<double> optimal(static_cast<std::size_t>(reps), env.optimal_value);
  std::string trace_csv;
  const bool with_channel = spec.trial.full_channel;

  auto run_one = [&](int i) {
    const std::uint64_t trial_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(i));
    std::optional<Environment> local;
    if (spec.random_scenario) {
      Scenario s = env.scenario;
      Rng placement = make_rng(trial_seed, 0x5CE7A210ULL);
      s.devices = sample_devices_in_disc(s.device_area, s.device_count(), s.min_device_distance, s.device_height,
                                         placement);
      auto table = estimate_success_probs(s, spec.oracle_trials, derive_seed(trial_seed, 0x0AC1EULL), false);
      local = make_environment(std::move(s), std::move(table), with_channel);
    }
    const Environment& e = local ? *local : env;
    optimal[static_cast<std::size_t>(i)] = e.optimal_value;
    if (i == 0 && spec.want_trace) {
      std::ostringstream os;
      os << kTraceHeader << '\n';
      results[0] = run_trial(e, spec.trial, trial_seed,
                             [&os](std::int64_t t, int n, const PlayerOutcome& o) { os << trace_row(t, n, o) << '\n'; });
      trace_csv = os.str();
    } else {
      results[static_cast<std::size_t>(i)] = run_trial(e, spec.trial, trial_seed);
    }
  };

  const int jobs = std::max(1, spec.jobs);
  std::string error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs) if (jobs > 1)
  for (int i = 0; i < reps; ++i) {
    try {
      run_one(i);
    } catch (const std::exception& ex) {
#pragma omp critical(e2boost_mc_error)
      if (error.empty()) error = ex.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);

  MonteCarloResult out;
  out.checkpoints = checkpoints_for(spec.trial);
  out.trace_csv = std::move(trace_csv);
  std::vector<std::vector<double>> thr, reg;
  for (const auto& r : results) {
    thr.push_back(r.avg_throughput);
    reg.push_back(r.pseudo_regret);
  }
  std::vector<double> unused;
  aggregate_series(thr, out.mean_throughput, out.stderr_throughput);
  aggregate_series(reg, out.mean_regret, unused);

  out.pulls.assign(static_cast<std::size_t>(env.players()),
                   std::vector<std::uint64_t>(static_cast<std::size_t>(env.arm_count()), 0));
  double opt_sum = 0.0;
  for (int i = 0; i < reps; ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    for (std::size_t n = 0; n < r.pulls.size(); ++n)
      for (std::size_t a = 0; a < r.pulls[n].size(); ++a) out.pulls[n][a] += r.pulls[n][a];
    TrialSummary s;
    s.final_throughput = r.avg_throughput.empty() ? 0.0 : r.avg_throughput.back();
    s.final_regret = r.regret_from_pulls;
    s.regret_direct = r.regret_direct;
    s.optimal_value = optimal[static_cast<std::size_t>(i)];
    for (const auto& p : r.final_epoch_pulls) s.final_epoch_top_arm.push_back(top_arm(p));
    s.full_mode_mismatch = r.full_mode_mismatch;
    out.trials.push_back(std::move(s));
    opt_sum += optimal[static_cast<std::size_t>(i)];
  }
  out.optimal_value = opt_sum / reps;
  return out;
}

}  // namespace e2boost
