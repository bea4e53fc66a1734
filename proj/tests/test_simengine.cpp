#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "e2boost/simengine.hpp"

using namespace e2boost;

namespace {

SuccessProbTable constant_table(const Scenario& s, double ris, double direct) {
  SuccessProbTable t;
  t.devices = s.device_count();
  t.riss = s.ris_count();
  t.sfs = s.sf_count();
  t.ris_assisted.assign(static_cast<std::size_t>(t.devices * t.riss * t.sfs), ris);
  t.direct.assign(static_cast<std::size_t>(t.devices * t.sfs), direct);
  t.raw_ris_assisted = t.ris_assisted;
  t.raw_direct = t.direct;
  return t;
}

Scenario single_device() {
  auto s = fig3_scenario();
  s.devices.resize(1);
  return s;
}

const Environment& fig3_env() {
  static const Environment env = [] {
    const auto s = fig3_scenario();
    return make_environment(s, estimate_success_probs(s, 20000, 1));
  }();
  return env;
}

TrialSpec small_spec(const std::string& policy, int epochs = 3) {
  TrialSpec t;
  t.policy = parse_policy(policy);
  t.e2boost.schedule = {200, 200, 50, 0};
  t.epochs = epochs;
  t.stride = 100;
  return t;
}

}  // namespace

TEST_CASE("two players on one RIS collide") {
  const auto s = fig3_scenario();
  const auto env = make_environment(s, constant_table(s, 1.0, 1.0));
  Rng rng(1);
  const std::vector<Action> a{{Pattern::RisAssisted, 0, 0}, {Pattern::RisAssisted, 0, 2}, {Pattern::Direct, -1, 1}};
  const auto o = resolve_slot(a, std::vector<std::uint8_t>(3, 0), env, false, rng);
  for (int n : {0, 1}) {
    CHECK(o[static_cast<std::size_t>(n)].collision);
    CHECK(o[static_cast<std::size_t>(n)].feedback == Feedback::Collision);
    CHECK(o[static_cast<std::size_t>(n)].reward == 0.0);
    CHECK(env.arm_of(o[static_cast<std::size_t>(n)]) == env.collision_arm());
  }
  CHECK_FALSE(o[2].collision);
  CHECK(o[2].feedback == Feedback::Success);
  CHECK(o[2].reward == doctest::Approx(0.625));
}

TEST_CASE("occupied RIS reports busy, not failure") {
  const auto s = fig3_scenario();
  const auto env = make_environment(s, constant_table(s, 0.0, 0.0));
  Rng rng(1);
  const std::vector<Action> a{{Pattern::RisAssisted, 1, 0}, {Pattern::RisAssisted, 1, 0}, {Pattern::RisAssisted, 2, 0}};
  const auto o = resolve_slot(a, std::vector<std::uint8_t>{0, 1, 0}, env, false, rng);
  CHECK(o[0].feedback == Feedback::Busy);
  CHECK(o[1].feedback == Feedback::Busy);
  CHECK_FALSE(o[0].collision);
  CHECK(env.arm_of(o[0]) == env.blocked_arm());
  CHECK(o[2].feedback == Feedback::Failure);
}

TEST_CASE("certain success pays the SF rate") {
  const auto s = single_device();
  const auto env = make_environment(s, constant_table(s, 1.0, 0.0));
  Rng rng(2);
  for (int m = 0; m < 6; ++m) {
    const std::vector<Action> a{{Pattern::RisAssisted, 2, m}};
    const auto o = resolve_slot(a, std::vector<std::uint8_t>(3, 0), env, false, rng);
    CHECK(o[0].feedback == Feedback::Success);
    CHECK(o[0].reward == env.rates_mbps[static_cast<std::size_t>(m)]);
  }
}

TEST_CASE("saturated occupancy sends all traffic over the direct link") {
  auto s = fig3_scenario();
  s.ris_active_prob.assign(3, 1.0);
  const auto env = make_environment(s, estimate_success_probs(s, 2000, 1));
  for (const char* p : {"e2boost", "e2boost-no-ts", "got", "qlearning", "random", "optimal"}) {
    const auto r = run_trial(env, small_spec(p, 2), 5);
    for (const auto& row : r.pulls) {
      for (int j = 0; j < env.riss() * env.sfs(); ++j) CHECK(row[static_cast<std::size_t>(j)] == 0);
      CHECK(row[static_cast<std::size_t>(env.collision_arm())] == 0);
      CHECK(row[static_cast<std::size_t>(env.blocked_arm())] == 0);
    }
  }
}

TEST_CASE("slot invariants under random play") {
  const auto& env = fig3_env();
  Rng rng(3), prng(4);
  const OccupancyProcess occ{env.scenario.ris_active_prob};
  RandomPlayer p(env.riss(), env.sfs());
  std::vector<std::uint8_t> busy;
  std::set<double> allowed{0.0};
  for (double c : env.rates_mbps) allowed.insert(c);
  for (int t = 0; t < 5000; ++t) {
    occ.sample(rng, busy);
    std::vector<Action> a;
    for (int n = 0; n < env.players(); ++n) a.push_back(p.decide(busy, prng));
    const auto o = resolve_slot(a, busy, env, false, rng);
    std::vector<int> served(3, 0);
    for (const auto& x : o) {
      CHECK(allowed.count(x.reward) == 1);
      if (x.action.pattern == Pattern::Direct) CHECK_FALSE(x.collision);
      if (x.action.pattern == Pattern::RisAssisted && !x.collision && x.feedback != Feedback::Busy)
        ++served[static_cast<std::size_t>(x.action.ris)];
      if (x.collision || x.feedback == Feedback::Busy) CHECK(x.reward == 0.0);
    }
    for (int v : served) CHECK(v <= 1);
  }
}

TEST_CASE("occupancy rate") {
  const OccupancyProcess occ{{0.2, 0.5, 0.0}};
  Rng rng(8);
  std::vector<std::uint8_t> busy;
  std::vector<double> c(3);
  const int n = 20000;
  for (int t = 0; t < n; ++t) {
    occ.sample(rng, busy);
    for (int k = 0; k < 3; ++k) c[static_cast<std::size_t>(k)] += busy[static_cast<std::size_t>(k)];
  }
  for (int k = 0; k < 2; ++k) {
    const double p = occ.active_prob[static_cast<std::size_t>(k)];
    CHECK(std::abs(c[static_cast<std::size_t>(k)] / n - p) <= 3 * std::sqrt(p * (1 - p) / n));
  }
  CHECK(c[2] == 0);
}

TEST_CASE("random policy throughput matches its expectation") {
  const auto s = single_device();
  const auto env = make_environment(s, estimate_success_probs(s, 20000, 2));
  const int K = env.riss(), M = env.sfs();
  double mean = 0, second = 0;
  for (int k = 0; k < K; ++k) {
    const double pa = s.ris_active_prob[static_cast<std::size_t>(k)];
    for (int m = 0; m < M; ++m) {
      const double c = env.rates_mbps[static_cast<std::size_t>(m)];
      const double w_ris = (1 - pa) / (K * M), w_dir = pa / (K * M);
      mean += w_ris * c * env.table.ris(0, k, m) + w_dir * c * env.table.dir(0, m);
      second += w_ris * c * c * env.table.ris(0, k, m) + w_dir * c * c * env.table.dir(0, m);
    }
  }
  TrialSpec spec = small_spec("random");
  spec.horizon = 40000;
  const auto r = run_trial(env, spec, 11);
  const double sd = std::sqrt((second - mean * mean) / 40000);
  CHECK(std::abs(r.realized_reward / 40000 - mean) <= 3 * sd);
  CHECK(std::abs(r.avg_throughput.back() - mean) <= 3 * sd);
}

TEST_CASE("full-channel slots agree with the success table") {
  const auto s = single_device();
  const auto env = make_environment(s, estimate_success_probs(s, 50000, 3), true);
  TrialSpec spec = small_spec("random");
  spec.horizon = 30000;
  const auto a = run_trial(env, spec, 21);
  spec.full_channel = true;
  const auto b = run_trial(env, spec, 22);
  const double T = 30000;
  // both realised rewards estimate the same mean; bound the per-slot variance by c_1^2
  const double sd = env.rates_mbps[0] / std::sqrt(T);
  CHECK(std::abs(a.realized_reward / T - b.realized_reward / T) <= 4 * std::sqrt(2.0) * sd);
}

TEST_CASE("trials are deterministic in the seed") {
  const auto& env = fig3_env();
  for (const char* p : {"e2boost", "got", "qlearning"}) {
    const auto a = run_trial(env, small_spec(p), 42);
    const auto b = run_trial(env, small_spec(p), 42);
    CHECK(a.pulls == b.pulls);
    CHECK(a.avg_throughput == b.avg_throughput);
    CHECK(a.pseudo_regret == b.pseudo_regret);
    const auto c = run_trial(env, small_spec(p), 43);
    CHECK(c.pulls != a.pulls);
  }
}

TEST_CASE("ledger invariants") {
  const auto& env = fig3_env();
  const auto spec = small_spec("e2boost");
  const auto r = run_trial(env, spec, 7);
  const auto T = spec.resolved_horizon();
  for (const auto& row : r.pulls) {
    std::uint64_t s = 0;
    for (auto v : row) s += v;
    CHECK(s == static_cast<std::uint64_t>(T));
  }
  CHECK(r.pseudo_regret.size() == checkpoints_for(spec).size());
  CHECK(r.pseudo_regret.back() == doctest::Approx(r.regret_from_pulls).epsilon(1e-9));
  CHECK(std::abs(r.regret_direct - r.regret_from_pulls) <= 1e-9 * std::max(1.0, std::abs(r.regret_from_pulls)));
}

TEST_CASE("checkpoints") {
  TrialSpec t;
  t.e2boost.schedule = {10, 10, 1, 0};
  t.epochs = 2;
  t.stride = 10;
  CHECK(checkpoints_for(t) == std::vector<std::int64_t>{10, 20, 22, 30, 40, 46});
  t.horizon = 25;
  CHECK(checkpoints_for(t) == std::vector<std::int64_t>{10, 20, 22, 25});
  t.horizon = 0;
  t.epochs = 0;
  CHECK(checkpoints_for(t).empty());
}

TEST_CASE("empty horizon gives an empty ledger") {
  auto spec = small_spec("e2boost", 0);
  const auto r = run_trial(fig3_env(), spec, 1);
  CHECK(r.avg_throughput.empty());
  CHECK(r.regret_from_pulls == 0.0);
  for (const auto& row : r.pulls) CHECK(std::all_of(row.begin(), row.end(), [](auto v) { return v == 0; }));
}

TEST_CASE("pseudo-regret") {
  SUBCASE("hand-made gaps") {
    Environment env;
    env.delta = {{0.0, 0.5}};
    CHECK(compute_pseudo_regret(env, {{0, 10}}) == 5.0);
    CHECK(compute_pseudo_regret(env, {{7, 0}}) == 0.0);
  }
  SUBCASE("the optimal profile has zero regret") {
    const auto r = run_trial(fig3_env(), small_spec("optimal"), 3);
    CHECK(r.regret_from_pulls == 0.0);
    CHECK(std::all_of(r.pseudo_regret.begin(), r.pseudo_regret.end(), [](double v) { return v == 0.0; }));
  }
  SUBCASE("non-decreasing when every gap is non-negative") {
    const auto s = single_device();
    const auto env = make_environment(s, estimate_success_probs(s, 5000, 4));
    for (const auto& row : env.delta)
      for (double d : row) REQUIRE(d >= -1e-15);
    const auto r = run_trial(env, small_spec("e2boost"), 9);
    CHECK(std::is_sorted(r.pseudo_regret.begin(), r.pseudo_regret.end()));
  }
}

TEST_CASE("aggregation") {
  SUBCASE("one repetition equals the trial") {
    const auto& env = fig3_env();
    MonteCarloSpec mc{small_spec("got"), 1, 5, 1, false, 1000, false};
    const auto res = run_monte_carlo(env, mc);
    const auto t = run_trial(env, mc.trial, derive_seed(5, 0));
    CHECK(res.mean_throughput == t.avg_throughput);
    CHECK(res.mean_regret == t.pseudo_regret);
    CHECK(std::all_of(res.stderr_throughput.begin(), res.stderr_throughput.end(), [](double v) { return v == 0; }));
  }
  SUBCASE("standard error shrinks like one over root n") {
    Rng rng(1);
    std::normal_distribution<double> g;
    auto avg_stderr = [&](int reps) {
      std::vector<std::vector<double>> series(static_cast<std::size_t>(reps), std::vector<double>(400));
      for (auto& s : series)
        for (auto& v : s) v = g(rng);
      std::vector<double> mean, se;
      aggregate_series(series, mean, se);
      double a = 0;
      for (double v : se) a += v;
      return a / 400;
    };
    const double s25 = avg_stderr(25), s400 = avg_stderr(400);
    CHECK(s25 == doctest::Approx(0.2).epsilon(0.03));
    CHECK(s25 / s400 == doctest::Approx(4.0).epsilon(0.05));
  }
  SUBCASE("mean and stderr by hand") {
    std::vector<double> m, se;
    aggregate_series({{1, 2}, {3, 2}, {5, 2}}, m, se);
    CHECK(m == std::vector<double>{3, 2});
    CHECK(se[0] == doctest::Approx(std::sqrt(4.0 / 3)));
    CHECK(se[1] == 0.0);
  }
}

TEST_CASE("Monte Carlo results do not depend on the worker count") {
  const auto& env = fig3_env();
  MonteCarloSpec mc{small_spec("e2boost", 2), 6, 77, 1, false, 1000, true};
  const auto a = run_monte_carlo(env, mc);
  mc.jobs = 4;
  const auto b = run_monte_carlo(env, mc);
  CHECK(a.mean_throughput == b.mean_throughput);
  CHECK(a.stderr_throughput == b.stderr_throughput);
  CHECK(a.mean_regret == b.mean_regret);
  CHECK(a.pulls == b.pulls);
  CHECK(a.trace_csv == b.trace_csv);
  CHECK(a.trace_csv.rfind(kTraceHeader, 0) == 0);
}

TEST_CASE("random-scenario mode re-estimates the optimum per trial") {
  MonteCarloSpec mc{small_spec("random", 1), 4, 3, 2, true, 500, false};
  const auto res = run_monte_carlo(fig3_env(), mc);
  std::set<double> optima;
  for (const auto& t : res.trials) optima.insert(t.optimal_value);
  CHECK(optima.size() == 4);
  mc.jobs = 1;
  const auto again = run_monte_carlo(fig3_env(), mc);
  CHECK(again.mean_throughput == res.mean_throughput);
}

TEST_CASE("clustered E2Boost keeps one full-mode device per cluster") {
  auto s = fig3_scenario();
  Rng rng(5);
  s.devices = sample_devices_in_disc(s.device_area, 7, s.min_device_distance, s.device_height, rng);
  const auto env = make_environment(s, estimate_success_probs(s, 2000, 1));
  const auto r = run_trial(env, small_spec("e2boost", 2), 1);
  CHECK(r.full_mode_mismatch == 0);
}
