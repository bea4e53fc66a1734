#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "e2boost/baselines.hpp"

using namespace e2boost;

namespace {

const std::vector<double> kRates{1.09375, 0.625, 0.3515625, 0.1953125, 0.107421875, 0.05859375};

AssignmentMatrix random_instance(Rng& rng, int n, int k, int m, bool with_direct, bool dyadic) {
  AssignmentMatrix a{n, k, m, {}, {}};
  auto draw = [&] {
    const double v = uniform01(rng) * 2;
    return dyadic ? std::round(v * 1024) / 1024 : v;
  };
  a.value.resize(static_cast<std::size_t>(n * k * m));
  for (auto& v : a.value) v = draw();
  if (with_direct) {
    a.direct.resize(static_cast<std::size_t>(n));
    for (auto& v : a.direct) v = draw() * 0.5;
  }
  return a;
}

double profile_value(const AssignmentMatrix& a, const AssignmentResult& r) {
  double t = 0;
  for (int n = 0; n < a.players; ++n) {
    const auto i = static_cast<std::size_t>(n);
    t += r.ris[i] < 0 ? a.direct[i] : a.at(n, r.ris[i], r.sf[i]);
  }
  return t;
}

}  // namespace

TEST_CASE("assignment: small cases") {
  SUBCASE("one by one") {
    const AssignmentMatrix a{1, 1, 1, {0.7}, {}};
    const auto r = hungarian_assign(a);
    CHECK(r.ris == std::vector<int>{0});
    CHECK(r.total == 0.7);
  }
  SUBCASE("diagonal") {
    const AssignmentMatrix a{2, 2, 1, {1, 0, 0, 1}, {}};
    const auto r = hungarian_assign(a);
    CHECK(r.ris == std::vector<int>{0, 1});
    CHECK(r.total == 2.0);
  }
  SUBCASE("anti-diagonal with SF choice") {
    // player 0 prefers RIS 1 / SF 1, player 1 RIS 0 / SF 0
    const AssignmentMatrix a{2, 2, 2, {0.1, 0.2, 0.3, 0.9, 0.8, 0.1, 0.2, 0.2}, {}};
    const auto r = hungarian_assign(a);
    CHECK(r.ris == std::vector<int>{1, 0});
    CHECK(r.sf == std::vector<int>{1, 0});
    CHECK(r.total == doctest::Approx(1.7));
  }
  SUBCASE("more players than RISs needs direct values") {
    const AssignmentMatrix a{3, 2, 1, {1, 1, 1, 1, 1, 1}, {}};
    CHECK_THROWS_AS(hungarian_assign(a), std::invalid_argument);
    AssignmentMatrix b = a;
    b.direct = {0.5, 0.2, 0.1};
    const auto r = hungarian_assign(b);
    CHECK(r.ris[0] == -1);
    CHECK(r.sf[0] == -1);
    CHECK(r.total == doctest::Approx(2.5));
  }
  SUBCASE("direct beats every RIS") {
    const AssignmentMatrix a{1, 2, 1, {0.1, 0.2}, {0.9}};
    CHECK(hungarian_assign(a).ris == std::vector<int>{-1});
  }
}

TEST_CASE("assignment matches exhaustive search") {
  Rng rng(2025);
  int checked = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + uniform_index(rng, 4);
    const int k = 1 + uniform_index(rng, 4);
    const int m = 1 + uniform_index(rng, 3);
    const bool direct = n > k || uniform01(rng) < 0.5;
    for (bool dyadic : {true, false}) {
      const auto a = random_instance(rng, n, k, m, direct, dyadic);
      const auto h = hungarian_assign(a);
      const auto b = brute_force_assign(a);
      if (dyadic) CHECK(h.total == b.total);  // grid values make every sum exact
      else CHECK(h.total == doctest::Approx(b.total).epsilon(1e-12));
      CHECK(profile_value(a, h) == doctest::Approx(h.total).epsilon(1e-12));
      std::vector<int> used;
      for (int r : h.ris)
        if (r >= 0) used.push_back(r);
      std::sort(used.begin(), used.end());
      CHECK(std::adjacent_find(used.begin(), used.end()) == used.end());
      ++checked;
    }
  }
  CHECK(checked == 400);
}

TEST_CASE("three players, three RISs, six SFs against the 1296-case enumeration") {
  Rng rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = random_instance(rng, 3, 3, 6, false, false);
    double best = -1;
    for (int r0 = 0; r0 < 3; ++r0)
      for (int r1 = 0; r1 < 3; ++r1)
        for (int r2 = 0; r2 < 3; ++r2) {
          if (r0 == r1 || r0 == r2 || r1 == r2) continue;
          for (int m0 = 0; m0 < 6; ++m0)
            for (int m1 = 0; m1 < 6; ++m1)
              for (int m2 = 0; m2 < 6; ++m2)
                best = std::max(best, a.at(0, r0, m0) + a.at(1, r1, m1) + a.at(2, r2, m2));
        }
    CHECK(hungarian_assign(a).total == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("genie SF") {
  const std::vector<double> theta{0.1, 0.3, 0.5, 0.7, 0.9, 0.99};
  // scores 0.109, 0.1875, 0.176, 0.137, 0.097, 0.058
  CHECK(genie_optimal_sf(theta, kRates) == 1);
  CHECK(genie_optimal_sf(std::vector<double>(6, 0.4), kRates) == 0);
  CHECK(genie_optimal_sf(std::vector<double>{0.3}, std::vector<double>{2.0}) == 0);
  CHECK(genie_optimal_sf(std::vector<double>(6, 0.0), kRates) == 0);
}

TEST_CASE("expected value matrix") {
  SuccessProbTable t;
  t.devices = 1;
  t.riss = 2;
  t.sfs = 2;
  t.ris_assisted = {0.5, 0.9, 0.2, 0.4};
  t.direct = {0.1, 0.8};
  const std::vector<double> rates{2.0, 1.0};
  const auto a = expected_value_matrix(t, rates, std::vector<double>{0.0, 0.5});
  CHECK(a.direct[0] == doctest::Approx(0.8));
  CHECK(a.at(0, 0, 0) == doctest::Approx(1.0));
  CHECK(a.at(0, 0, 1) == doctest::Approx(0.9));
  CHECK(a.at(0, 1, 0) == doctest::Approx(0.5 * 0.4 + 0.5 * 0.8));
}

TEST_CASE("joint arm space") {
  JointArmPlayer p(3, kRates, {});
  CHECK(p.arms() == 18);
  Rng rng(1);
  std::vector<int> seen(18);
  const std::vector<std::uint8_t> idle(3, 0);
  for (int i = 0; i < 5000; ++i) {
    const auto a = p.decide(idle, rng);
    seen[static_cast<std::size_t>(a.ris * 6 + a.sf)] = 1;
  }
  CHECK(std::count(seen.begin(), seen.end(), 1) == 18);
}

TEST_CASE("GoT exploits one arm per epoch") {
  JointArmConfig cfg;
  cfg.schedule = {40, 40, 5, 0};
  JointArmPlayer p(3, kRates, cfg);
  Rng rng(4);
  const std::vector<std::uint8_t> idle(3, 0);
  for (int t = 0; t < cfg.schedule.total_slots(4); ++t) {
    const bool exploit = p.phase() == EpochPhase::Exploit;
    const auto a = p.decide(idle, rng);
    if (exploit) {
      CHECK(a.ris * 6 + a.sf == p.best_arm());
    }
    p.observe(a, bernoulli(rng, 0.6) ? Feedback::Success : Feedback::Failure, rng);
  }
  CHECK(p.epoch() == 5);
  CHECK(p.explore_epsilon() == 1.0);
}

TEST_CASE("with one SF and full exploration GoT and E2Boost play the same game") {
  const std::vector<double> rate{1.0};
  const std::vector<double> theta{0.3, 0.8, 0.5};
  EpochSchedule sched{30, 30, 4, 0};
  E2BoostConfig ecfg{sched, 0.01, 1.4, 1.0};
  JointArmConfig gcfg{sched, 0.01, 1.4, false};
  E2BoostPlayer e(3, rate, ecfg);
  JointArmPlayer g(3, rate, gcfg);
  Rng re(99), rg(99), env_e(5), env_g(5);
  const std::vector<std::uint8_t> idle(3, 0);
  int game_slots = 0;
  for (std::int64_t t = 0; t < sched.total_slots(5); ++t) {
    REQUIRE(e.phase() == g.phase());
    const bool game = e.phase() == EpochPhase::Game;
    const auto ae = e.decide(idle, re);
    const auto ag = g.decide(idle, rg);
    REQUIRE(ae == ag);
    if (game) {
      ++game_slots;
      CHECK(e.game().baseline == g.game().baseline);
      CHECK(e.game().mood == g.game().mood);
    }
    const auto p = theta[static_cast<std::size_t>(ae.ris)];
    e.observe(ae, bernoulli(env_e, p) ? Feedback::Success : Feedback::Failure, re);
    g.observe(ag, bernoulli(env_g, p) ? Feedback::Success : Feedback::Failure, rg);
  }
  CHECK(game_slots == 150);
  CHECK(e.history().epoch(5) == g.history().epoch(5));
  CHECK(e.best_ris() == g.best_arm());
}

TEST_CASE("Q-learning") {
  SUBCASE("first update") {
    QLearningPlayer q(1, {1.0, 0.5}, {0.1, 0.0, 0.1, 0});
    q.update(QLearningPlayer::Idle, 1, 3.0, QLearningPlayer::Idle);
    CHECK(q.q(QLearningPlayer::Idle, 1) == doctest::Approx(0.3));
    CHECK(q.greedy(QLearningPlayer::Idle) == 1);
  }
  SUBCASE("two-state chain reaches the Bellman fixed point") {
    // Idle: a0 pays 1 and stays, a1 pays 0 and moves to Busy.
    // Busy: a0 pays 2 and returns to Idle, a1 pays 0 and stays.
    // With discount 0.9: V(I) = 10, V(B) = 11, Q = {10, 9.9; 11, 9.9}.
    QLearningPlayer q(1, {1.0, 0.5}, {0.1, 0.9, 0.0, 0});
    using S = QLearningPlayer::State;
    const double reward[2][2] = {{1, 0}, {2, 0}};
    const S next[2][2] = {{S::Idle, S::Busy}, {S::Idle, S::Busy}};
    for (int sweep = 0; sweep < 3000; ++sweep)
      for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a) q.update(static_cast<S>(s), a, reward[s][a], next[s][a]);
    CHECK(q.q(S::Idle, 0) == doctest::Approx(10.0).epsilon(0.01));
    CHECK(q.q(S::Idle, 1) == doctest::Approx(9.9).epsilon(0.01));
    CHECK(q.q(S::Busy, 0) == doctest::Approx(11.0).epsilon(0.01));
    CHECK(q.q(S::Busy, 1) == doctest::Approx(9.9).epsilon(0.01));
    CHECK(q.greedy(S::Idle) == 0);
  }
  SUBCASE("exploration decays") {
    QLearningPlayer q(2, kRates);
    CHECK(q.exploration_now() == 0.1);
    Rng rng(1);
    const std::vector<std::uint8_t> idle(2, 0);
    for (int t = 0; t < 10000; ++t) q.observe(q.decide(idle, rng), Feedback::Failure, rng);
    CHECK(q.exploration_now() == doctest::Approx(0.05));
  }
  SUBCASE("busy target switches to the direct link") {
    QLearningPlayer q(2, kRates, {0.1, 0.9, 0.0, 0});
    Rng rng(1);
    const auto a = q.decide(std::vector<std::uint8_t>{1, 0}, rng);  // greedy idle action targets RIS 0
    CHECK(a.pattern == Pattern::Direct);
  }
}

TEST_CASE("random player is uniform over the joint arms") {
  RandomPlayer p(3, 6);
  Rng rng(17);
  const int n = 10000;
  std::vector<double> c(18);
  const std::vector<std::uint8_t> idle(3, 0);
  for (int i = 0; i < n; ++i) {
    const auto a = p.decide(idle, rng);
    c[static_cast<std::size_t>(a.ris * 6 + a.sf)] += 1;
  }
  double chi2 = 0;
  const double e = n / 18.0;
  for (double v : c) chi2 += (v - e) * (v - e) / e;
  CHECK(chi2 < 33.409);  // 99% quantile, 17 degrees of freedom

  RandomPlayer one(1, 1);
  CHECK(one.decide(std::vector<std::uint8_t>{0}, rng) == Action{Pattern::RisAssisted, 0, 0});
}

TEST_CASE("optimal player") {
  OptimalPlayer p(1, 2, 4);
  Rng rng(1);
  CHECK(p.decide(std::vector<std::uint8_t>{0, 0}, rng) == Action{Pattern::RisAssisted, 1, 2});
  CHECK(p.decide(std::vector<std::uint8_t>{0, 1}, rng) == Action{Pattern::Direct, -1, 4});
  OptimalPlayer d(-1, -1, 3);
  CHECK(d.decide(std::vector<std::uint8_t>{0, 0}, rng) == Action{Pattern::Direct, -1, 3});
}

TEST_CASE("policy names") {
  CHECK(parse_policy("e2boost").kind == PolicyKind::E2Boost);
  CHECK(parse_policy("got").kind == PolicyKind::GoT);
  CHECK(parse_policy("e2boost-no-ts").kind == PolicyKind::E2BoostNoTs);
  const auto f = parse_policy("e2boost-fixed-eps:0.25");
  CHECK(f.kind == PolicyKind::E2BoostFixedEps);
  CHECK(f.fixed_epsilon == 0.25);
  CHECK_THROWS_AS(parse_policy("e2boost-fixed-eps:1.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_policy("e2boost-fixed-eps:x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_policy("ucb"), std::invalid_argument);
}
