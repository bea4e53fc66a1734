#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "e2boost/channel.hpp"
#include "e2boost/kernels.hpp"

using namespace e2boost;

// The OpenMP kernels must agree bit for bit with their serial references.

TEST_CASE("link sums: parallel equals serial") {
  const auto s = fig3_scenario();
  for (int k = 0; k < s.ris_count(); ++k) {
    const auto& g = s.riss[static_cast<std::size_t>(k)];
    const auto phases = scenario_phase_shifts(s, k).phases();
    for (const auto& dev : s.devices) {
      const auto a = kernels::link_sums_serial(g.elements, phases, s.bs, dev, s.radio, g.cols);
      const auto b = kernels::link_sums_parallel(g.elements, phases, s.bs, dev, s.radio, g.cols);
      CHECK(a.los_sum == b.los_sum);
      CHECK(a.los_magnitude_sum == b.los_magnitude_sum);
      CHECK(a.nlos_power == b.nlos_power);
    }
  }
}

TEST_CASE("success counting: parallel equals serial across block boundaries") {
  const auto s = fig3_scenario();
  const ChannelModel ch(s, false);
  for (std::uint64_t trials : {1ull, 2047ull, 2048ull, 2049ull, 10000ull}) {
    const auto a = kernels::count_successes_serial(ch.links(), s.radio, s.sf_table.thresholds, trials, 77);
    const auto b = kernels::count_successes_parallel(ch.links(), s.radio, s.sf_table.thresholds, trials, 77);
    CHECK(a == b);
    for (std::size_t l = 0; l < ch.links().size(); ++l)
      for (int m = 1; m < s.sf_count(); ++m)  // easier thresholds never count fewer successes
        CHECK(a[l * 6 + static_cast<std::size_t>(m)] >= a[l * 6 + static_cast<std::size_t>(m - 1)]);
  }
}

TEST_CASE("element-wise draw: parallel equals serial") {
  const auto s = fig3_scenario();
  const auto& g = s.riss[1];
  const auto phases = scenario_phase_shifts(s, 1).phases();
  for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
    const auto a = kernels::elementwise_draw_serial(g.elements, phases, s.bs, s.devices[1], s.radio, g.cols, seed);
    const auto b = kernels::elementwise_draw_parallel(g.elements, phases, s.bs, s.devices[1], s.radio, g.cols, seed);
    CHECK(a == b);
  }
}

TEST_CASE("table estimation does not depend on the parallel flag") {
  const auto s = fig3_scenario();
  const auto a = estimate_success_probs(s, 5000, 12, false);
  const auto b = estimate_success_probs(s, 5000, 12, true);
  CHECK(a.raw_ris_assisted == b.raw_ris_assisted);
  CHECK(a.raw_direct == b.raw_direct);
}
