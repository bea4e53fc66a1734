// Serial vs OpenMP kernels, plus one simulated slot-loop trial for scale.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "e2boost/channel.hpp"
#include "e2boost/kernels.hpp"
#include "e2boost/simengine.hpp"

using namespace e2boost;

namespace {

const Scenario& scenario() {
  static const Scenario s = fig3_scenario();
  return s;
}

template <bool Parallel>
void BM_LinkSums(benchmark::State& state) {
  const auto& s = scenario();
  const auto& g = s.riss[0];
  const auto phases = scenario_phase_shifts(s, 0).phases();
  for (auto _ : state) {
    const auto r = Parallel ? kernels::link_sums_parallel(g.elements, phases, s.bs, s.devices[0], s.radio, g.cols)
                            : kernels::link_sums_serial(g.elements, phases, s.bs, s.devices[0], s.radio, g.cols);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.elements.size()));
}

template <bool Parallel>
void BM_CountSuccesses(benchmark::State& state) {
  const auto& s = scenario();
  static const ChannelModel ch(s, false);
  const auto trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    const auto c = Parallel ? kernels::count_successes_parallel(ch.links(), s.radio, s.sf_table.thresholds, trials, 1)
                            : kernels::count_successes_serial(ch.links(), s.radio, s.sf_table.thresholds, trials, 1);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trials * ch.links().size()));
}

template <bool Parallel>
void BM_ElementwiseDraw(benchmark::State& state) {
  const auto& s = scenario();
  const auto& g = s.riss[1];
  const auto phases = scenario_phase_shifts(s, 1).phases();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto h = Parallel
                       ? kernels::elementwise_draw_parallel(g.elements, phases, s.bs, s.devices[1], s.radio, g.cols, ++seed)
                       : kernels::elementwise_draw_serial(g.elements, phases, s.bs, s.devices[1], s.radio, g.cols, ++seed);
    benchmark::DoNotOptimize(h);
  }
}

void BM_TrialE2Boost(benchmark::State& state) {
  const auto& s = scenario();
  static const Environment env = make_environment(s, estimate_success_probs(s, 20000, 1));
  TrialSpec spec;
  spec.policy = parse_policy("e2boost");
  spec.epochs = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_trial(env, spec, ++seed).regret_from_pulls);
  state.SetItemsProcessed(state.iterations() * spec.resolved_horizon());
}

}  // namespace

BENCHMARK(BM_LinkSums<false>)->Name("link_sums/serial");
BENCHMARK(BM_LinkSums<true>)->Name("link_sums/omp");
BENCHMARK(BM_CountSuccesses<false>)->Name("count_successes/serial")->Arg(20000);
BENCHMARK(BM_CountSuccesses<true>)->Name("count_successes/omp")->Arg(20000);
BENCHMARK(BM_ElementwiseDraw<false>)->Name("elementwise_draw/serial");
BENCHMARK(BM_ElementwiseDraw<true>)->Name("elementwise_draw/omp");
BENCHMARK(BM_TrialE2Boost)->Name("trial/e2boost")->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
