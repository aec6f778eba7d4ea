#include <benchmark/benchmark.h>

#include <random>

#include "hems/data_pipeline.hpp"
#include "hems/dqn.hpp"
#include "hems/goexplore.hpp"
#include "hems/neuralnet.hpp"
#include "hems/oracle.hpp"
#include "hems/ppo.hpp"
#include "hems/training_env.hpp"

using namespace hems;

namespace {

DayProfile bench_day() { return synth_generate(7, 1)[0]; }

void BM_EnvEpisode(benchmark::State& state) {
  const DayProfile day = bench_day();
  const ApplianceSpec spec;
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> coin(0, 1);
  for (auto _ : state) {
    EnvState s = reset_episode(day, spec);
    double cost = 0.0;
    while (s.hour < day.hours()) {
      const StepOutcome out = step(s, coin(rng), day, spec);
      cost += -out.reward;
      s = out.next_state;
    }
    benchmark::DoNotOptimize(cost);
  }
  state.SetItemsProcessed(state.iterations() * day.hours());
}
BENCHMARK(BM_EnvEpisode);

void BM_OracleSolveDay(benchmark::State& state) {
  const DayProfile day = bench_day();
  const ApplianceSpec spec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_day(day, spec).optimal_cost);
  }
}
BENCHMARK(BM_OracleSolveDay);

void BM_Phase1(benchmark::State& state) {
  const DayProfile day = bench_day();
  const ApplianceSpec spec;
  const Phase1Config config{static_cast<int>(state.range(0)),
                            static_cast<int>(state.range(0))};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    std::mt19937_64 rng(seed++);
    benchmark::DoNotOptimize(run_phase1(day, spec, rng, config).total_cost);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Phase1)->Arg(100)->Arg(500);

void BM_MlpForwardBatch(benchmark::State& state) {
  const MlpSpec spec{kObservationDim, {32, 32, 32}, 2, Activation::kTanh, Head::kSoftmaxPolicy};
  std::mt19937_64 rng(3);
  const MlpParams params = init_params(spec, rng);
  Eigen::MatrixXd inputs = Eigen::MatrixXd::Random(state.range(0), kObservationDim);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_batch(spec, params, inputs).sum());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForwardBatch)->Arg(1)->Arg(64);

void BM_MlpBackwardBatch(benchmark::State& state) {
  const MlpSpec spec{kObservationDim, {32, 32, 32}, 2, Activation::kTanh, Head::kSoftmaxPolicy};
  std::mt19937_64 rng(3);
  const MlpParams params = init_params(spec, rng);
  Eigen::MatrixXd inputs = Eigen::MatrixXd::Random(64, kObservationDim);
  Eigen::MatrixXd upstream = Eigen::MatrixXd::Random(64, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(backward_batch(spec, params, inputs, upstream).weights[0](0, 0));
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_MlpBackwardBatch);

void BM_DqnEpisode(benchmark::State& state) {
  const DayProfile day = bench_day();
  Normalizer norm = Normalizer::fit(std::span(&day, 1));
  DqnConfig config;
  config.episodes = 1;
  for (auto _ : state) {
    state.PauseTiming();
    EnergyEnv env(day, ApplianceSpec{}, norm);
    DqnTrainer trainer(env, config, 1);
    state.ResumeTiming();
    trainer.run_episode();
  }
  state.SetItemsProcessed(state.iterations() * day.hours());
}
BENCHMARK(BM_DqnEpisode);

void BM_SynthGenerate(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(synth_generate(seed++, static_cast<int>(state.range(0))).size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SynthGenerate)->Arg(30);

}  // namespace

BENCHMARK_MAIN();
