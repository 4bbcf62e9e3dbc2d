// Copyright 2026 The nsgame Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>

#include <benchmark/benchmark.h>

#include "nsgame/behavior.h"
#include "nsgame/bitstream.h"
#include "nsgame/experiment.h"
#include "nsgame/game.h"
#include "nsgame/oracle.h"
#include "nsgame/strategy.h"

namespace nsgame {
namespace {

void BM_GeneratorAt(benchmark::State& state) {
  const BitStream s = BitStream::Generator(42).WithOverride(3, 1);
  std::uint64_t i = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(s.At(i));
    i = i * 6364136223846793005ULL + 1442695040888963407ULL;
    i = (i >> 20) + 1;
  }
}
BENCHMARK(BM_GeneratorAt);

void BM_PeriodicAt(benchmark::State& state) {
  const BitStream s = BitStream::FromRational(1, 7);
  std::uint64_t i = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(s.At(i));
    i = i % 100'000 + 1;
  }
}
BENCHMARK(BM_PeriodicAt);

void BM_RunTrialFns(benchmark::State& state) {
  const FnsStrategy fns;
  ChoiceOracle oracle;
  GameSpec spec;
  spec.players = static_cast<std::uint64_t>(state.range(0));
  spec.strategy = &fns;
  spec.oracle = &oracle;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    spec.root = BitStream::Generator(++seed);
    benchmark::DoNotOptimize(RunTrial(spec, seed));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunTrialFns)->Arg(64)->Arg(1024);

void BM_RunTrialLocalTable(benchmark::State& state) {
  LookupTable table;
  table.m = 3;
  table.outputs = {0, 1, 1, 0, 1, 0, 0, 1};
  const LocalTableStrategy strategy(table);
  GameSpec spec;
  spec.players = 64;
  spec.strategy = &strategy;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    spec.root = BitStream::Generator(++seed);
    benchmark::DoNotOptimize(RunTrial(spec, seed));
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_RunTrialLocalTable);

void BM_Experiment(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.strategy = {{"name", "local-random"}, {"p", 0.5}};
  cfg.players = 64;
  cfg.trials = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(RunExperiment(cfg));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Experiment)->Unit(benchmark::kMillisecond);

void BM_LocalityEnumeration(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(CheckFunctionalLocalityEquivalence({2, 2}, {2, 2}));
}
BENCHMARK(BM_LocalityEnumeration)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace nsgame

BENCHMARK_MAIN();
