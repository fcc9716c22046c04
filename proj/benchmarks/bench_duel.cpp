// SPDX-License-Identifier: Apache-2.0
#include "frameguard/agents.hpp"
#include "frameguard/duel.hpp"
#include "frameguard/score.hpp"
#include "frameguard/server.hpp"

#include <benchmark/benchmark.h>

using namespace frameguard;

static void BM_ScoreRound(benchmark::State& state)
{
    RoundResult r;
    r.hp_self = 184;
    r.elapsed_frames = 480;
    for (auto _ : state) {
        auto s = score_round(r);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_ScoreRound);

static void BM_DuelVirtual(benchmark::State& state)
{
    duel::DuelParams p;
    p.hp_total = 1000000;  // no KO: all 3600 frames
    for (auto _ : state) {
        auto r = duel::run_duel_virtual(state.range(0), 16667, p);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_DuelVirtual)->Arg(1600)->Arg(16350)->Arg(33334);

static void BM_VirtualMatchRound(benchmark::State& state)
{
    server::MatchConfig c;
    c.rounds = 1;
    c.warmup_rounds = 0;
    c.duel.hp_total = 1000000;
    for (auto _ : state) {
        agents::BuiltinAgent agent(agents::AgentMode::FixedLoad, {state.range(0), 500, 0, "bench"});
        auto out = server::run_match(c, agent);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_VirtualMatchRound)->Arg(15850)->Arg(33334)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
