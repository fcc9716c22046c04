// SPDX-License-Identifier: Apache-2.0
#include "frameguard/clock.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <chrono>
#include <vector>

using namespace std::chrono;

// Reports how late spin_until returns for a target `range(0)` microseconds out.
static void BM_SpinOvershoot(benchmark::State& state)
{
    const auto ahead = microseconds(state.range(0));
    const auto guard = microseconds(state.range(1));
    std::vector<double> late;
    for (auto _ : state) {
        const auto target = steady_clock::now() + ahead;
        frameguard::spin_until(target, guard);
        late.push_back(duration<double, std::micro>(steady_clock::now() - target).count());
    }
    std::sort(late.begin(), late.end());
    state.counters["p50_us"] = late[late.size() / 2];
    state.counters["p99_us"] = late[late.size() * 99 / 100];
    state.counters["max_us"] = late.back();
}
BENCHMARK(BM_SpinOvershoot)->Args({1000, 300})->Args({1000, 0})->Args({16667, 300})->Iterations(200);

static void BM_MonotonicNow(benchmark::State& state)
{
    frameguard::MonotonicClock clock;
    for (auto _ : state)
        benchmark::DoNotOptimize(clock.now_us());
}
BENCHMARK(BM_MonotonicNow);

BENCHMARK_MAIN();
