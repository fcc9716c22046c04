// SPDX-License-Identifier: Apache-2.0
#include "frameguard/protocol.hpp"

#include <benchmark/benchmark.h>

using namespace frameguard::protocol;

static void BM_EncodeFrame(benchmark::State& state)
{
    std::vector<std::uint8_t> buf;
    buf.reserve(64);
    std::uint32_t id = 0;
    for (auto _ : state) {
        buf.clear();
        encode_into(Frame{1, ++id, 400, 380, id * 16667u}, buf);
        benchmark::DoNotOptimize(buf.data());
    }
}
BENCHMARK(BM_EncodeFrame);

static void BM_DecodeAction(benchmark::State& state)
{
    const auto wire = encode(Action{42, 1, 15850});
    for (auto _ : state) {
        auto d = decode(wire);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_DecodeAction);

static void BM_StreamDecoderBurst(benchmark::State& state)
{
    std::vector<std::uint8_t> burst;
    for (std::uint32_t f = 1; f <= static_cast<std::uint32_t>(state.range(0)); ++f)
        encode_into(Frame{1, f, 400, 400, 0}, burst);
    for (auto _ : state) {
        StreamDecoder dec;
        dec.feed(burst);
        std::size_t n = 0;
        while (dec.next())
            ++n;
        benchmark::DoNotOptimize(n);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * burst.size()));
}
BENCHMARK(BM_StreamDecoderBurst)->Arg(1)->Arg(64)->Arg(3600);

BENCHMARK_MAIN();
