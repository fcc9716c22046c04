// SPDX-License-Identifier: Apache-2.0
#include "frameguard/probe.hpp"

#include "frameguard/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace frameguard::probe {

std::int64_t nearest_rank(std::span<const std::int64_t> sorted, double p)
{
    if (sorted.empty())
        throw EmptySampleError("percentile of an empty sample");
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

RoundLatency round_stats(std::span<const server::FrameSample> samples)
{
    if (samples.empty())
        throw EmptySampleError("round has no frame samples");

    std::vector<std::int64_t> overheads;
    overheads.reserve(samples.size());
    double sum = 0.0;
    for (const auto& s : samples) {
        if (s.round_id != samples.front().round_id)
            throw ValidationError("round_stats given samples from more than one round");
        overheads.push_back(s.overhead_us);
        sum += static_cast<double>(s.overhead_us);
    }
    std::sort(overheads.begin(), overheads.end());

    RoundLatency out;
    out.round_id = samples.front().round_id;
    out.n = static_cast<std::int64_t>(samples.size());
    out.mean_overhead_us = sum / static_cast<double>(samples.size());
    out.p50_us = nearest_rank(overheads, 50.0);
    out.p99_us = nearest_rank(overheads, 99.0);
    return out;
}

std::vector<RoundLatency> round_latencies(std::span<const server::FrameSample> samples)
{
    std::vector<std::int64_t> order;
    std::map<std::int64_t, std::vector<server::FrameSample>> by_round;
    for (const auto& s : samples) {
        auto& bucket = by_round[s.round_id];
        if (bucket.empty())
            order.push_back(s.round_id);
        bucket.push_back(s);
    }
    std::vector<RoundLatency> out;
    out.reserve(order.size());
    for (auto id : order)
        out.push_back(round_stats(by_round[id]));
    return out;
}

double stable_mean(std::span<const RoundLatency> rounds, std::int64_t warmup_rounds)
{
    double sum = 0.0;
    std::int64_t n = 0;
    for (const auto& r : rounds) {
        if (r.round_id <= warmup_rounds)
            continue;
        sum += r.mean_overhead_us;
        ++n;
    }
    if (n == 0)
        throw EmptySampleError("no rounds left after discarding " + std::to_string(warmup_rounds) +
                               " warmup rounds");
    return sum / static_cast<double>(n);
}

std::optional<std::string> spread_warning(std::span<const RoundLatency> rounds, std::int64_t warmup_rounds)
{
    double lo = 0.0;
    double hi = 0.0;
    bool any = false;
    for (const auto& r : rounds) {
        if (r.round_id <= warmup_rounds)
            continue;
        lo = any ? std::min(lo, r.mean_overhead_us) : r.mean_overhead_us;
        hi = any ? std::max(hi, r.mean_overhead_us) : r.mean_overhead_us;
        any = true;
    }
    if (!any)
        return std::nullopt;
    const double mean = stable_mean(rounds, warmup_rounds);
    if (mean <= 0.0 || hi - lo <= kSpreadWarningRatio * mean)
        return std::nullopt;
    std::ostringstream msg;
    msg << "post-warmup round means span " << lo << ".." << hi << " us, more than 20% of their mean " << mean
        << " us; latency may not have stabilized";
    return msg.str();
}

CalibrationResult calibrate_delay(double mean_fast_us, double mean_slow_us, std::int64_t granularity_us)
{
    if (granularity_us < 1)
        throw ValidationError("violated bound: granularity_us >= 1");
    if (mean_slow_us < mean_fast_us) {
        std::ostringstream msg;
        msg << "swapped inputs: the fast mean (" << mean_fast_us << " us) is larger than the slow mean ("
            << mean_slow_us << " us)";
        throw SwappedInputsError(msg.str());
    }

    CalibrationResult out;
    out.mean_fast_us = mean_fast_us;
    out.mean_slow_us = mean_slow_us;
    out.gap_us = mean_slow_us - mean_fast_us;
    out.granularity_us = granularity_us;
    const auto g = static_cast<double>(granularity_us);
    out.delay_us = static_cast<std::int64_t>(std::ceil(out.gap_us / g)) * granularity_us;
    // Guard the ceil against a quotient that lands a hair under an integer.
    if (static_cast<double>(out.delay_us) < out.gap_us)
        out.delay_us += granularity_us;
    return out;
}

}  // namespace frameguard::probe
