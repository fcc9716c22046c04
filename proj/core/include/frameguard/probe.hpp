// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "frameguard/server.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frameguard::probe {

inline constexpr std::int64_t kDefaultGranularityUs = 50;
inline constexpr double kSpreadWarningRatio = 0.20;

struct RoundLatency {
    std::int64_t round_id = 0;
    std::int64_t n = 0;
    double mean_overhead_us = 0.0;
    std::int64_t p50_us = 0;
    std::int64_t p99_us = 0;

    bool operator==(const RoundLatency&) const = default;
};

/// Mean and nearest-rank percentiles of overhead_us. All samples must share a round.
/// Throws EmptySampleError on an empty round.
RoundLatency round_stats(std::span<const server::FrameSample> samples);

/// Splits samples by round_id (in order of first appearance) and summarizes each.
std::vector<RoundLatency> round_latencies(std::span<const server::FrameSample> samples);

/// Nearest-rank percentile on an ascending sequence, p in (0, 100].
std::int64_t nearest_rank(std::span<const std::int64_t> sorted, double p);

/// Mean of per-round means over rounds with round_id > warmup_rounds.
double stable_mean(std::span<const RoundLatency> rounds, std::int64_t warmup_rounds);

/// Advisory only: a message when the retained round means spread (max - min) by more
/// than 20% of their mean, which suggests the warmup cut is too early.
std::optional<std::string> spread_warning(std::span<const RoundLatency> rounds, std::int64_t warmup_rounds);

struct CalibrationResult {
    double mean_fast_us = 0.0;
    double mean_slow_us = 0.0;
    double gap_us = 0.0;
    std::int64_t granularity_us = kDefaultGranularityUs;
    std::int64_t delay_us = 0;  // inject into the fast side
};

/// delay = the smallest non-negative multiple of granularity_us that is >= the gap
/// (slow - fast). Rounds up, so the fast side is never left ahead. Throws
/// SwappedInputsError if the "slow" mean is below the "fast" mean.
CalibrationResult calibrate_delay(double mean_fast_us, double mean_slow_us,
                                  std::int64_t granularity_us = kDefaultGranularityUs);

}  // namespace frameguard::probe
