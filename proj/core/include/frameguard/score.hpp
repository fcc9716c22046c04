// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace frameguard {

struct ScoreParams {
    std::int64_t hp_total = 400;
    std::int64_t time_total = 3600;  // frames

    void validate() const;
};

/// Terminal state of one round, seen from the evaluated agent.
struct RoundResult {
    std::int64_t round_id = 1;
    std::int64_t hp_self = 0;
    std::int64_t hp_opp = 0;
    std::int64_t elapsed_frames = 0;
    std::int64_t frames_sent = 0;
    std::int64_t frames_processed = 0;
    std::int64_t frames_skipped = 0;
    std::optional<double> mean_overhead_us;

    bool operator==(const RoundResult&) const = default;
};

/// Throws ValidationError naming the first violated bound. Checks ranges and the
/// frame accounting; the early-end-only-by-KO rule depends on the configured round
/// length, so it is checked separately by check_round_end().
void validate_round(const RoundResult& result, const ScoreParams& params);

/// Throws ValidationError when a round stopped before `round_frames` without a KO.
void check_round_end(const RoundResult& result, std::int64_t round_frames);

struct ScoreBreakdown {
    double hp1 = 0.0;
    double hp2 = 0.0;
    double w = 0.0;
    double t = 0.0;
    double score = 0.0;
};

/// Normalized HP and time terms averaged into one score in [0, 1].
///
/// hp1 rewards own remaining health, hp2 rewards damage dealt, w is the win flag
/// (a tie is a loss), and t rewards a fast win or, failing that, a long survival.
ScoreBreakdown score_round(const RoundResult& result, const ScoreParams& params = {});

struct ScoreSummary {
    double mean = 0.0;
    double stddev = 0.0;  // population
    std::int64_t n = 0;
};

/// Mean and population standard deviation of round scores, ignoring rounds whose
/// round_id is at most `warmup_rounds`. Throws EmptySampleError if none remain.
ScoreSummary aggregate_scores(std::span<const RoundResult> results, const ScoreParams& params,
                              std::int64_t warmup_rounds);

}  // namespace frameguard
