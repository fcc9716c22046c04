// SPDX-License-Identifier: Apache-2.0
#include "frameguard/score.hpp"

#include "frameguard/errors.hpp"

#include <cmath>
#include <string>

namespace frameguard {

namespace {

void require(bool ok, const char* bound)
{
    if (!ok)
        throw ValidationError(std::string("violated bound: ") + bound);
}

}  // namespace

void ScoreParams::validate() const
{
    require(hp_total > 0, "hp_total > 0");
    require(time_total > 0, "time_total > 0");
}

void validate_round(const RoundResult& r, const ScoreParams& params)
{
    params.validate();
    require(r.round_id >= 1, "round_id >= 1");
    require(r.hp_self >= 0, "hp_self >= 0");
    require(r.hp_self <= params.hp_total, "hp_self <= hp_total");
    require(r.hp_opp >= 0, "hp_opp >= 0");
    require(r.hp_opp <= params.hp_total, "hp_opp <= hp_total");
    require(r.elapsed_frames >= 0, "elapsed_frames >= 0");
    require(r.elapsed_frames <= params.time_total, "elapsed_frames <= time_total");
    require(r.frames_sent >= 0 && r.frames_processed >= 0 && r.frames_skipped >= 0, "frame counts >= 0");
    require(r.frames_processed + r.frames_skipped <= r.frames_sent,
            "frames_processed + frames_skipped <= frames_sent");
}

void check_round_end(const RoundResult& r, std::int64_t round_frames)
{
    if (r.elapsed_frames < round_frames)
        require(r.hp_self == 0 || r.hp_opp == 0, "early round end only by KO");
}

ScoreBreakdown score_round(const RoundResult& r, const ScoreParams& params)
{
    validate_round(r, params);

    const double hp_total = static_cast<double>(params.hp_total);
    const double elapsed = static_cast<double>(r.elapsed_frames) / static_cast<double>(params.time_total);

    ScoreBreakdown s;
    s.hp1 = static_cast<double>(r.hp_self) / hp_total;
    s.hp2 = 1.0 - static_cast<double>(r.hp_opp) / hp_total;
    s.w = r.hp_self > r.hp_opp ? 1.0 : 0.0;
    s.t = s.w * (1.0 - elapsed) + (1.0 - s.w) * elapsed;
    s.score = (s.hp1 + s.hp2 + s.w + s.t) / 4.0;
    return s;
}

ScoreSummary aggregate_scores(std::span<const RoundResult> results, const ScoreParams& params,
                              std::int64_t warmup_rounds)
{
    double sum = 0.0;
    std::int64_t n = 0;
    for (const auto& r : results) {
        if (r.round_id <= warmup_rounds)
            continue;
        const double s = score_round(r, params).score;
        sum += s;
        ++n;
    }
    if (n == 0)
        throw EmptySampleError("no rounds left after discarding " + std::to_string(warmup_rounds) +
                               " warmup rounds");

    ScoreSummary out;
    out.n = n;
    out.mean = sum / static_cast<double>(n);
    double acc = 0.0;
    for (const auto& r : results) {
        if (r.round_id <= warmup_rounds)
            continue;
        const double d = score_round(r, params).score - out.mean;
        acc += d * d;
    }
    out.stddev = std::sqrt(acc / static_cast<double>(n));
    return out;
}

}  // namespace frameguard
