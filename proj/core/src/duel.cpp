// SPDX-License-Identifier: Apache-2.0
#include "frameguard/duel.hpp"

#include "frameguard/errors.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace frameguard::duel {

void DuelParams::validate() const
{
    if (hp_total < 1)
        throw ValidationError("violated bound: hp_total >= 1");
    if (agent_hit_period < 1 || opp_hit_period < 1)
        throw ValidationError("violated bound: hit periods >= 1");
    if (agent_hit_damage < 1 || opp_hit_damage < 1)
        throw ValidationError("violated bound: hit damages >= 1");
    if (max_frames < 0)
        throw ValidationError("violated bound: max_frames >= 0");
}

DuelState fresh_state(const DuelParams& params)
{
    DuelState s;
    s.hp_self = params.hp_total;
    s.hp_opp = params.hp_total;
    return s;
}

DuelState apply_frame(const DuelState& state, bool processed, const DuelParams& params)
{
    if (state.ko)
        throw UsageError("apply_frame on a KO'd state");
    if (state.wall_frame >= params.max_frames)
        throw UsageError("apply_frame past max_frames (" + std::to_string(params.max_frames) + ")");

    DuelState next = state;
    const std::int64_t f = ++next.wall_frame;

    std::int64_t to_opp = 0;
    if (processed) {
        ++next.processed_count;
        if (next.processed_count % params.agent_hit_period == 0)
            to_opp = params.agent_hit_damage;
    }
    const std::int64_t to_self = f % params.opp_hit_period == 0 ? params.opp_hit_damage : 0;

    next.hp_opp = std::clamp<std::int64_t>(next.hp_opp - to_opp, 0, params.hp_total);
    next.hp_self = std::clamp<std::int64_t>(next.hp_self - to_self, 0, params.hp_total);
    next.ko = next.hp_self == 0 || next.hp_opp == 0;
    return next;
}

std::int64_t credited_wall_frame(std::int64_t frame_id, std::int64_t done_us, std::int64_t frame_period_us)
{
    // Wall frame w spans ((w-1)·P, w·P] for completions.
    const std::int64_t by_time = (done_us + frame_period_us - 1) / frame_period_us;
    return std::max(frame_id, by_time);
}

RoundResult run_duel_virtual(std::int64_t total_frame_time_us, std::int64_t frame_period_us,
                             const DuelParams& params)
{
    if (total_frame_time_us <= 0 || frame_period_us <= 0)
        throw ValidationError("violated bound: durations > 0");
    params.validate();

    DuelState state = fresh_state(params);
    RoundResult out;

    // Credits land at most one per wall frame: completions of a single-threaded
    // client are T apart, and a faster client idles until the next emission.
    std::int64_t free_at = 0;
    std::deque<std::int64_t> credits;

    for (std::int64_t f = 1; f <= params.max_frames; ++f) {
        ++out.frames_sent;
        // Frame f stays newest until f+1 is emitted at f·P; ties go to the emission.
        if (free_at < f * frame_period_us) {
            const std::int64_t start = std::max(free_at, (f - 1) * frame_period_us);
            free_at = start + total_frame_time_us;
            ++out.frames_processed;
            credits.push_back(credited_wall_frame(f, free_at, frame_period_us));
        } else {
            ++out.frames_skipped;
        }

        const bool processed = !credits.empty() && credits.front() <= f;
        if (processed)
            credits.pop_front();
        state = apply_frame(state, processed, params);
        if (state.ko)
            break;
    }

    out.hp_self = state.hp_self;
    out.hp_opp = state.hp_opp;
    out.elapsed_frames = state.wall_frame;
    return out;
}

}  // namespace frameguard::duel
