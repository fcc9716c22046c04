// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "frameguard/score.hpp"

#include <cstdint>

namespace frameguard::duel {

/// Damage cadences for the scripted bout. The agent lands a hit on every
/// agent_hit_period-th frame it processes; the opponent lands one every
/// opp_hit_period wall frames regardless. With the defaults a skip-free agent wins
/// at frame 480, and one processing fewer than ~480/900 of frames loses.
struct DuelParams {
    std::int64_t hp_total = 400;
    std::int64_t agent_hit_period = 12;
    std::int64_t agent_hit_damage = 10;
    std::int64_t opp_hit_period = 20;
    std::int64_t opp_hit_damage = 9;
    std::int64_t max_frames = 3600;

    void validate() const;
};

struct DuelState {
    std::int64_t hp_self = 0;
    std::int64_t hp_opp = 0;
    std::int64_t wall_frame = 0;  // last applied frame, 1-indexed
    std::int64_t processed_count = 0;
    bool ko = false;

    bool operator==(const DuelState&) const = default;
};

DuelState fresh_state(const DuelParams& params);

/// Advances one wall frame. Both sides' damage for the frame lands together, then
/// HP is clamped and KO is checked, so a double KO is possible (and scores as a loss).
/// Throws UsageError on a KO'd state or past max_frames.
DuelState apply_frame(const DuelState& state, bool processed, const DuelParams& params);

/// Virtual-time pipeline: frames are emitted every frame_period_us; a client busy
/// total_frame_time_us per frame it takes always takes the newest pending frame.
/// Each completed action credits the wall frame it completes in (never earlier than
/// its own frame). Runs to KO or max_frames. Integer-only, so bit-reproducible.
RoundResult run_duel_virtual(std::int64_t total_frame_time_us, std::int64_t frame_period_us,
                             const DuelParams& params = {});

/// Wall frame credited by an action on `frame_id` that completes at `done_us`
/// (virtual time from round start, frame f emitted at (f-1)·period).
std::int64_t credited_wall_frame(std::int64_t frame_id, std::int64_t done_us, std::int64_t frame_period_us);

}  // namespace frameguard::duel
