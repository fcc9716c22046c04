// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "frameguard/agents.hpp"
#include "frameguard/duel.hpp"
#include "frameguard/net.hpp"
#include "frameguard/score.hpp"

#include <chrono>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace frameguard::server {

enum class ClockMode { Virtual, Realtime };

std::string_view clock_mode_name(ClockMode mode) noexcept;
ClockMode parse_clock_mode(std::string_view text);

struct MatchConfig {
    std::int64_t frame_period_us = 16667;
    std::int64_t frames_per_round = 3600;
    std::int64_t rounds = 96;
    std::int64_t rounds_per_game = 3;  // bookkeeping only
    std::int64_t warmup_rounds = 6;
    ClockMode clock_mode = ClockMode::Virtual;
    duel::DuelParams duel;
    std::uint16_t listen_port = net::kDefaultPort;

    // Realtime knobs.
    std::chrono::microseconds tick_guard{300};
    std::chrono::milliseconds response_timeout{5000};

    void validate() const;
    /// Duel parameters with max_frames pinned to the round length.
    duel::DuelParams round_duel() const;
};

/// One matched FRAME/ACTION pair. rtt is server send to server receive on one clock.
struct FrameSample {
    std::int64_t round_id = 0;
    std::int64_t frame_id = 0;
    std::int64_t rtt_us = 0;
    std::int64_t reported_processing_us = 0;
    std::int64_t overhead_us = 0;  // max(0, rtt - reported)

    /// The client reported more processing than the round trip took.
    bool over_reported() const noexcept { return rtt_us < reported_processing_us; }
    bool operator==(const FrameSample&) const = default;
};

FrameSample make_sample(std::int64_t round_id, std::int64_t frame_id, std::int64_t rtt_us,
                        std::int64_t reported_processing_us);

struct Dispatch {
    std::optional<std::uint32_t> delivered;
    std::int64_t skipped = 0;
};

/// Called when the client is idle: hands over the newest pending frame and drops
/// the older ones, which count as skipped. An empty queue is a no-op.
Dispatch frame_dispatch(std::deque<std::uint32_t>& pending);

struct SendRecord {
    std::int64_t round_id = 0;
    std::int64_t frame_id = 0;
    std::int64_t offset_us = 0;  // from the round's scheduled start
};

struct MatchOutcome {
    std::vector<RoundResult> rounds;
    std::vector<FrameSample> samples;
    std::vector<SendRecord> sends;
    bool aborted = false;
    std::string abort_reason;
};

/// Server half of HELLO/HELLO_ACK. Rejects a version mismatch with accepted=0 and
/// throws HandshakeError; also throws if no HELLO arrives in `timeout`.
protocol::Hello handshake(net::Connection& conn, const MatchConfig& config,
                          std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

/// Realtime match against a handshaken remote client. Frames go out on a fixed
/// schedule (tick n at round start + n·period) whether or not the client is ready;
/// a reader thread timestamps ACTIONs and hands them to this thread, which owns the
/// duel state. Disconnects and protocol violations abort the match; completed
/// rounds are kept and the outcome is flagged.
MatchOutcome run_match(const MatchConfig& config, net::Connection& client);

/// Virtual-clock match against an in-process agent. Messages still pass through
/// the wire codec; the agent's waits advance the shared virtual clock.
MatchOutcome run_match(const MatchConfig& config, agents::BuiltinAgent& agent);

}  // namespace frameguard::server
