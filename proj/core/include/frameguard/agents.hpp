// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "frameguard/clock.hpp"
#include "frameguard/net.hpp"
#include "frameguard/protocol.hpp"

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace frameguard::agents {

enum class AgentMode { Sandbox, FixedLoad };

std::string_view mode_name(AgentMode mode) noexcept;
/// Accepts "sandbox" or "fixedload"; throws ValidationError otherwise.
AgentMode parse_mode(std::string_view text);

/// One experimental variant. extra_transport_us is spent inside the client but left
/// out of the reported processing time, so the server books it as transport.
struct VariantSpec {
    std::int64_t processing_us = 0;
    std::int64_t extra_transport_us = 0;
    std::int64_t injected_delay_us = 0;
    std::string label;

    void validate() const;
    bool operator==(const VariantSpec&) const = default;
};

/// Null agent: answers at once with action 0 and zero reported processing.
protocol::Action sandbox_step(const protocol::Frame& frame);

/// Occupies the client for processing + injected delay + extra transport, measured on
/// `clock`, then reports processing + injected delay. The delay is applied after the
/// emulated compute.
protocol::Action fixedload_step(const protocol::Frame& frame, const VariantSpec& spec, Clock& clock);

/// A built-in agent in either mode. In Sandbox mode the processing time is ignored,
/// but extra transport and injected delay are still spent before the reply.
class BuiltinAgent {
public:
    BuiltinAgent(AgentMode mode, VariantSpec spec);

    protocol::Hello hello() const;
    protocol::Action handle(const protocol::Frame& frame, Clock& clock);

    AgentMode mode() const noexcept { return mode_; }
    const VariantSpec& spec() const noexcept { return spec_; }

private:
    AgentMode mode_;
    VariantSpec spec_;
};

struct ClientReport {
    std::int64_t rounds = 0;
    std::int64_t frames_received = 0;
    std::int64_t actions_sent = 0;
    std::int64_t frames_dropped = 0;  // superseded before pickup
};

/// Handshakes, then serves one match: whenever idle, takes the newest pending FRAME
/// of the current round and drops the older ones. Returns after MATCH_END.
/// Throws HandshakeError if the server rejects or never acknowledges.
ClientReport run_client(net::Connection& conn, BuiltinAgent& agent, Clock& clock,
                        std::chrono::milliseconds handshake_timeout = std::chrono::milliseconds(5000));

struct ClientOptions {
    std::string host = "127.0.0.1";
    std::uint16_t port = net::kDefaultPort;
    AgentMode mode = AgentMode::Sandbox;
    VariantSpec spec;
    std::chrono::microseconds spin_guard = kDefaultSpinGuard;
};

/// Connects to a server and runs one match on the monotonic clock.
ClientReport run_client(const ClientOptions& options);

}  // namespace frameguard::agents
