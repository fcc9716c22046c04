// SPDX-License-Identifier: Apache-2.0
#include "frameguard/agents.hpp"

#include "frameguard/errors.hpp"

#include <limits>
#include <optional>
#include <string>
#include <variant>

namespace frameguard::agents {

namespace {

constexpr std::int64_t kMaxWireValue = std::numeric_limits<std::uint32_t>::max();

}  // namespace

std::string_view mode_name(AgentMode mode) noexcept
{
    return mode == AgentMode::Sandbox ? "sandbox" : "fixedload";
}

AgentMode parse_mode(std::string_view text)
{
    if (text == "sandbox")
        return AgentMode::Sandbox;
    if (text == "fixedload")
        return AgentMode::FixedLoad;
    throw ValidationError("unknown agent mode '" + std::string(text) + "' (expected sandbox or fixedload)");
}

void VariantSpec::validate() const
{
    if (processing_us < 0 || extra_transport_us < 0 || injected_delay_us < 0)
        throw ValidationError("violated bound: variant durations >= 0");
    if (processing_us + injected_delay_us > kMaxWireValue)
        throw ValidationError("violated bound: processing + delay fits in 32 bits");
    if (label.size() > protocol::kMaxNameBytes)
        throw ValidationError("violated bound: label <= 64 bytes");
    if (!protocol::is_valid_utf8(label))
        throw ValidationError("violated bound: label is UTF-8");
}

protocol::Action sandbox_step(const protocol::Frame& frame)
{
    return protocol::Action{frame.frame_id, 0, 0};
}

protocol::Action fixedload_step(const protocol::Frame& frame, const VariantSpec& spec, Clock& clock)
{
    const std::int64_t start = clock.now_us();
    clock.wait_until_us(start + spec.processing_us + spec.injected_delay_us + spec.extra_transport_us);
    return protocol::Action{frame.frame_id, 1,
                            static_cast<std::uint32_t>(spec.processing_us + spec.injected_delay_us)};
}

BuiltinAgent::BuiltinAgent(AgentMode mode, VariantSpec spec) : mode_(mode), spec_(std::move(spec))
{
    spec_.validate();
}

protocol::Hello BuiltinAgent::hello() const
{
    protocol::Hello h;
    h.name = spec_.label.empty() ? std::string(mode_name(mode_)) : spec_.label;
    h.role = mode_ == AgentMode::Sandbox ? protocol::Role::Sandbox : protocol::Role::Player;
    h.version = protocol::kVersion;
    return h;
}

protocol::Action BuiltinAgent::handle(const protocol::Frame& frame, Clock& clock)
{
    if (mode_ == AgentMode::FixedLoad)
        return fixedload_step(frame, spec_, clock);
    const std::int64_t start = clock.now_us();
    clock.wait_until_us(start + spec_.extra_transport_us + spec_.injected_delay_us);
    return sandbox_step(frame);
}

ClientReport run_client(net::Connection& conn, BuiltinAgent& agent, Clock& clock,
                        std::chrono::milliseconds handshake_timeout)
{
    conn.send(agent.hello());
    std::optional<protocol::Message> reply;
    try {
        reply = conn.receive(handshake_timeout);
    } catch (const ConnectionError& e) {
        throw HandshakeError(std::string("server closed during handshake: ") + e.what());
    }
    if (!reply)
        throw HandshakeError("no HELLO_ACK within timeout");
    const auto* ack = std::get_if<protocol::HelloAck>(&*reply);
    if (ack == nullptr)
        throw HandshakeError("expected HELLO_ACK, got " + std::string(protocol::type_name(protocol::type_of(*reply))));
    if (!ack->accepted)
        throw HandshakeError("server rejected HELLO");

    ClientReport report;
    std::optional<std::uint32_t> round;
    bool done = false;
    while (!done) {
        auto first = conn.receive(std::chrono::milliseconds(-1));
        std::vector<protocol::Message> batch;
        batch.push_back(std::move(*first));
        for (auto& m : conn.drain_available())
            batch.push_back(std::move(m));

        std::optional<protocol::Frame> newest;
        for (auto& msg : batch) {
            if (auto* rs = std::get_if<protocol::RoundStart>(&msg)) {
                round = rs->round_id;
                newest.reset();
            } else if (auto* fr = std::get_if<protocol::Frame>(&msg)) {
                ++report.frames_received;
                if (!round || fr->round_id != *round)
                    throw ProtocolError("FRAME for round " + std::to_string(fr->round_id) + " outside its round");
                if (newest)
                    ++report.frames_dropped;
                newest = *fr;
            } else if (std::holds_alternative<protocol::RoundEnd>(msg)) {
                if (newest)
                    ++report.frames_dropped;
                newest.reset();
                round.reset();
                ++report.rounds;
            } else if (std::holds_alternative<protocol::MatchEnd>(msg)) {
                done = true;
            } else {
                throw ProtocolError("unexpected " + std::string(protocol::type_name(protocol::type_of(msg))) +
                                    " from server");
            }
        }
        if (newest && !done) {
            conn.send(agent.handle(*newest, clock));
            ++report.actions_sent;
        }
    }
    return report;
}

ClientReport run_client(const ClientOptions& options)
{
    BuiltinAgent agent(options.mode, options.spec);
    net::Connection conn(net::connect(options.host, options.port));
    MonotonicClock clock(options.spin_guard);
    return run_client(conn, agent, clock);
}

}  // namespace frameguard::agents
