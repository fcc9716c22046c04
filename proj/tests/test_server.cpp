// SPDX-License-Identifier: Apache-2.0
#include "frameguard/errors.hpp"
#include "frameguard/server.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <thread>

using namespace frameguard;
using namespace frameguard::server;
using namespace std::chrono_literals;

namespace {

MatchConfig virtual_config(std::int64_t rounds = 2)
{
    MatchConfig c;
    c.rounds = rounds;
    c.warmup_rounds = 0;
    return c;
}

MatchConfig realtime_config(std::int64_t rounds, std::int64_t frames)
{
    MatchConfig c;
    c.clock_mode = ClockMode::Realtime;
    c.rounds = rounds;
    c.warmup_rounds = 0;
    c.frames_per_round = frames;
    c.listen_port = 0;
    return c;
}

agents::BuiltinAgent fixed(std::int64_t total) { return {agents::AgentMode::FixedLoad, {total, 0, 0, "t"}}; }

void expect_same_round(const RoundResult& got, const RoundResult& want)
{
    EXPECT_EQ(got.hp_self, want.hp_self);
    EXPECT_EQ(got.hp_opp, want.hp_opp);
    EXPECT_EQ(got.elapsed_frames, want.elapsed_frames);
    EXPECT_EQ(got.frames_sent, want.frames_sent);
    EXPECT_EQ(got.frames_processed, want.frames_processed);
    EXPECT_EQ(got.frames_skipped, want.frames_skipped);
}

/// A realtime server on an ephemeral port, plus a raw client socket to poke it with.
struct Loopback {
    net::Listener listener = net::Listener::bind("127.0.0.1", 0);
    std::optional<net::Connection> server_side;
    std::optional<net::Connection> client_side;

    Loopback()
    {
        std::thread t([&] { client_side.emplace(net::connect("127.0.0.1", listener.port())); });
        server_side.emplace(*listener.accept(5000ms));
        t.join();
    }
};

double stddev(const std::vector<double>& v)
{
    double m = 0;
    for (double x : v)
        m += x;
    m /= static_cast<double>(v.size());
    double s = 0;
    for (double x : v)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

TEST(FrameDispatch, SinglePending)
{
    std::deque<std::uint32_t> q{7};
    const auto d = frame_dispatch(q);
    EXPECT_EQ(d.delivered, 7u);
    EXPECT_EQ(d.skipped, 0);
    EXPECT_TRUE(q.empty());
}

TEST(FrameDispatch, NewestWins)
{
    std::deque<std::uint32_t> q{7, 8, 9};
    const auto d = frame_dispatch(q);
    EXPECT_EQ(d.delivered, 9u);
    EXPECT_EQ(d.skipped, 2);
    EXPECT_TRUE(q.empty());
}

TEST(FrameDispatch, EmptyIsNoOp)
{
    std::deque<std::uint32_t> q;
    const auto d = frame_dispatch(q);
    EXPECT_FALSE(d.delivered.has_value());
    EXPECT_EQ(d.skipped, 0);
}

TEST(FrameSample, OverheadFloorsAtZeroAndFlags)
{
    const auto s = make_sample(1, 2, 100, 150);
    EXPECT_EQ(s.overhead_us, 0);
    EXPECT_TRUE(s.over_reported());
    const auto t = make_sample(1, 2, 150, 100);
    EXPECT_EQ(t.overhead_us, 50);
    EXPECT_FALSE(t.over_reported());
}

TEST(MatchConfig, Validation)
{
    MatchConfig c;
    EXPECT_NO_THROW(c.validate());
    c.frame_period_us = 0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = {};
    c.rounds = 0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = {};
    c.warmup_rounds = c.rounds;
    EXPECT_THROW(c.validate(), ValidationError);
    EXPECT_EQ(parse_clock_mode("realtime"), ClockMode::Realtime);
    EXPECT_THROW(parse_clock_mode("wall"), ValidationError);
}

TEST(VirtualMatch, AgreesWithDuelOracle)
{
    for (std::int64_t T : {16000, 16667, 20000, 33334}) {
        auto agent = fixed(T);
        const auto out = run_match(virtual_config(3), agent);
        ASSERT_FALSE(out.aborted);
        ASSERT_EQ(out.rounds.size(), 3u);
        const auto want = duel::run_duel_virtual(T, 16667);
        for (const auto& r : out.rounds)
            expect_same_round(r, want);
    }
}

TEST(VirtualMatch, PublishedCases)
{
    auto a = fixed(16000);
    const auto r = run_match(virtual_config(1), a).rounds.at(0);
    EXPECT_EQ(r.hp_self, 184);
    EXPECT_EQ(r.hp_opp, 0);
    EXPECT_EQ(r.elapsed_frames, 480);
    EXPECT_EQ(r.frames_skipped, 0);

    auto b = fixed(33334);
    const auto s = run_match(virtual_config(1), b).rounds.at(0);
    EXPECT_EQ(s.hp_self, 0);
    EXPECT_EQ(s.hp_opp, 30);
    EXPECT_EQ(s.elapsed_frames, 900);
}

TEST(VirtualMatch, AgreesWithBruteForceOnSmallPeriods)
{
    oracle::Gen g(501);
    for (int i = 0; i < 150; ++i) {
        MatchConfig c = virtual_config(1);
        c.frame_period_us = g.in(1, 40);
        c.frames_per_round = g.in(0, 300);
        c.duel.hp_total = g.in(1, 150);
        c.duel.agent_hit_period = g.in(1, 12);
        c.duel.agent_hit_damage = g.in(1, 20);
        c.duel.opp_hit_period = g.in(1, 20);
        c.duel.opp_hit_damage = g.in(1, 20);
        const auto T = g.in(1, 4 * c.frame_period_us);
        auto agent = fixed(T);
        const auto got = run_match(c, agent).rounds.at(0);
        const auto want = oracle::brute_duel(T, c.frame_period_us, c.round_duel());
        EXPECT_EQ(got.hp_self, want.hp_self) << i;
        EXPECT_EQ(got.hp_opp, want.hp_opp) << i;
        EXPECT_EQ(got.elapsed_frames, want.elapsed) << i;
        EXPECT_EQ(got.frames_sent, want.sent) << i;
        EXPECT_EQ(got.frames_processed, want.processed) << i;
        EXPECT_EQ(got.frames_skipped, want.skipped) << i;
    }
}

TEST(VirtualMatch, EmptyRound)
{
    MatchConfig c = virtual_config(1);
    c.frames_per_round = 0;
    auto agent = fixed(16000);
    const auto out = run_match(c, agent);
    ASSERT_EQ(out.rounds.size(), 1u);
    const auto& r = out.rounds[0];
    EXPECT_EQ(r.elapsed_frames, 0);
    EXPECT_EQ(r.hp_self, 400);
    EXPECT_EQ(r.hp_opp, 400);
    EXPECT_EQ(score_round(r).w, 0.0);
    EXPECT_FALSE(r.mean_overhead_us.has_value());
}

TEST(VirtualMatch, SamplesSeparateTransportFromCompute)
{
    agents::BuiltinAgent agent(agents::AgentMode::FixedLoad, {15150, 500, 0, "x"});
    const auto out = run_match(virtual_config(1), agent);
    ASSERT_FALSE(out.samples.empty());
    for (const auto& s : out.samples) {
        EXPECT_EQ(s.reported_processing_us, 15150);
        EXPECT_EQ(s.overhead_us, 500);
        EXPECT_EQ(s.rtt_us, 15650);
    }
    EXPECT_EQ(out.rounds[0].mean_overhead_us, 500.0);
    EXPECT_EQ(static_cast<std::int64_t>(out.samples.size()), out.rounds[0].frames_processed);
}

TEST(VirtualMatch, DeterministicAndConserving)
{
    oracle::Gen g(502);
    for (int i = 0; i < 20; ++i) {
        const auto T = g.in(1, 40000);
        auto a = fixed(T);
        auto b = fixed(T);
        const auto x = run_match(virtual_config(2), a);
        const auto y = run_match(virtual_config(2), b);
        EXPECT_EQ(x.rounds, y.rounds);
        EXPECT_EQ(x.samples, y.samples);
        for (const auto& r : x.rounds)
            EXPECT_EQ(r.frames_processed + r.frames_skipped, r.frames_sent);
    }
}

TEST(VirtualMatch, WrongClockModeIsRejected)
{
    auto agent = fixed(1);
    auto c = virtual_config(1);
    c.clock_mode = ClockMode::Realtime;
    EXPECT_THROW(run_match(c, agent), UsageError);

    Loopback lb;
    EXPECT_THROW(run_match(virtual_config(1), *lb.server_side), UsageError);
}

TEST(Handshake, AcceptsMatchingVersion)
{
    Loopback lb;
    lb.client_side->send(protocol::Hello{"ok", protocol::Role::Player, protocol::kVersion});
    const auto hello = handshake(*lb.server_side, realtime_config(1, 1));
    EXPECT_EQ(hello.name, "ok");
    const auto ack = std::get<protocol::HelloAck>(*lb.client_side->receive(2000ms));
    EXPECT_TRUE(ack.accepted);
    EXPECT_EQ(ack.frame_period_us, 16667u);
}

TEST(Handshake, RejectsVersionMismatch)
{
    Loopback lb;
    lb.client_side->send(protocol::Hello{"old", protocol::Role::Player, 2});
    EXPECT_THROW(handshake(*lb.server_side, realtime_config(1, 1)), HandshakeError);
    const auto ack = std::get<protocol::HelloAck>(*lb.client_side->receive(2000ms));
    EXPECT_FALSE(ack.accepted);
}

TEST(Handshake, RejectsOtherFirstMessageAndSilence)
{
    {
        Loopback lb;
        lb.client_side->send(protocol::MatchEnd{1});
        EXPECT_THROW(handshake(*lb.server_side, realtime_config(1, 1)), HandshakeError);
    }
    {
        Loopback lb;
        EXPECT_THROW(handshake(*lb.server_side, realtime_config(1, 1), 100ms), HandshakeError);
    }
}

TEST(RealtimeMatch, UnknownFrameIdAborts)
{
    Loopback lb;
    std::thread client([&] {
        auto& c = *lb.client_side;
        EXPECT_TRUE(std::holds_alternative<protocol::RoundStart>(*c.receive(2000ms)));
        EXPECT_TRUE(std::holds_alternative<protocol::Frame>(*c.receive(2000ms)));
        c.send(protocol::Action{9999, 0, 0});
        try {
            while (c.receive(2000ms)) {
            }
        } catch (const Error&) {
        }
    });
    const auto out = run_match(realtime_config(2, 30), *lb.server_side);
    lb.server_side->close();
    client.join();
    EXPECT_TRUE(out.aborted);
    EXPECT_NE(out.abort_reason.find("unknown frame_id 9999"), std::string::npos) << out.abort_reason;
    EXPECT_TRUE(out.rounds.empty());
}

TEST(RealtimeMatch, DisconnectKeepsCompletedRounds)
{
    Loopback lb;
    std::thread client([&] {
        auto& c = *lb.client_side;
        int round_ends = 0;
        while (auto m = c.receive(3000ms)) {
            if (auto* f = std::get_if<protocol::Frame>(&*m)) {
                c.send(protocol::Action{f->frame_id, 0, 0});
            } else if (std::holds_alternative<protocol::RoundEnd>(*m) && ++round_ends == 1) {
                // Walk away during round 2.
                std::this_thread::sleep_for(50ms);
                c.close();
                return;
            }
        }
    });
    const auto out = run_match(realtime_config(3, 10), *lb.server_side);
    client.join();
    EXPECT_TRUE(out.aborted);
    ASSERT_EQ(out.rounds.size(), 1u);
    EXPECT_EQ(out.rounds[0].frames_processed, 10);
}

TEST(RealtimeMatch, UnexpectedMessageAborts)
{
    Loopback lb;
    std::thread client([&] {
        auto& c = *lb.client_side;
        c.receive(2000ms);
        c.send(protocol::Hello{"again", protocol::Role::Player, 1});
        try {
            while (c.receive(2000ms)) {
            }
        } catch (const Error&) {
        }
    });
    const auto out = run_match(realtime_config(1, 30), *lb.server_side);
    lb.server_side->close();
    client.join();
    EXPECT_TRUE(out.aborted);
    EXPECT_NE(out.abort_reason.find("HELLO"), std::string::npos) << out.abort_reason;
}

TEST(RealtimeMatch, SandboxLoopbackTicksAreStable)
{
    Loopback lb;
    agents::ClientReport report;
    std::thread client([&] {
        agents::BuiltinAgent agent(agents::AgentMode::Sandbox, {0, 0, 0, "sb"});
        MonotonicClock clock;
        report = agents::run_client(*lb.client_side, agent, clock);
    });
    auto config = realtime_config(2, 60);
    handshake(*lb.server_side, config);
    const auto out = run_match(config, *lb.server_side);
    client.join();

    ASSERT_FALSE(out.aborted) << out.abort_reason;
    ASSERT_EQ(out.rounds.size(), 2u);
    EXPECT_EQ(report.rounds, 2);
    for (const auto& r : out.rounds) {
        EXPECT_EQ(r.frames_sent, 60);
        EXPECT_EQ(r.frames_processed + r.frames_skipped, r.frames_sent);
        EXPECT_EQ(r.elapsed_frames, 60);
        EXPECT_TRUE(r.mean_overhead_us.has_value());
    }
    for (const auto& s : out.samples) {
        EXPECT_GE(s.rtt_us, 0);
        EXPECT_GE(s.overhead_us, 0);
    }

    std::vector<double> gaps;
    for (std::size_t i = 1; i < out.sends.size(); ++i) {
        if (out.sends[i].round_id != out.sends[i - 1].round_id)
            continue;
        gaps.push_back(static_cast<double>(out.sends[i].offset_us - out.sends[i - 1].offset_us));
    }
    EXPECT_LE(stddev(gaps), 0.10 * 16667) << "inter-send stddev";
    // Ticks are anchored to the round start: lateness does not accumulate.
    for (const auto& s : out.sends)
        EXPECT_LT(s.offset_us - (s.frame_id - 1) * 16667, 8000) << "frame " << s.frame_id;
}
