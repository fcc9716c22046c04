// SPDX-License-Identifier: Apache-2.0
#include "frameguard/server.hpp"

#include "frameguard/errors.hpp"

#include <algorithm>
#include <condition_variable>
#include <limits>
#include <mutex>
#include <numeric>
#include <stop_token>
#include <thread>
#include <variant>

namespace frameguard::server {

namespace {

constexpr std::int64_t kMaxU32 = std::numeric_limits<std::uint32_t>::max();

std::uint32_t wire(std::int64_t v) { return static_cast<std::uint32_t>(v); }

std::optional<double> mean_overhead(const std::vector<FrameSample>& samples, std::size_t from)
{
    if (samples.size() <= from)
        return std::nullopt;
    double sum = 0.0;
    for (std::size_t i = from; i < samples.size(); ++i)
        sum += static_cast<double>(samples[i].overhead_us);
    return sum / static_cast<double>(samples.size() - from);
}

protocol::RoundEnd round_end_message(const RoundResult& r)
{
    return protocol::RoundEnd{wire(r.round_id),      wire(r.hp_self),          wire(r.hp_opp),
                              wire(r.elapsed_frames), wire(r.frames_processed), wire(r.frames_skipped)};
}

template <class M>
M through_codec(const M& msg)
{
    const auto bytes = protocol::encode(msg);
    auto decoded = protocol::decode(bytes);
    return std::get<M>(decoded->message);
}

struct ActionEvent {
    protocol::Action action;
    SteadyClock::time_point at;
};

struct ReaderFailure {
    std::string reason;
};

using ReaderEvent = std::variant<ActionEvent, ReaderFailure>;

// Ordered hand-off from the connection reader to the tick owner.
class EventChannel {
public:
    void push(ReaderEvent ev)
    {
        {
            std::lock_guard lock(mu_);
            q_.push_back(std::move(ev));
        }
        cv_.notify_one();
    }

    std::deque<ReaderEvent> take_all()
    {
        std::lock_guard lock(mu_);
        return std::exchange(q_, {});
    }

    std::optional<ReaderEvent> wait_pop(SteadyClock::time_point deadline)
    {
        std::unique_lock lock(mu_);
        if (!cv_.wait_until(lock, deadline, [&] { return !q_.empty(); }))
            return std::nullopt;
        auto ev = std::move(q_.front());
        q_.pop_front();
        return ev;
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<ReaderEvent> q_;
};

void reader_loop(std::stop_token stop, net::Connection& conn, EventChannel& events)
{
    try {
        while (!stop.stop_requested()) {
            auto msg = conn.receive(std::chrono::milliseconds(20));
            if (!msg)
                continue;
            const auto at = SteadyClock::now();
            if (auto* a = std::get_if<protocol::Action>(&*msg)) {
                events.push(ActionEvent{*a, at});
            } else {
                events.push(ReaderFailure{"unexpected " + std::string(protocol::type_name(protocol::type_of(*msg))) +
                                          " from client"});
                return;
            }
        }
    } catch (const ConnectionError& e) {
        events.push(ReaderFailure{std::string("client disconnected: ") + e.what()});
    } catch (const ProtocolError& e) {
        events.push(ReaderFailure{std::string("protocol error: ") + e.what()});
    }
}

class RoundAborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Realtime bookkeeping for one round, owned by the tick thread.
class RealtimeRound {
public:
    RealtimeRound(const MatchConfig& config, std::int64_t round_id, SteadyClock::time_point start,
                  std::vector<FrameSample>& samples)
        : config_(config), round_id_(round_id), start_(start), samples_(samples),
          sent_at_(static_cast<std::size_t>(config.frames_per_round) + 2)
    {
    }

    void on_sent(std::int64_t frame_id, SteadyClock::time_point at)
    {
        sent_at_[static_cast<std::size_t>(frame_id)] = at;
        sent_ = frame_id;
    }

    void handle(const ReaderEvent& ev)
    {
        if (const auto* fail = std::get_if<ReaderFailure>(&ev))
            throw RoundAborted(fail->reason);
        const auto& [action, at] = std::get<ActionEvent>(ev);
        const std::int64_t g = action.frame_id;
        if (g < next_unresolved_ || g > sent_)
            throw RoundAborted("protocol error: ACTION for unknown frame_id " + std::to_string(g) + " in round " +
                               std::to_string(round_id_));
        skipped_ += g - next_unresolved_;
        ++processed_;
        next_unresolved_ = g + 1;

        const auto rtt = std::chrono::duration_cast<std::chrono::microseconds>(at - sent_at_[g]).count();
        samples_.push_back(make_sample(round_id_, g, rtt, action.reported_processing_us));

        const auto since = std::chrono::duration_cast<std::chrono::microseconds>(at - start_).count();
        const std::int64_t wall = since < 0 ? 1 : since / config_.frame_period_us + 1;
        credits_.push_back(std::max(g, wall));
    }

    bool take_credit(std::int64_t wall_frame)
    {
        if (credits_.empty() || credits_.front() > wall_frame)
            return false;
        credits_.pop_front();
        return true;
    }

    bool settled() const { return next_unresolved_ > sent_; }
    std::int64_t next_unresolved() const { return next_unresolved_; }
    std::int64_t sent() const { return sent_; }
    std::int64_t processed() const { return processed_; }
    std::int64_t skipped() const { return skipped_; }

private:
    const MatchConfig& config_;
    std::int64_t round_id_;
    SteadyClock::time_point start_;
    std::vector<FrameSample>& samples_;
    std::vector<SteadyClock::time_point> sent_at_;
    std::deque<std::int64_t> credits_;
    std::int64_t sent_ = 0;
    std::int64_t next_unresolved_ = 1;
    std::int64_t processed_ = 0;
    std::int64_t skipped_ = 0;
};

}  // namespace

std::string_view clock_mode_name(ClockMode mode) noexcept
{
    return mode == ClockMode::Virtual ? "virtual" : "realtime";
}

ClockMode parse_clock_mode(std::string_view text)
{
    if (text == "virtual")
        return ClockMode::Virtual;
    if (text == "realtime")
        return ClockMode::Realtime;
    throw ValidationError("unknown clock mode '" + std::string(text) + "' (expected virtual or realtime)");
}

void MatchConfig::validate() const
{
    if (frame_period_us <= 0 || frame_period_us > kMaxU32)
        throw ValidationError("violated bound: 0 < frame_period_us <= 2^32-1");
    if (frames_per_round < 0 || frames_per_round > kMaxU32)
        throw ValidationError("violated bound: 0 <= frames_per_round <= 2^32-1");
    if (rounds < 1 || rounds > kMaxU32)
        throw ValidationError("violated bound: rounds >= 1");
    if (rounds_per_game < 1)
        throw ValidationError("violated bound: rounds_per_game >= 1");
    if (warmup_rounds < 0 || warmup_rounds >= rounds)
        throw ValidationError("violated bound: 0 <= warmup_rounds < rounds");
    duel.validate();
    if (duel.hp_total > kMaxU32)
        throw ValidationError("violated bound: hp_total <= 2^32-1");
}

duel::DuelParams MatchConfig::round_duel() const
{
    auto p = duel;
    p.max_frames = frames_per_round;
    return p;
}

FrameSample make_sample(std::int64_t round_id, std::int64_t frame_id, std::int64_t rtt_us,
                        std::int64_t reported_processing_us)
{
    FrameSample s;
    s.round_id = round_id;
    s.frame_id = frame_id;
    s.rtt_us = std::max<std::int64_t>(rtt_us, 0);
    s.reported_processing_us = reported_processing_us;
    s.overhead_us = std::max<std::int64_t>(s.rtt_us - reported_processing_us, 0);
    return s;
}

Dispatch frame_dispatch(std::deque<std::uint32_t>& pending)
{
    Dispatch d;
    if (pending.empty())
        return d;
    d.delivered = pending.back();
    d.skipped = static_cast<std::int64_t>(pending.size()) - 1;
    pending.clear();
    return d;
}

protocol::Hello handshake(net::Connection& conn, const MatchConfig& config, std::chrono::milliseconds timeout)
{
    std::optional<protocol::Message> msg;
    try {
        msg = conn.receive(timeout);
    } catch (const Error& e) {
        throw HandshakeError(std::string("client failed before HELLO: ") + e.what());
    }
    if (!msg)
        throw HandshakeError("no HELLO within timeout");
    const auto* hello = std::get_if<protocol::Hello>(&*msg);
    if (hello == nullptr) {
        conn.send(protocol::HelloAck{false, wire(config.frame_period_us)});
        throw HandshakeError("expected HELLO, got " + std::string(protocol::type_name(protocol::type_of(*msg))));
    }
    if (hello->version != protocol::kVersion) {
        conn.send(protocol::HelloAck{false, wire(config.frame_period_us)});
        throw HandshakeError("protocol version " + std::to_string(hello->version) + " rejected (server speaks " +
                             std::to_string(protocol::kVersion) + ")");
    }
    conn.send(protocol::HelloAck{true, wire(config.frame_period_us)});
    return *hello;
}

MatchOutcome run_match(const MatchConfig& config, net::Connection& client)
{
    config.validate();
    if (config.clock_mode != ClockMode::Realtime)
        throw UsageError("a remote client needs clock_mode realtime; virtual runs use a built-in agent");

    const auto params = config.round_duel();
    const auto period = std::chrono::microseconds(config.frame_period_us);
    const auto match_start = SteadyClock::now();

    MatchOutcome out;
    EventChannel events;
    std::jthread reader(reader_loop, std::ref(client), std::ref(events));

    try {
        for (std::int64_t r = 1; r <= config.rounds; ++r) {
            client.send(protocol::RoundStart{wire(r), wire(config.frames_per_round), wire(params.hp_total)});

            const std::size_t first_sample = out.samples.size();
            const auto start = SteadyClock::now() + std::chrono::milliseconds(1);
            RealtimeRound round(config, r, start, out.samples);
            duel::DuelState state = duel::fresh_state(params);

            for (std::int64_t f = 1; f <= config.frames_per_round + 1; ++f) {
                spin_until(start + (f - 1) * period, config.tick_guard);
                for (const auto& ev : events.take_all())
                    round.handle(ev);
                if (f > 1) {
                    state = duel::apply_frame(state, round.take_credit(f - 1), params);
                    if (state.ko)
                        break;
                }
                if (f > config.frames_per_round)
                    break;

                const auto now = SteadyClock::now();
                const auto ts = std::chrono::duration_cast<std::chrono::microseconds>(now - match_start).count();
                round.on_sent(f, now);
                client.send(protocol::Frame{wire(r), wire(f), wire(state.hp_self), wire(state.hp_opp), wire(ts)});
                out.sends.push_back(
                    {r, f, std::chrono::duration_cast<std::chrono::microseconds>(now - start).count()});
            }

            // Every sent frame is eventually answered or superseded: the client always
            // ends on the newest frame it holds.
            const auto settle_deadline = SteadyClock::now() + config.response_timeout;
            while (!round.settled()) {
                auto ev = events.wait_pop(settle_deadline);
                if (!ev)
                    throw RoundAborted("no ACTION for frame " + std::to_string(round.sent()) + " of round " +
                                       std::to_string(r) + " within timeout");
                round.handle(*ev);
            }

            RoundResult rr;
            rr.round_id = r;
            rr.hp_self = state.hp_self;
            rr.hp_opp = state.hp_opp;
            rr.elapsed_frames = state.wall_frame;
            rr.frames_sent = round.sent();
            rr.frames_processed = round.processed();
            rr.frames_skipped = round.skipped();
            rr.mean_overhead_us = mean_overhead(out.samples, first_sample);
            client.send(round_end_message(rr));
            out.rounds.push_back(rr);
        }
        client.send(protocol::MatchEnd{wire(config.rounds)});
    } catch (const RoundAborted& e) {
        out.aborted = true;
        out.abort_reason = e.what();
    } catch (const ConnectionError& e) {
        out.aborted = true;
        out.abort_reason = std::string("client disconnected: ") + e.what();
    }

    reader.request_stop();
    reader.join();
    return out;
}

MatchOutcome run_match(const MatchConfig& config, agents::BuiltinAgent& agent)
{
    config.validate();
    if (config.clock_mode != ClockMode::Virtual)
        throw UsageError("an in-process agent runs on the virtual clock; realtime runs use a connection");

    const auto params = config.round_duel();
    const std::int64_t period = config.frame_period_us;
    VirtualClock clock;
    MatchOutcome out;

    for (std::int64_t r = 1; r <= config.rounds; ++r) {
        clock.set(0);
        duel::DuelState state = duel::fresh_state(params);
        RoundResult rr;
        rr.round_id = r;
        const std::size_t first_sample = out.samples.size();

        std::deque<std::uint32_t> pending;
        std::deque<std::int64_t> credits;
        std::int64_t free_at = 0;

        for (std::int64_t f = 1; f <= config.frames_per_round; ++f) {
            const std::int64_t tick = (f - 1) * period;
            pending.push_back(wire(f));
            ++rr.frames_sent;
            out.sends.push_back({r, f, tick});

            // The client frees up before the next emission: it takes the newest frame.
            if (free_at < tick + period) {
                clock.set(std::max(free_at, tick));
                const auto d = frame_dispatch(pending);
                rr.frames_skipped += d.skipped;
                const std::int64_t g = *d.delivered;
                const std::int64_t emitted = (g - 1) * period;

                const auto frame = through_codec(
                    protocol::Frame{wire(r), wire(g), wire(state.hp_self), wire(state.hp_opp), wire(emitted)});
                const auto action = through_codec(agent.handle(frame, clock));
                if (action.frame_id != frame.frame_id) {
                    out.aborted = true;
                    out.abort_reason = "protocol error: ACTION for unknown frame_id " +
                                       std::to_string(action.frame_id) + " in round " + std::to_string(r);
                    return out;
                }
                free_at = clock.now_us();
                ++rr.frames_processed;
                out.samples.push_back(make_sample(r, g, free_at - emitted, action.reported_processing_us));
                credits.push_back(duel::credited_wall_frame(g, free_at, period));
            }

            const bool processed = !credits.empty() && credits.front() <= f;
            if (processed)
                credits.pop_front();
            state = duel::apply_frame(state, processed, params);
            if (state.ko)
                break;
        }
        rr.frames_skipped += static_cast<std::int64_t>(pending.size());

        rr.hp_self = state.hp_self;
        rr.hp_opp = state.hp_opp;
        rr.elapsed_frames = state.wall_frame;
        rr.mean_overhead_us = mean_overhead(out.samples, first_sample);
        out.rounds.push_back(rr);
    }
    return out;
}

}  // namespace frameguard::server
