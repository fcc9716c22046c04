// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>

namespace frameguard {

using SteadyClock = std::chrono::steady_clock;

inline constexpr std::chrono::microseconds kDefaultSpinGuard{2000};

/// Sleeps coarsely until `guard` before the deadline, then polls the monotonic
/// clock. Returns the first observed time at or after the deadline.
SteadyClock::time_point spin_until(SteadyClock::time_point deadline,
                                   std::chrono::microseconds guard = kDefaultSpinGuard);

/// Microsecond clock that agents and the server schedule against. Realtime runs
/// use MonotonicClock; virtual runs share one VirtualClock between both sides.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_us() = 0;
    /// Blocks (or advances) until now_us() >= deadline_us; returns now_us().
    virtual std::int64_t wait_until_us(std::int64_t deadline_us) = 0;
};

class MonotonicClock final : public Clock {
public:
    explicit MonotonicClock(std::chrono::microseconds guard = kDefaultSpinGuard);

    std::int64_t now_us() override;
    std::int64_t wait_until_us(std::int64_t deadline_us) override;

    SteadyClock::time_point to_time_point(std::int64_t us) const { return epoch_ + std::chrono::microseconds(us); }

private:
    SteadyClock::time_point epoch_;
    std::chrono::microseconds guard_;
};

class VirtualClock final : public Clock {
public:
    std::int64_t now_us() override { return now_; }
    std::int64_t wait_until_us(std::int64_t deadline_us) override;
    void set(std::int64_t us) { now_ = us; }

private:
    std::int64_t now_ = 0;
};

}  // namespace frameguard
