// SPDX-License-Identifier: Apache-2.0
#include "frameguard/clock.hpp"

#include <algorithm>
#include <thread>

namespace frameguard {

SteadyClock::time_point spin_until(SteadyClock::time_point deadline, std::chrono::microseconds guard)
{
    auto now = SteadyClock::now();
    if (now >= deadline)
        return now;
    if (deadline - now > guard)
        std::this_thread::sleep_until(deadline - guard);
    // Yield in the tail so a co-scheduled thread on the same core still runs.
    while ((now = SteadyClock::now()) < deadline)
        std::this_thread::yield();
    return now;
}

MonotonicClock::MonotonicClock(std::chrono::microseconds guard) : epoch_(SteadyClock::now()), guard_(guard) {}

std::int64_t MonotonicClock::now_us()
{
    return std::chrono::duration_cast<std::chrono::microseconds>(SteadyClock::now() - epoch_).count();
}

std::int64_t MonotonicClock::wait_until_us(std::int64_t deadline_us)
{
    const auto t = spin_until(to_time_point(deadline_us), guard_);
    return std::chrono::duration_cast<std::chrono::microseconds>(t - epoch_).count();
}

std::int64_t VirtualClock::wait_until_us(std::int64_t deadline_us)
{
    now_ = std::max(now_, deadline_us);
    return now_;
}

}  // namespace frameguard
