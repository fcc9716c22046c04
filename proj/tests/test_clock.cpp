// SPDX-License-Identifier: Apache-2.0
#include "frameguard/clock.hpp"
#include "frameguard/net.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <vector>

using namespace frameguard;
using namespace std::chrono_literals;

TEST(VirtualClock, WaitAdvancesButNeverRewinds)
{
    VirtualClock c;
    EXPECT_EQ(c.now_us(), 0);
    EXPECT_EQ(c.wait_until_us(500), 500);
    EXPECT_EQ(c.wait_until_us(200), 500);
    c.set(10);
    EXPECT_EQ(c.now_us(), 10);
}

TEST(MonotonicClock, WaitsAtLeastUntilDeadline)
{
    MonotonicClock c;
    const auto start = c.now_us();
    const auto reached = c.wait_until_us(start + 3000);
    EXPECT_GE(reached, start + 3000);
    EXPECT_GE(c.now_us(), reached);
}

TEST(SpinUntil, NeverEarly)
{
    for (int i = 0; i < 50; ++i) {
        const auto deadline = SteadyClock::now() + 500us;
        EXPECT_GE(spin_until(deadline, 300us), deadline);
    }
}

TEST(SpinUntil, PastDeadlineReturnsAtOnce)
{
    const auto deadline = SteadyClock::now() - 1ms;
    const auto t0 = SteadyClock::now();
    spin_until(deadline);
    EXPECT_LT(SteadyClock::now() - t0, 1ms);
}

// Soft check: overshoot depends on scheduler load, so only a coarse bound is
// asserted on the median.
TEST(SpinUntil, MedianOvershootIsSmall)
{
    std::vector<std::int64_t> over;
    for (int i = 0; i < 200; ++i) {
        const auto deadline = SteadyClock::now() + 1ms;
        const auto at = spin_until(deadline, 500us);
        over.push_back(std::chrono::duration_cast<std::chrono::microseconds>(at - deadline).count());
    }
    std::nth_element(over.begin(), over.begin() + 100, over.end());
    EXPECT_LT(over[100], 200) << "median overshoot " << over[100] << " us";
}

TEST(DefaultPort, EnvironmentOverride)
{
    ::unsetenv("FRAMEGUARD_PORT");
    EXPECT_EQ(net::default_port(), net::kDefaultPort);
    ::setenv("FRAMEGUARD_PORT", "40123", 1);
    EXPECT_EQ(net::default_port(), 40123);
    ::setenv("FRAMEGUARD_PORT", "not-a-port", 1);
    EXPECT_EQ(net::default_port(), net::kDefaultPort);
    ::setenv("FRAMEGUARD_PORT", "70000", 1);
    EXPECT_EQ(net::default_port(), net::kDefaultPort);
    ::unsetenv("FRAMEGUARD_PORT");
}
