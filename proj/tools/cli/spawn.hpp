// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <string>
#include <sys/types.h>
#include <vector>

namespace frameguard::cli {

/// A child process that is reaped (and killed if still running) on destruction.
class ChildProcess {
public:
    /// Runs argv[0] with posix_spawnp. Throws std::system_error on failure.
    static ChildProcess spawn(const std::vector<std::string>& argv);

    ChildProcess() = default;
    ~ChildProcess();
    ChildProcess(ChildProcess&& other) noexcept;
    ChildProcess& operator=(ChildProcess&& other) noexcept;
    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    /// Waits up to `timeout`, then kills. Returns the exit status, or -signal.
    int wait(std::chrono::milliseconds timeout);

private:
    pid_t pid_ = -1;
};

}  // namespace frameguard::cli
