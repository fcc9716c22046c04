// SPDX-License-Identifier: Apache-2.0
#include "spawn.hpp"

#include <cerrno>
#include <csignal>
#include <spawn.h>
#include <sys/wait.h>
#include <system_error>
#include <thread>

extern char** environ;

namespace frameguard::cli {

ChildProcess ChildProcess::spawn(const std::vector<std::string>& argv)
{
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv)
        args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    ChildProcess child;
    const int rc = ::posix_spawnp(&child.pid_, args[0], nullptr, nullptr, args.data(), environ);
    if (rc != 0) {
        child.pid_ = -1;
        throw std::system_error(rc, std::generic_category(), "spawn " + argv[0]);
    }
    return child;
}

ChildProcess::~ChildProcess()
{
    if (pid_ > 0)
        wait(std::chrono::milliseconds(2000));
}

ChildProcess::ChildProcess(ChildProcess&& other) noexcept : pid_(other.pid_) { other.pid_ = -1; }

ChildProcess& ChildProcess::operator=(ChildProcess&& other) noexcept
{
    if (this != &other) {
        if (pid_ > 0)
            wait(std::chrono::milliseconds(2000));
        pid_ = other.pid_;
        other.pid_ = -1;
    }
    return *this;
}

int ChildProcess::wait(std::chrono::milliseconds timeout)
{
    if (pid_ <= 0)
        return 0;
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    int status = 0;
    for (;;) {
        const pid_t r = ::waitpid(pid_, &status, WNOHANG);
        if (r == pid_)
            break;
        if (r < 0 && errno != EINTR) {
            pid_ = -1;
            return -1;
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            ::kill(pid_, SIGKILL);
            ::waitpid(pid_, &status, 0);
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    pid_ = -1;
    if (WIFEXITED(status))
        return WEXITSTATUS(status);
    if (WIFSIGNALED(status))
        return -WTERMSIG(status);
    return -1;
}

}  // namespace frameguard::cli
