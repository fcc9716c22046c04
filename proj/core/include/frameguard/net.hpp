// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "frameguard/protocol.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frameguard::net {

inline constexpr std::uint16_t kDefaultPort = 31415;

/// Default port, overridden by FRAMEGUARD_PORT when it holds a valid port number.
std::uint16_t default_port();

/// Owning TCP stream socket. Move-only.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket();
    Socket(Socket&& other) noexcept;
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    bool valid() const noexcept { return fd_ >= 0; }
    int fd() const noexcept { return fd_; }

    /// Throws ConnectionError if the peer is gone.
    void send_all(std::span<const std::uint8_t> bytes) const;
    /// Reads what is available, waiting up to `timeout` (negative = forever).
    /// Returns 0 bytes on timeout; throws ConnectionError on EOF or error.
    std::size_t recv_some(std::span<std::uint8_t> into, std::chrono::milliseconds timeout) const;
    void shutdown_write() const noexcept;
    void close() noexcept;

private:
    int fd_ = -1;
};

class Listener {
public:
    /// Binds and listens; port 0 picks an ephemeral port. Throws BindError.
    static Listener bind(const std::string& host, std::uint16_t port);

    std::uint16_t port() const noexcept { return port_; }
    /// Returns nullopt on timeout.
    std::optional<Socket> accept(std::chrono::milliseconds timeout) const;

private:
    Socket sock_;
    std::uint16_t port_ = 0;
};

/// Connects with TCP_NODELAY, retrying refused connections until `timeout` elapses.
Socket connect(const std::string& host, std::uint16_t port,
               std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

/// Message-level view of a socket. send() and receive() may run on different threads;
/// each side has a single owner.
class Connection {
public:
    explicit Connection(Socket sock) : sock_(std::move(sock)) {}

    void send(const protocol::Message& msg) const;
    /// Next message, waiting up to `timeout`; nullopt on timeout. Throws
    /// ConnectionError when the peer closes, ProtocolError on bad bytes.
    std::optional<protocol::Message> receive(std::chrono::milliseconds timeout);
    /// Every message that can be decoded without blocking.
    std::vector<protocol::Message> drain_available();

    const Socket& socket() const noexcept { return sock_; }
    void close() noexcept { sock_.close(); }

private:
    bool fill(std::chrono::milliseconds timeout);

    Socket sock_;
    protocol::StreamDecoder decoder_;
};

}  // namespace frameguard::net
