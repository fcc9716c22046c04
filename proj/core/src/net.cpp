// SPDX-License-Identifier: Apache-2.0
#include "frameguard/net.hpp"

#include "frameguard/errors.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <thread>
#include <unistd.h>

namespace frameguard::net {

namespace {

std::string errno_text(const char* what)
{
    return std::string(what) + ": " + std::strerror(errno);
}

void set_nodelay(int fd)
{
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

sockaddr_in resolve(const std::string& host, std::uint16_t port)
{
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    const std::string h = host == "localhost" || host.empty() ? "127.0.0.1" : host;
    if (::inet_pton(AF_INET, h.c_str(), &addr.sin_addr) == 1)
        return addr;

    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(h.c_str(), nullptr, &hints, &res) != 0 || res == nullptr)
        throw ConnectionError("cannot resolve host " + host);
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    ::freeaddrinfo(res);
    return addr;
}

// Returns false on timeout.
bool wait_readable(int fd, std::chrono::milliseconds timeout)
{
    pollfd p{fd, POLLIN, 0};
    const int ms = timeout.count() < 0 ? -1 : static_cast<int>(timeout.count());
    for (;;) {
        const int rc = ::poll(&p, 1, ms);
        if (rc > 0)
            return true;
        if (rc == 0)
            return false;
        if (errno != EINTR)
            throw ConnectionError(errno_text("poll"));
    }
}

}  // namespace

std::uint16_t default_port()
{
    if (const char* env = std::getenv("FRAMEGUARD_PORT")) {
        std::uint16_t port = 0;
        const char* end = env + std::strlen(env);
        auto [p, ec] = std::from_chars(env, end, port);
        if (ec == std::errc{} && p == end && port != 0)
            return port;
    }
    return kDefaultPort;
}

Socket::~Socket() { close(); }

Socket::Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Socket& Socket::operator=(Socket&& other) noexcept
{
    if (this != &other) {
        close();
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

void Socket::close() noexcept
{
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void Socket::shutdown_write() const noexcept
{
    if (fd_ >= 0)
        ::shutdown(fd_, SHUT_WR);
}

void Socket::send_all(std::span<const std::uint8_t> bytes) const
{
    std::size_t off = 0;
    while (off < bytes.size()) {
        const ssize_t n = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw ConnectionError(errno_text("send"));
        }
        off += static_cast<std::size_t>(n);
    }
}

std::size_t Socket::recv_some(std::span<std::uint8_t> into, std::chrono::milliseconds timeout) const
{
    if (!wait_readable(fd_, timeout))
        return 0;
    for (;;) {
        const ssize_t n = ::recv(fd_, into.data(), into.size(), 0);
        if (n > 0)
            return static_cast<std::size_t>(n);
        if (n == 0)
            throw ConnectionError("peer closed the connection");
        if (errno == EINTR)
            continue;
        if (errno == EAGAIN || errno == EWOULDBLOCK)
            return 0;
        throw ConnectionError(errno_text("recv"));
    }
}

Listener Listener::bind(const std::string& host, std::uint16_t port)
{
    Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!s.valid())
        throw BindError(errno_text("socket"));
    // Linux still refuses a port that has a live listener.
    const int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr = resolve(host, port);
    if (::bind(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        throw BindError(errno_text(("bind " + host + ":" + std::to_string(port)).c_str()));
    if (::listen(s.fd(), 4) != 0)
        throw BindError(errno_text("listen"));

    socklen_t len = sizeof(addr);
    ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len);

    Listener l;
    l.sock_ = std::move(s);
    l.port_ = ntohs(addr.sin_port);
    return l;
}

std::optional<Socket> Listener::accept(std::chrono::milliseconds timeout) const
{
    if (!wait_readable(sock_.fd(), timeout))
        return std::nullopt;
    const int fd = ::accept4(sock_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0)
        throw ConnectionError(errno_text("accept"));
    set_nodelay(fd);
    return Socket(fd);
}

Socket connect(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout)
{
    const sockaddr_in addr = resolve(host, port);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
        if (!s.valid())
            throw ConnectionError(errno_text("socket"));
        if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0) {
            set_nodelay(s.fd());
            return s;
        }
        if (errno != ECONNREFUSED || std::chrono::steady_clock::now() >= deadline)
            throw ConnectionError(errno_text(("connect " + host + ":" + std::to_string(port)).c_str()));
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
}

void Connection::send(const protocol::Message& msg) const
{
    const auto bytes = protocol::encode(msg);
    sock_.send_all(bytes);
}

bool Connection::fill(std::chrono::milliseconds timeout)
{
    std::uint8_t buf[4096];
    const std::size_t n = sock_.recv_some(buf, timeout);
    if (n == 0)
        return false;
    decoder_.feed(std::span<const std::uint8_t>(buf, n));
    return true;
}

std::optional<protocol::Message> Connection::receive(std::chrono::milliseconds timeout)
{
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        if (auto msg = decoder_.next())
            return msg;
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (timeout.count() >= 0 && left.count() < 0)
            return std::nullopt;
        if (!fill(timeout.count() < 0 ? timeout : left) && timeout.count() >= 0 &&
            std::chrono::steady_clock::now() >= deadline)
            return std::nullopt;
    }
}

std::vector<protocol::Message> Connection::drain_available()
{
    while (fill(std::chrono::milliseconds(0))) {
    }
    std::vector<protocol::Message> out;
    while (auto msg = decoder_.next())
        out.push_back(std::move(*msg));
    return out;
}

}  // namespace frameguard::net
