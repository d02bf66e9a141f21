/*
 * Copyright 2026 The bosonkey Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "bosonkey/kdc_net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include "bosonkey/kdc_wire.hpp"

namespace bosonkey {

namespace {

std::string errno_text(const char* what) {
    return std::string(what) + ": " + std::strerror(errno);
}

bool send_all(int fd, const char* data, std::size_t size) {
    while (size > 0) {
        const ssize_t n = ::send(fd, data, size, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            return false;
        }
        data += n;
        size -= static_cast<std::size_t>(n);
    }
    return true;
}

// 1 on success, 0 on EOF before any byte, -1 on error or mid-buffer EOF.
int recv_all(int fd, char* data, std::size_t size) {
    std::size_t got = 0;
    while (got < size) {
        const ssize_t n = ::recv(fd, data + got, size - got, 0);
        if (n == 0) {
            return got == 0 ? 0 : -1;
        }
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            return -1;
        }
        got += static_cast<std::size_t>(n);
    }
    return 1;
}

sockaddr_in resolve(const Endpoint& endpoint) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(endpoint.port);
    if (::inet_pton(AF_INET, endpoint.host.c_str(), &addr.sin_addr) == 1) {
        return addr;
    }
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    if (::getaddrinfo(endpoint.host.c_str(), nullptr, &hints, &result) != 0 || !result) {
        throw TransportError("cannot resolve host '" + endpoint.host + "'");
    }
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(result->ai_addr)->sin_addr;
    ::freeaddrinfo(result);
    return addr;
}

} // namespace

Endpoint Endpoint::parse(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos) {
        throw DomainError("endpoint '" + std::string(text) + "' must be host:port");
    }
    Endpoint e;
    if (colon > 0) {
        e.host = std::string(text.substr(0, colon));
    }
    const auto port_text = text.substr(colon + 1);
    unsigned value = 0;
    const auto [end, ec] =
        std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
    if (ec != std::errc{} || end != port_text.data() + port_text.size() || value > 65535) {
        throw DomainError("endpoint '" + std::string(text) + "' has an invalid port");
    }
    e.port = static_cast<std::uint16_t>(value);
    return e;
}

std::string Endpoint::to_string() const {
    return host + ":" + std::to_string(port);
}

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
}

Socket::~Socket() {
    close();
}

void Socket::shutdown() const {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
    }
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void write_frame(const Socket& socket, std::string_view body) {
    const std::string frame = wire::encode_frame(body);
    if (!send_all(socket.fd(), frame.data(), frame.size())) {
        throw TransportError(errno_text("send"));
    }
}

std::optional<std::string> read_frame(const Socket& socket) {
    char header[wire::kHeaderBytes];
    const int status = recv_all(socket.fd(), header, sizeof(header));
    if (status == 0) {
        return std::nullopt;
    }
    if (status < 0) {
        throw TransportError("connection closed mid-frame");
    }
    wire::FrameDecoder decoder;
    decoder.feed(std::string_view(header, sizeof(header)));
    if (auto body = decoder.next()) {
        return body; // zero-length frame
    }
    if (decoder.oversized()) {
        throw TransportError("frame exceeds the 1 MiB limit");
    }
    const std::uint32_t len = (static_cast<std::uint32_t>(static_cast<unsigned char>(header[0])) << 24) |
                              (static_cast<std::uint32_t>(static_cast<unsigned char>(header[1])) << 16) |
                              (static_cast<std::uint32_t>(static_cast<unsigned char>(header[2])) << 8) |
                              static_cast<std::uint32_t>(static_cast<unsigned char>(header[3]));
    std::string body(len, '\0');
    if (recv_all(socket.fd(), body.data(), len) != 1) {
        throw TransportError("connection closed mid-frame");
    }
    return body;
}

KdcServer::KdcServer(KeyStore& store, Endpoint bind) : store_(store), host_(bind.host) {
    listener_ = Socket(::socket(AF_INET, SOCK_STREAM, 0));
    if (!listener_.valid()) {
        throw TransportError(errno_text("socket"));
    }
    const int yes = 1;
    ::setsockopt(listener_.fd(), SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    sockaddr_in addr = resolve(bind);
    if (::bind(listener_.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        throw TransportError(errno_text(("bind " + bind.to_string()).c_str()));
    }
    if (::listen(listener_.fd(), 64) != 0) {
        throw TransportError(errno_text("listen"));
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listener_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

KdcServer::~KdcServer() {
    stop();
}

void KdcServer::start() {
    accept_thread_ = std::thread([this] { run(); });
}

void KdcServer::run() {
    while (!stopping_.load()) {
        const int fd = ::accept(listener_.fd(), nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) {
                continue;
            }
            break;
        }
        if (stopping_.load()) {
            ::close(fd);
            break;
        }
        const int yes = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof(yes));
        std::lock_guard lock(connections_mutex_);
        open_fds_.insert(fd);
        // TODO: reap workers whose connection has closed instead of holding them until stop()
        workers_.emplace_back([this, fd] { serve_connection(Socket(fd)); });
    }
}

void KdcServer::serve_connection(Socket connection) {
    try {
        while (auto body = read_frame(connection)) {
            const nlohmann::json response = wire::handle_request(store_, *body);
            write_frame(connection, response.dump());
        }
    } catch (const TransportError&) {
        // oversize frame or peer reset: drop the connection
    }
    std::lock_guard lock(connections_mutex_);
    open_fds_.erase(connection.fd());
}

void KdcServer::stop() {
    if (stopping_.exchange(true)) {
        return;
    }
    listener_.shutdown();
    if (accept_thread_.joinable()) {
        accept_thread_.join();
    }
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(connections_mutex_);
        for (int fd : open_fds_) {
            ::shutdown(fd, SHUT_RDWR);
        }
        workers.swap(workers_);
    }
    for (auto& t : workers) {
        t.join();
    }
    listener_.close();
}

KdcClient::KdcClient(const Endpoint& endpoint) {
    socket_ = Socket(::socket(AF_INET, SOCK_STREAM, 0));
    if (!socket_.valid()) {
        throw TransportError(errno_text("socket"));
    }
    sockaddr_in addr = resolve(endpoint);
    if (::connect(socket_.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        throw TransportError(errno_text(("connect " + endpoint.to_string()).c_str()));
    }
    const int yes = 1;
    ::setsockopt(socket_.fd(), IPPROTO_TCP, TCP_NODELAY, &yes, sizeof(yes));
}

nlohmann::json KdcClient::request(const nlohmann::json& body) {
    write_frame(socket_, body.dump());
    auto reply = read_frame(socket_);
    if (!reply) {
        throw TransportError("server closed the connection");
    }
    auto parsed = nlohmann::json::parse(*reply, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw TransportError("server sent a malformed response");
    }
    return parsed;
}

nlohmann::json KdcClient::checked(const nlohmann::json& body) {
    auto response = request(body);
    if (!response.value("ok", false)) {
        throw KdcRequestError(response.value("code", std::string("UNKNOWN")),
                              response.value("message", std::string()));
    }
    return response;
}

int KdcClient::ping() {
    return checked({{"op", "PING"}}).at("d").get<int>();
}

std::size_t KdcClient::register_dits(Party party, std::span<const int> dits) {
    nlohmann::json req{{"op", "REGISTER"},
                       {"party", std::string(to_string(party))},
                       {"dits", std::vector<int>(dits.begin(), dits.end())}};
    return checked(req).at("completed").get<std::size_t>();
}

JointKeyRecord KdcClient::fetch() {
    const auto r = checked({{"op", "FETCH"}});
    return {r.at("index").get<std::uint64_t>(), r.at("key").get<int>()};
}

JointKeyRecord client_fetch(const Endpoint& endpoint) {
    return KdcClient(endpoint).fetch();
}

std::size_t client_register(const Endpoint& endpoint, Party party, std::span<const int> dits) {
    return KdcClient(endpoint).register_dits(party, dits);
}

void serve(KeyStore& store, const Endpoint& endpoint) {
    KdcServer server(store, endpoint);
    server.run();
}

} // namespace bosonkey
