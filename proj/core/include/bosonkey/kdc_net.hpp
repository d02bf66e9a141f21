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

#ifndef BOSONKEY_KDC_NET_HPP
#define BOSONKEY_KDC_NET_HPP

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "bosonkey/crypto.hpp"
#include "bosonkey/errors.hpp"
#include "bosonkey/kdc.hpp"

namespace bosonkey {

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    /// "host:port" or ":port".
    static Endpoint parse(std::string_view text);
    std::string to_string() const;
};

/// The server answered {"ok": false, "code": ...}.
class KdcRequestError : public ProtocolError {
  public:
    KdcRequestError(std::string code, const std::string& message)
        : ProtocolError(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

/// Owning POSIX file descriptor.
class Socket {
  public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket();

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    void shutdown() const;
    void close();

  private:
    int fd_ = -1;
};

/// Blocking frame I/O on a connected socket. read_frame returns nothing on
/// orderly EOF and throws TransportError on errors or oversize frames.
void write_frame(const Socket& socket, std::string_view body);
std::optional<std::string> read_frame(const Socket& socket);

/**
 * TCP front end for a KeyStore.
 *
 * One thread accepts connections and each connection gets its own thread;
 * all store mutations go through the store's own lock. A frame larger than
 * 1 MiB closes that connection. Malformed requests get a BAD_REQUEST frame
 * and the connection stays open.
 */
class KdcServer {
  public:
    /// Binds and listens immediately; port 0 picks an ephemeral port.
    KdcServer(KeyStore& store, Endpoint bind);
    ~KdcServer();
    KdcServer(const KdcServer&) = delete;
    KdcServer& operator=(const KdcServer&) = delete;

    std::uint16_t port() const { return port_; }
    Endpoint endpoint() const { return {host_, port_}; }

    /// Serves on a background thread until stop().
    void start();
    /// Serves on the calling thread until stop() is called from elsewhere.
    void run();
    void stop();

  private:
    void serve_connection(Socket connection);

    KeyStore& store_;
    std::string host_;
    std::uint16_t port_ = 0;
    Socket listener_;
    std::atomic<bool> stopping_{false};
    std::thread accept_thread_;
    std::mutex connections_mutex_;
    std::set<int> open_fds_;
    std::vector<std::thread> workers_;
};

/// Blocking client holding one connection.
class KdcClient {
  public:
    explicit KdcClient(const Endpoint& endpoint);

    /// Sends a raw request and returns the raw response object.
    nlohmann::json request(const nlohmann::json& body);

    /// Returns the server's d.
    int ping();
    std::size_t register_dits(Party party, std::span<const int> dits);
    JointKeyRecord fetch();

    const Socket& socket() const { return socket_; }

  private:
    nlohmann::json checked(const nlohmann::json& body);

    Socket socket_;
};

/// One-shot helpers, each on a fresh connection.
JointKeyRecord client_fetch(const Endpoint& endpoint);
std::size_t client_register(const Endpoint& endpoint, Party party, std::span<const int> dits);

/// Runs a server on the calling thread until the process is stopped.
void serve(KeyStore& store, const Endpoint& endpoint);

} // namespace bosonkey

#endif
