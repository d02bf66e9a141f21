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

#include <gtest/gtest.h>

#include <sys/socket.h>

#include <algorithm>
#include <set>
#include <thread>

#include "bosonkey/errors.hpp"
#include "bosonkey/kdc.hpp"
#include "bosonkey/kdc_net.hpp"
#include "bosonkey/kdc_wire.hpp"

namespace bosonkey {
namespace {

using nlohmann::json;

std::vector<int> v(std::initializer_list<int> xs) { return xs; }

TEST(KeyStore, SinglePair) {
    KeyStore store(8);
    EXPECT_EQ(store.register_dits(Party::A, v({3})), 0u);
    EXPECT_EQ(store.register_dits(Party::B, v({5})), 1u);
    EXPECT_EQ(store.live_count(), 1u);
    const auto r = store.fetch();
    EXPECT_EQ(r.index, 1u);
    EXPECT_EQ(r.key, 0);
    EXPECT_EQ(store.live_count(), 0u);
    EXPECT_TRUE(store.is_tombstoned(1));
    EXPECT_THROW(store.fetch(), StoreEmptyError);
}

TEST(KeyStore, PendingSurplus) {
    KeyStore store(8);
    store.register_dits(Party::A, v({1, 2, 3}));
    EXPECT_EQ(store.register_dits(Party::B, v({4})), 1u);
    EXPECT_EQ(store.pending_count(Party::A), 2u);
    EXPECT_EQ(store.pending_count(Party::B), 0u);
    EXPECT_EQ(store.register_dits(Party::B, v({7, 7, 7})), 2u);
    EXPECT_EQ(store.pending_count(Party::B), 1u);
    EXPECT_EQ(store.live_count(), 3u);
}

TEST(KeyStore, ArrivalOrderDoesNotMatter) {
    KeyStore ab(10), ba(10);
    ab.register_dits(Party::A, v({1, 9, 4}));
    ab.register_dits(Party::B, v({2, 3, 8}));
    ba.register_dits(Party::B, v({2, 3, 8}));
    ba.register_dits(Party::A, v({1, 9, 4}));
    EXPECT_EQ(ab.snapshot().live, ba.snapshot().live);
    const std::vector<JointKeyRecord> expected{{1, 3}, {2, 2}, {3, 2}};
    EXPECT_EQ(ab.snapshot().live, expected);
}

TEST(KeyStore, SequentialFetchesAreDistinct) {
    KeyStore store(4, 11);
    store.register_dits(Party::A, v({0, 1, 2, 3}));
    store.register_dits(Party::B, v({3, 2, 1, 0}));
    std::set<std::uint64_t> seen;
    for (int k = 0; k < 4; ++k) {
        const auto r = store.fetch();
        EXPECT_TRUE(seen.insert(r.index).second);
        EXPECT_EQ(r.key, 3);
    }
    EXPECT_THROW(store.fetch(), StoreEmptyError);
}

TEST(KeyStore, RangeIsAllOrNothing) {
    KeyStore store(8);
    EXPECT_THROW(store.register_dits(Party::A, v({1, 8})), DomainError);
    EXPECT_THROW(store.register_dits(Party::A, v({-1})), DomainError);
    EXPECT_EQ(store.pending_count(Party::A), 0u);
    EXPECT_THROW(KeyStore(1), DomainError);
}

TEST(KeyStore, NoRawDitsAfterPairing) {
    KeyStore store(16);
    store.register_dits(Party::A, v({11, 12, 13}));
    store.register_dits(Party::B, v({1, 2, 3}));
    const auto snap = store.snapshot();
    EXPECT_TRUE(snap.pending_a.empty());
    EXPECT_TRUE(snap.pending_b.empty());
    const std::vector<JointKeyRecord> expected{{1, 12}, {2, 14}, {3, 0}};
    EXPECT_EQ(snap.live, expected);
    const auto j = snapshot_to_json(snap);
    EXPECT_TRUE(j.at("pending").at("A").empty());
    EXPECT_TRUE(j.at("pending").at("B").empty());
    std::set<std::string> keys;
    for (const auto& [k, _] : j.items()) {
        keys.insert(k);
    }
    EXPECT_EQ(keys, (std::set<std::string>{"d", "live", "pending", "tombstones"}));
}

TEST(KeyStore, ReplayIsDeterministic) {
    auto run = [] {
        KeyStore store(16, 2024);
        std::vector<int> a, b;
        for (int k = 0; k < 32; ++k) {
            a.push_back((k * 7) % 16);
            b.push_back((k * 3 + 1) % 16);
        }
        store.register_dits(Party::A, a);
        store.register_dits(Party::B, b);
        std::vector<JointKeyRecord> order;
        for (int k = 0; k < 32; ++k) {
            order.push_back(store.fetch());
        }
        return order;
    };
    const auto first = run();
    EXPECT_EQ(first, run());
    // uniform selection, not FIFO
    EXPECT_FALSE(std::is_sorted(first.begin(), first.end(),
                                [](const auto& x, const auto& y) { return x.index < y.index; }));
}

TEST(KeyStoreProperty, ConcurrentFetchesNeverRepeat) {
    for (int round = 0; round < 20; ++round) {
        KeyStore store(8, static_cast<std::uint64_t>(round));
        std::vector<int> dits(64, 1);
        store.register_dits(Party::A, dits);
        store.register_dits(Party::B, dits);
        std::vector<std::vector<std::uint64_t>> got(8);
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < 8; ++t) {
            pool.emplace_back([&, t] {
                for (;;) {
                    try {
                        got[t].push_back(store.fetch().index);
                    } catch (const StoreEmptyError&) {
                        return;
                    }
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
        std::set<std::uint64_t> all;
        std::size_t n = 0;
        for (const auto& g : got) {
            all.insert(g.begin(), g.end());
            n += g.size();
        }
        ASSERT_EQ(n, 64u);
        ASSERT_EQ(all.size(), 64u);
    }
}

TEST(Wire, FrameEncoding) {
    const auto f = wire::encode_frame("{}");
    ASSERT_EQ(f.size(), 6u);
    EXPECT_EQ(f.substr(0, 4), std::string("\0\0\0\x02", 4));
    EXPECT_EQ(f.substr(4), "{}");
}

TEST(Wire, DecoderHandlesSplitsAndBatches) {
    const std::string stream = wire::encode_frame("abc") + wire::encode_frame("") + wire::encode_frame("xyz!");
    wire::FrameDecoder dec;
    std::vector<std::string> out;
    for (char c : stream) {
        dec.feed(std::string_view(&c, 1));
        while (auto body = dec.next()) {
            out.push_back(*body);
        }
    }
    EXPECT_EQ(out, (std::vector<std::string>{"abc", "", "xyz!"}));
    EXPECT_EQ(dec.buffered(), 0u);
}

TEST(Wire, DecoderFlagsOversize) {
    wire::FrameDecoder dec;
    dec.feed(std::string("\x00\x10\x00\x01", 4));
    EXPECT_FALSE(dec.next().has_value());
    EXPECT_TRUE(dec.oversized());

    wire::FrameDecoder exact;
    exact.feed(std::string("\x00\x10\x00\x00", 4));
    EXPECT_FALSE(exact.next().has_value());
    EXPECT_FALSE(exact.oversized());
}

TEST(Wire, Requests) {
    KeyStore store(8, 3);
    EXPECT_EQ(wire::handle_request(store, R"({"op":"PING"})"), (json{{"ok", true}, {"pong", true}, {"d", 8}}));

    auto r = wire::handle_request(store, R"({"op":"REGISTER","party":"A","dits":[1,2],"d":8})");
    EXPECT_EQ(r, (json{{"ok", true}, {"completed", 0}, {"live", 0}}));
    r = wire::handle_request(store, R"({"op":"REGISTER","party":"B","dits":[7]})");
    EXPECT_EQ(r, (json{{"ok", true}, {"completed", 1}, {"live", 1}}));

    r = wire::handle_request(store, R"({"op":"FETCH"})");
    EXPECT_EQ(r, (json{{"ok", true}, {"index", 1}, {"key", 0}}));
    r = wire::handle_request(store, R"({"op":"FETCH"})");
    EXPECT_EQ(r.at("ok"), false);
    EXPECT_EQ(r.at("code"), "EMPTY");
}

TEST(Wire, Errors) {
    KeyStore store(8);
    auto code = [&](std::string_view body) {
        return wire::handle_request(store, body).at("code").get<std::string>();
    };
    EXPECT_EQ(code("{not json"), "BAD_REQUEST");
    EXPECT_EQ(code(""), "BAD_REQUEST");
    EXPECT_EQ(code("[1,2]"), "BAD_REQUEST");
    EXPECT_EQ(code(R"({"op":"DANCE"})"), "BAD_REQUEST");
    EXPECT_EQ(code(R"({"op":7})"), "BAD_REQUEST");
    EXPECT_EQ(code(R"({"op":"REGISTER","party":"C","dits":[1]})"), "BAD_REQUEST");
    EXPECT_EQ(code(R"({"op":"REGISTER","party":"A"})"), "BAD_REQUEST");
    EXPECT_EQ(code(R"({"op":"REGISTER","party":"A","dits":[1.5]})"), "BAD_REQUEST");
    EXPECT_EQ(code(R"({"op":"REGISTER","party":"A","dits":[1],"d":16})"), "BAD_REQUEST");
    EXPECT_EQ(code(R"({"op":"REGISTER","party":"A","dits":[1,8]})"), "RANGE");
    EXPECT_EQ(code(R"({"op":"REGISTER","party":"A","dits":[-3]})"), "RANGE");
    EXPECT_EQ(store.pending_count(Party::A), 0u);
    const auto e = wire::error_response("EMPTY", "nothing");
    EXPECT_EQ(e, (json{{"ok", false}, {"code", "EMPTY"}, {"message", "nothing"}}));
}

TEST(Endpoint, Parse) {
    const auto e = Endpoint::parse("127.0.0.1:7000");
    EXPECT_EQ(e.host, "127.0.0.1");
    EXPECT_EQ(e.port, 7000);
    EXPECT_EQ(e.to_string(), "127.0.0.1:7000");
    EXPECT_THROW(Endpoint::parse("nohost"), DomainError);
    EXPECT_THROW(Endpoint::parse("h:99999"), DomainError);
    EXPECT_THROW(Endpoint::parse("h:x"), DomainError);
}

class Loopback : public ::testing::Test {
  protected:
    Loopback() : store(8, 5), server(store, Endpoint{"127.0.0.1", 0}) { server.start(); }
    ~Loopback() override { server.stop(); }

    KeyStore store;
    KdcServer server;
};

TEST_F(Loopback, RegisterThenFetchThenEmpty) {
    EXPECT_EQ(client_register(server.endpoint(), Party::A, v({3})), 0u);
    EXPECT_EQ(client_register(server.endpoint(), Party::B, v({5})), 1u);
    const auto r = client_fetch(server.endpoint());
    EXPECT_EQ(r.index, 1u);
    EXPECT_EQ(r.key, 0);
    try {
        client_fetch(server.endpoint());
        FAIL() << "expected EMPTY";
    } catch (const KdcRequestError& e) {
        EXPECT_EQ(e.code(), "EMPTY");
    }
}

TEST_F(Loopback, BadRequestKeepsConnection) {
    KdcClient client(server.endpoint());
    EXPECT_EQ(client.ping(), 8);
    write_frame(client.socket(), "{broken");
    const auto reply = read_frame(client.socket());
    ASSERT_TRUE(reply.has_value());
    EXPECT_EQ(json::parse(*reply).at("code"), "BAD_REQUEST");
    EXPECT_EQ(client.ping(), 8);
    const auto range = client.request(json{{"op", "REGISTER"}, {"party", "A"}, {"dits", {9}}});
    EXPECT_EQ(range.at("code"), "RANGE");
    EXPECT_EQ(client.register_dits(Party::A, v({1, 2})), 0u);
}

TEST_F(Loopback, OversizeFrameClosesConnection) {
    KdcClient client(server.endpoint());
    const char header[4] = {0x00, 0x20, 0x00, 0x00};
    ASSERT_EQ(::send(client.socket().fd(), header, 4, MSG_NOSIGNAL), 4);
    EXPECT_FALSE(read_frame(client.socket()).has_value());
    // the server itself keeps serving
    EXPECT_EQ(KdcClient(server.endpoint()).ping(), 8);
}

TEST_F(Loopback, EightConcurrentClientsGetDistinctIndices) {
    std::vector<int> dits{0, 1, 2, 3, 4, 5, 6, 7};
    client_register(server.endpoint(), Party::A, dits);
    client_register(server.endpoint(), Party::B, dits);
    std::vector<JointKeyRecord> got(8);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < 8; ++t) {
        pool.emplace_back([&, t] { got[t] = client_fetch(server.endpoint()); });
    }
    for (auto& th : pool) {
        th.join();
    }
    std::set<std::uint64_t> indices;
    for (const auto& r : got) {
        indices.insert(r.index);
        EXPECT_EQ(r.key, (2 * static_cast<int>(r.index - 1)) % 8);
    }
    EXPECT_EQ(indices.size(), 8u);
    EXPECT_THROW(client_fetch(server.endpoint()), KdcRequestError);
    EXPECT_TRUE(store.snapshot().pending_a.empty());
}

TEST(Transport, ConnectFailureIsTransportError) {
    KeyStore store(4);
    std::uint16_t port;
    {
        KdcServer s(store, Endpoint{"127.0.0.1", 0});
        port = s.port();
    }
    EXPECT_THROW(client_fetch(Endpoint{"127.0.0.1", port}), TransportError);
}

} // namespace
} // namespace bosonkey
