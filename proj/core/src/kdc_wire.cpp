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

#include "bosonkey/kdc_wire.hpp"

#include "bosonkey/errors.hpp"

namespace bosonkey::wire {

std::string encode_frame(std::string_view body) {
    if (body.size() > kMaxFrameBytes) {
        throw DomainError("frame body of " + std::to_string(body.size()) +
                          " bytes exceeds the 1 MiB limit");
    }
    const auto len = static_cast<std::uint32_t>(body.size());
    std::string out;
    out.reserve(kHeaderBytes + body.size());
    out.push_back(static_cast<char>((len >> 24) & 0xFF));
    out.push_back(static_cast<char>((len >> 16) & 0xFF));
    out.push_back(static_cast<char>((len >> 8) & 0xFF));
    out.push_back(static_cast<char>(len & 0xFF));
    out.append(body);
    return out;
}

void FrameDecoder::feed(std::string_view bytes) {
    if (!oversized_) {
        buffer_.append(bytes);
    }
}

std::optional<std::string> FrameDecoder::next() {
    if (oversized_ || buffer_.size() < kHeaderBytes) {
        return std::nullopt;
    }
    const auto byte = [&](std::size_t i) {
        return static_cast<std::uint32_t>(static_cast<unsigned char>(buffer_[i]));
    };
    const std::uint32_t len = (byte(0) << 24) | (byte(1) << 16) | (byte(2) << 8) | byte(3);
    if (len > kMaxFrameBytes) {
        oversized_ = true;
        buffer_.clear();
        return std::nullopt;
    }
    if (buffer_.size() < kHeaderBytes + len) {
        return std::nullopt;
    }
    std::string body = buffer_.substr(kHeaderBytes, len);
    buffer_.erase(0, kHeaderBytes + len);
    return body;
}

nlohmann::json error_response(std::string_view code, std::string_view message) {
    return {{"ok", false}, {"code", std::string(code)}, {"message", std::string(message)}};
}

namespace {

nlohmann::json handle_register(KeyStore& store, const nlohmann::json& req) {
    if (!req.contains("party") || !req.at("party").is_string()) {
        return error_response(code::bad_request, "REGISTER needs a string 'party'");
    }
    const auto party_name = req.at("party").get<std::string>();
    if (party_name != "A" && party_name != "B") {
        return error_response(code::bad_request, "party must be \"A\" or \"B\"");
    }
    if (req.contains("d")) {
        if (!req.at("d").is_number_integer() || req.at("d").get<long long>() != store.d()) {
            return error_response(code::bad_request,
                                  "dit modulus does not match the server (d = " +
                                      std::to_string(store.d()) + ")");
        }
    }
    if (!req.contains("dits") || !req.at("dits").is_array()) {
        return error_response(code::bad_request, "REGISTER needs an integer array 'dits'");
    }
    std::vector<int> dits;
    dits.reserve(req.at("dits").size());
    for (const auto& v : req.at("dits")) {
        if (!v.is_number_integer()) {
            return error_response(code::bad_request, "dits must be integers");
        }
        const long long x = v.get<long long>();
        if (x < 0 || x >= store.d()) {
            return error_response(code::range, "dit " + std::to_string(x) + " is not in Z_" +
                                                   std::to_string(store.d()));
        }
        dits.push_back(static_cast<int>(x));
    }
    const std::size_t completed = store.register_dits(parse_party(party_name), dits);
    return {{"ok", true}, {"completed", completed}, {"live", store.live_count()}};
}

} // namespace

nlohmann::json handle_request(KeyStore& store, std::string_view body) {
    const auto req = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (req.is_discarded() || !req.is_object()) {
        return error_response(code::bad_request, "body is not a JSON object");
    }
    if (!req.contains("op") || !req.at("op").is_string()) {
        return error_response(code::bad_request, "missing string field 'op'");
    }
    const auto op = req.at("op").get<std::string>();
    try {
        if (op == "PING") {
            return {{"ok", true}, {"pong", true}, {"d", store.d()}};
        }
        if (op == "FETCH") {
            const JointKeyRecord r = store.fetch();
            return {{"ok", true}, {"index", r.index}, {"key", r.key}};
        }
        if (op == "REGISTER") {
            return handle_register(store, req);
        }
    } catch (const StoreEmptyError& e) {
        return error_response(code::empty, e.what());
    } catch (const DomainError& e) {
        return error_response(code::range, e.what());
    }
    return error_response(code::bad_request, "unknown op '" + op + "'");
}

} // namespace bosonkey::wire
