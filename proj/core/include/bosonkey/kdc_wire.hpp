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

#ifndef BOSONKEY_KDC_WIRE_HPP
#define BOSONKEY_KDC_WIRE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bosonkey/kdc.hpp"

namespace bosonkey::wire {

// Frame: 4-byte big-endian unsigned body length, then the UTF-8 JSON body.
//
// Requests:  {"op":"REGISTER","party":"A"|"B","dits":[...]} (optional "d"),
//            {"op":"FETCH"}, {"op":"PING"}
// Responses: {"ok":true, ...payload} or {"ok":false,"code":...,"message":...}

inline constexpr std::size_t kMaxFrameBytes = std::size_t{1} << 20;
inline constexpr std::size_t kHeaderBytes = 4;

namespace code {
inline constexpr std::string_view empty = "EMPTY";
inline constexpr std::string_view bad_request = "BAD_REQUEST";
inline constexpr std::string_view range = "RANGE";
} // namespace code

/// Length-prefixes `body`. Throws DomainError above kMaxFrameBytes.
std::string encode_frame(std::string_view body);

/// Incremental frame parser for a byte stream.
class FrameDecoder {
  public:
    void feed(std::string_view bytes);
    /// Next complete body, if any. Once an oversize header is seen, every
    /// call returns nothing and oversized() becomes true.
    std::optional<std::string> next();
    bool oversized() const { return oversized_; }
    std::size_t buffered() const { return buffer_.size(); }

  private:
    std::string buffer_;
    bool oversized_ = false;
};

nlohmann::json error_response(std::string_view code, std::string_view message);

/// Applies one request body to `store` and builds the response. Never throws
/// for malformed input; failures become error responses.
nlohmann::json handle_request(KeyStore& store, std::string_view body);

} // namespace bosonkey::wire

#endif
