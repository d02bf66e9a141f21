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

#ifndef BOSONKEY_KDC_HPP
#define BOSONKEY_KDC_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "bosonkey/crypto.hpp"
#include "bosonkey/rng.hpp"

namespace bosonkey {

/// Point-in-time copy of a KeyStore's contents.
struct KeyStoreSnapshot {
    int d = 0;
    std::vector<int> pending_a;
    std::vector<int> pending_b;
    std::vector<JointKeyRecord> live;
    std::vector<std::uint64_t> tombstones;
};

nlohmann::json snapshot_to_json(const KeyStoreSnapshot& snapshot);

/**
 * Joint-key database of the key-distribution center.
 *
 * Dits registered by A and B are paired positionally: the j-th dit of A
 * with the j-th dit of B. As soon as a pair is complete only
 * K_j = (ka + kb) mod d is kept and both dits are dropped. Fetching a record
 * moves its index to the tombstone set in the same critical section, so an
 * index is issued at most once for the lifetime of the store.
 *
 * All member functions are thread-safe.
 */
class KeyStore {
  public:
    explicit KeyStore(int d, std::uint64_t rng_seed = 0);

    int d() const { return d_; }

    /// Returns the number of records completed by this call. Throws
    /// DomainError (and registers nothing) if any dit is outside Z_d.
    std::size_t register_dits(Party party, std::span<const int> dits);

    /// Removes and returns a record chosen uniformly among live ones.
    /// Throws StoreEmptyError when none are live.
    JointKeyRecord fetch();

    std::size_t live_count() const;
    std::size_t pending_count(Party party) const;
    bool is_tombstoned(std::uint64_t index) const;

    KeyStoreSnapshot snapshot() const;

  private:
    int d_;
    mutable std::mutex mutex_;
    Rng rng_;
    std::deque<int> pending_a_;
    std::deque<int> pending_b_;
    std::map<std::uint64_t, int> live_;
    std::set<std::uint64_t> tombstones_;
    std::uint64_t next_index_ = 1;
};

} // namespace bosonkey

#endif
