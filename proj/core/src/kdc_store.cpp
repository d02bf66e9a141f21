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

#include "bosonkey/kdc.hpp"

#include <iterator>

#include "bosonkey/errors.hpp"

namespace bosonkey {

KeyStore::KeyStore(int d, std::uint64_t rng_seed) : d_(d), rng_(rng_seed) {
    if (d < 2) {
        throw DomainError("KeyStore: d must be >= 2");
    }
}

std::size_t KeyStore::register_dits(Party party, std::span<const int> dits) {
    for (int dit : dits) {
        if (dit < 0 || dit >= d_) {
            throw DomainError("register_dits: dit " + std::to_string(dit) + " is not in Z_" +
                              std::to_string(d_));
        }
    }
    std::lock_guard lock(mutex_);
    auto& own = party == Party::A ? pending_a_ : pending_b_;
    own.insert(own.end(), dits.begin(), dits.end());

    std::size_t completed = 0;
    while (!pending_a_.empty() && !pending_b_.empty()) {
        const int key = (pending_a_.front() + pending_b_.front()) % d_;
        pending_a_.pop_front();
        pending_b_.pop_front();
        live_.emplace(next_index_++, key);
        ++completed;
    }
    return completed;
}

JointKeyRecord KeyStore::fetch() {
    std::lock_guard lock(mutex_);
    if (live_.empty()) {
        throw StoreEmptyError("key store exhausted: no live joint keys");
    }
    auto it = std::next(live_.begin(),
                        static_cast<std::ptrdiff_t>(rng_.uniform_below(live_.size())));
    JointKeyRecord record{it->first, it->second};
    live_.erase(it);
    tombstones_.insert(record.index);
    return record;
}

std::size_t KeyStore::live_count() const {
    std::lock_guard lock(mutex_);
    return live_.size();
}

std::size_t KeyStore::pending_count(Party party) const {
    std::lock_guard lock(mutex_);
    return party == Party::A ? pending_a_.size() : pending_b_.size();
}

bool KeyStore::is_tombstoned(std::uint64_t index) const {
    std::lock_guard lock(mutex_);
    return tombstones_.contains(index);
}

KeyStoreSnapshot KeyStore::snapshot() const {
    std::lock_guard lock(mutex_);
    KeyStoreSnapshot s;
    s.d = d_;
    s.pending_a.assign(pending_a_.begin(), pending_a_.end());
    s.pending_b.assign(pending_b_.begin(), pending_b_.end());
    for (const auto& [index, key] : live_) {
        s.live.push_back({index, key});
    }
    s.tombstones.assign(tombstones_.begin(), tombstones_.end());
    return s;
}

nlohmann::json snapshot_to_json(const KeyStoreSnapshot& snapshot) {
    nlohmann::json live = nlohmann::json::array();
    for (const auto& r : snapshot.live) {
        live.push_back({{"index", r.index}, {"key", r.key}});
    }
    nlohmann::json j;
    j["d"] = snapshot.d;
    j["pending"] = {{"A", snapshot.pending_a}, {"B", snapshot.pending_b}};
    j["live"] = std::move(live);
    j["tombstones"] = snapshot.tombstones;
    return j;
}

} // namespace bosonkey
