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

#include "bosonkey/crypto.hpp"

#include <bit>

#include "bosonkey/errors.hpp"
#include "bosonkey/parallel.hpp"
#include "bosonkey/rng.hpp"

namespace bosonkey {

std::string_view to_string(Party party) {
    return party == Party::A ? "A" : "B";
}

Party parse_party(std::string_view text) {
    if (text == "A") {
        return Party::A;
    }
    if (text == "B") {
        return Party::B;
    }
    throw DomainError("unknown party '" + std::string(text) + "'");
}

BinningScheme BinningSpec::build() const {
    return make_binning(ConfigSpace(modes, photons), d, mode, seed);
}

BinningSpec BinningSpec::of(const BinningScheme& binning) {
    return BinningSpec{binning.space().modes(), binning.space().photons(), binning.bin_count(),
                       binning.mode(), binning.seed()};
}

const KeyEntry& PartyKeyMaterial::at(std::uint64_t j) const {
    // entries are generated with j = position + 1 but may be loaded in any order
    if (j >= 1 && j <= entries.size() && entries[j - 1].j == j) {
        return entries[j - 1];
    }
    for (const auto& e : entries) {
        if (e.j == j) {
            return e;
        }
    }
    throw ProtocolError("party " + std::string(to_string(party)) + " holds no entry for index " +
                        std::to_string(j));
}

std::vector<int> PartyKeyMaterial::dits() const {
    std::vector<int> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        out.push_back(e.dit);
    }
    return out;
}

PartyKeyMaterial generate_key_material(Party party, const ModeUnitary& u,
                                       const BinningScheme& binning, int count,
                                       std::uint64_t rng_seed, const SimulationOptions& options) {
    if (count < 1) {
        throw DomainError("generate_key_material: count must be >= 1");
    }
    const ConfigSpace& space = binning.space();
    if (space.modes() != u.modes()) {
        throw DomainError("generate_key_material: binning space and unitary mode counts differ");
    }
    const std::uint64_t total = space.checked_size();

    PartyKeyMaterial material;
    material.party = party;
    material.unitary_seed = u.source_seed();
    material.binning = BinningSpec::of(binning);
    material.entries.resize(static_cast<std::size_t>(count));

    Rng rng(rng_seed);
    for (std::size_t k = 0; k < material.entries.size(); ++k) {
        material.entries[k].j = k + 1;
        material.entries[k].seed_rank = rng.uniform_below(total);
    }

    SimulationOptions inner = options;
    inner.threads = 1;
    parallel_for(material.entries.size(), options.threads, [&](std::size_t k) {
        auto& entry = material.entries[k];
        entry.dit = most_probable_bin(u, unrank_config(space, entry.seed_rank), binning, inner);
    });
    return material;
}

int recompute_dit(const ModeUnitary& u, const BinningScheme& binning, const BosonConfig& s,
                  const SimulationOptions& options) {
    return most_probable_bin(u, s, binning, options);
}

nlohmann::json key_material_to_json(const PartyKeyMaterial& material) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : material.entries) {
        entries.push_back({{"j", e.j}, {"seed_rank", e.seed_rank}, {"dit", e.dit}});
    }
    nlohmann::json j;
    j["party"] = std::string(to_string(material.party));
    j["unitary_seed"] = material.unitary_seed ? nlohmann::json(*material.unitary_seed)
                                              : nlohmann::json(nullptr);
    j["modes"] = material.binning.modes;
    j["photons"] = material.binning.photons;
    j["binning"] = {{"d", material.binning.d},
                    {"mode", std::string(to_string(material.binning.mode))},
                    {"seed", material.binning.seed}};
    j["entries"] = std::move(entries);
    return j;
}

PartyKeyMaterial key_material_from_json(const nlohmann::json& j) {
    try {
        PartyKeyMaterial m;
        m.party = parse_party(j.at("party").get<std::string>());
        if (!j.at("unitary_seed").is_null()) {
            m.unitary_seed = j.at("unitary_seed").get<std::uint64_t>();
        }
        m.binning.modes = j.at("modes").get<int>();
        m.binning.photons = j.at("photons").get<int>();
        const auto& b = j.at("binning");
        m.binning.d = b.at("d").get<int>();
        m.binning.mode = parse_binning_mode(b.at("mode").get<std::string>());
        m.binning.seed = b.at("seed").get<std::uint64_t>();
        for (const auto& e : j.at("entries")) {
            KeyEntry entry{e.at("j").get<std::uint64_t>(), e.at("seed_rank").get<std::uint64_t>(),
                           e.at("dit").get<int>()};
            if (entry.dit < 0 || entry.dit >= m.binning.d) {
                throw DomainError("key material: dit out of range");
            }
            m.entries.push_back(entry);
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("key material json: ") + e.what());
    }
}

namespace {

__extension__ typedef unsigned __int128 u128;

void check_modulus(int d, PadMode mode) {
    if (d < 2) {
        throw DomainError("dit modulus d must be >= 2");
    }
    if (mode == PadMode::xor_bits && !std::has_single_bit(static_cast<unsigned>(d))) {
        throw DomainError("XOR pad mode requires d to be a power of two");
    }
}

void check_dit(int value, int d, const char* what) {
    if (value < 0 || value >= d) {
        throw DomainError(std::string(what) + " = " + std::to_string(value) + " is not in Z_" +
                          std::to_string(d));
    }
}

int add_mod(int x, int y, int d, PadMode mode) {
    return mode == PadMode::xor_bits ? (x ^ y) : (x + y) % d;
}

int sub_mod(int x, int y, int d, PadMode mode) {
    return mode == PadMode::xor_bits ? (x ^ y) : ((x - y) % d + d) % d;
}

} // namespace

int joint_key(int ka, int kb, int d, PadMode mode) {
    check_modulus(d, mode);
    check_dit(ka, d, "ka");
    check_dit(kb, d, "kb");
    return add_mod(ka, kb, d, mode);
}

Ciphertext otp_encrypt(int m, const JointKeyRecord& key, int ka, int d, PadMode mode) {
    check_modulus(d, mode);
    check_dit(m, d, "message");
    check_dit(key.key, d, "joint key");
    check_dit(ka, d, "ka");
    return Ciphertext{key.index, sub_mod(add_mod(m, key.key, d, mode), ka, d, mode)};
}

int otp_decrypt(const Ciphertext& c, int kb, int d, PadMode mode) {
    check_modulus(d, mode);
    check_dit(c.value, d, "ciphertext");
    check_dit(kb, d, "kb");
    return sub_mod(c.value, kb, d, mode);
}

int derive_shared_key(int joint, int own_dit, Party /*role*/, int d, PadMode mode) {
    check_modulus(d, mode);
    check_dit(joint, d, "joint key");
    check_dit(own_dit, d, "own dit");
    return sub_mod(joint, own_dit, d, mode);
}

int honest_auth_response(int ciphertext, int joint, int kb, int d) {
    const int ka = derive_shared_key(joint, kb, Party::B, d);
    check_dit(ciphertext, d, "ciphertext");
    return sub_mod(ciphertext, ka, d, PadMode::additive);
}

AuthTranscript entity_auth_challenge(const PartyKeyMaterial& alice, const JointKeyRecord& key,
                                     std::uint64_t rng_seed, const AuthResponder& responder) {
    const int d = alice.binning.d;
    check_modulus(d, PadMode::additive);
    check_dit(key.key, d, "joint key");
    const int ka = alice.at(key.index).dit;

    Rng rng(rng_seed);
    AuthTranscript t;
    t.index = key.index;
    t.challenge = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(d)));
    t.ciphertext = add_mod(t.challenge, ka, d, PadMode::additive);
    t.response = responder(t.ciphertext);
    t.result = t.response == t.challenge ? AuthResult::accept : AuthResult::reject;
    return t;
}

AuthTranscript entity_auth_run(const PartyKeyMaterial& alice, const PartyKeyMaterial& bob,
                               const JointKeyRecord& key, std::uint64_t rng_seed) {
    if (alice.binning.d != bob.binning.d) {
        throw ProtocolError("entity_auth_run: parties disagree on d");
    }
    const int kb = bob.at(key.index).dit;
    const int d = bob.binning.d;
    return entity_auth_challenge(alice, key, rng_seed, [&](int c) {
        return honest_auth_response(c, key.key, kb, d);
    });
}

bool is_prime(std::uint64_t n) {
    if (n < 2) {
        return false;
    }
    if (n < 4) {
        return true;
    }
    if (n % 2 == 0 || n % 3 == 0) {
        return false;
    }
    for (std::uint64_t f = 5; f <= n / f; f += 6) {
        if (n % f == 0 || n % (f + 2) == 0) {
            return false;
        }
    }
    return true;
}

std::uint64_t smallest_prime_at_least(std::uint64_t n) {
    std::uint64_t candidate = std::max<std::uint64_t>(n, 2);
    while (!is_prime(candidate)) {
        ++candidate;
    }
    return candidate;
}

MacKey::MacKey(std::uint64_t a, std::uint64_t b, std::uint64_t p) : a_(a), b_(b), p_(p) {
    if (!is_prime(p)) {
        throw DomainError("MacKey: tag modulus " + std::to_string(p) + " is not prime");
    }
    if (a >= p || b >= p) {
        throw DomainError("MacKey: key components must be < p");
    }
}

Tag mac_tag(const MacKey& key, std::uint64_t m) {
    if (m >= key.p()) {
        throw DomainError("mac_tag: message " + std::to_string(m) + " must be < p = " +
                          std::to_string(key.p()));
    }
    const u128 t = (static_cast<u128>(key.a()) * m + key.b()) % key.p();
    return Tag{static_cast<std::uint64_t>(t)};
}

bool mac_verify(const MacKey& key, std::uint64_t m, Tag t) {
    if (m >= key.p() || t.t >= key.p()) {
        return false;
    }
    return mac_tag(key, m) == t;
}

int dits_required(int d, std::uint64_t p, MacKeyStrength strength) {
    if (d < 2) {
        throw DomainError("dits_required: d must be >= 2");
    }
    if (!is_prime(p)) {
        throw DomainError("dits_required: p must be prime");
    }
    const int elements = strength == MacKeyStrength::strict ? 4 : 2;
    BigInt target = 1;
    for (int i = 0; i < elements; ++i) {
        target *= p;
    }
    int k = 0;
    BigInt reach = 1;
    while (reach < target) {
        reach *= d;
        ++k;
    }
    return k;
}

MacKey mac_key_from_dits(std::span<const int> dits, int d, std::uint64_t p,
                         MacKeyStrength strength) {
    const int needed = dits_required(d, p, strength);
    if (dits.size() < static_cast<std::size_t>(needed)) {
        throw InsufficientEntropyError("mac_key_from_dits: " + std::to_string(needed) +
                                       " dits of Z_" + std::to_string(d) + " needed for p = " +
                                       std::to_string(p) + ", got " +
                                       std::to_string(dits.size()));
    }
    BigInt packed = 0;
    for (int k = 0; k < needed; ++k) {
        check_dit(dits[static_cast<std::size_t>(k)], d, "dit");
        packed = packed * d + dits[static_cast<std::size_t>(k)];
    }
    const BigInt modulus(p);
    const auto a = static_cast<std::uint64_t>(packed % modulus);
    const auto b = static_cast<std::uint64_t>((packed / modulus) % modulus);
    return MacKey(a, b, p);
}

} // namespace bosonkey
