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

#ifndef BOSONKEY_CRYPTO_HPP
#define BOSONKEY_CRYPTO_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bosonkey/bosonsim.hpp"
#include "bosonkey/combinatorics.hpp"
#include "bosonkey/linalg.hpp"

namespace bosonkey {

enum class Party { A, B };

std::string_view to_string(Party party);
Party parse_party(std::string_view text);

/// Public binning parameters shared by both parties and the KDC.
struct BinningSpec {
    int modes = 0;
    int photons = 0;
    int d = 0;
    BinningMode mode = BinningMode::contiguous;
    std::uint64_t seed = 0;

    BinningScheme build() const;
    static BinningSpec of(const BinningScheme& binning);
};

struct KeyEntry {
    std::uint64_t j = 0;
    std::uint64_t seed_rank = 0;
    int dit = 0;
};

/// One party's secret seeds and the MPB dits they produce. Indices j start at 1.
struct PartyKeyMaterial {
    Party party = Party::A;
    std::optional<std::uint64_t> unitary_seed;
    BinningSpec binning;
    std::vector<KeyEntry> entries;

    /// Throws ProtocolError when index j is not held.
    const KeyEntry& at(std::uint64_t j) const;
    std::vector<int> dits() const;
};

/// Draws `count` seeds uniformly (with replacement) from the configuration
/// space and records the MPB of each under `u` and `binning`.
PartyKeyMaterial generate_key_material(Party party, const ModeUnitary& u,
                                       const BinningScheme& binning, int count,
                                       std::uint64_t rng_seed,
                                       const SimulationOptions& options = {});

/// Re-derives a dit from its seed; identical to most_probable_bin.
int recompute_dit(const ModeUnitary& u, const BinningScheme& binning, const BosonConfig& s,
                  const SimulationOptions& options = {});

nlohmann::json key_material_to_json(const PartyKeyMaterial& material);
PartyKeyMaterial key_material_from_json(const nlohmann::json& j);

/**
 * Group operation used to combine dits.
 *
 * `additive` is (Z_d, +) with explicit subtraction wherever an inverse is
 * needed. `xor_bits` treats labels as n-bit strings and combines them with
 * XOR; it is self-inverse and only defined when d is a power of two.
 */
enum class PadMode { additive, xor_bits };

/// Joint key record as held by the KDC.
struct JointKeyRecord {
    std::uint64_t index = 0;
    int key = 0;

    friend bool operator==(const JointKeyRecord&, const JointKeyRecord&) = default;
};

struct Ciphertext {
    std::uint64_t index = 0;
    int value = 0;
};

/// K = ka + kb (mod d).
int joint_key(int ka, int kb, int d, PadMode mode = PadMode::additive);

/// C = m + K - ka (mod d), which equals m + kb.
Ciphertext otp_encrypt(int m, const JointKeyRecord& key, int ka, int d,
                       PadMode mode = PadMode::additive);

/// m = C - kb (mod d).
int otp_decrypt(const Ciphertext& c, int kb, int d, PadMode mode = PadMode::additive);

/// Other party's dit: K - own (mod d). A recovers kb this way; B recovers ka.
int derive_shared_key(int joint, int own_dit, Party role, int d,
                      PadMode mode = PadMode::additive);

enum class AuthResult { accept, reject };

struct AuthTranscript {
    std::uint64_t index = 0;
    int challenge = 0;  ///< m, chosen by Alice
    int ciphertext = 0; ///< m + ka (mod d)
    int response = 0;   ///< m' announced by the responder
    AuthResult result = AuthResult::reject;
};

/// Maps a challenge ciphertext to the claimed plaintext.
using AuthResponder = std::function<int(int ciphertext)>;

/// Bob's side: ka' = K - kb, answer C - ka'.
int honest_auth_response(int ciphertext, int joint, int kb, int d);

/// Alice challenges `responder` using her dit for key.index.
AuthTranscript entity_auth_challenge(const PartyKeyMaterial& alice, const JointKeyRecord& key,
                                     std::uint64_t rng_seed, const AuthResponder& responder);

/// Full honest run between Alice and Bob for key.index.
AuthTranscript entity_auth_run(const PartyKeyMaterial& alice, const PartyKeyMaterial& bob,
                               const JointKeyRecord& key, std::uint64_t rng_seed);

bool is_prime(std::uint64_t n);
/// Smallest prime >= n (n >= 2).
std::uint64_t smallest_prime_at_least(std::uint64_t n);

/// Key (a, b) of the affine hash h(m) = a m + b over Z_p.
class MacKey {
  public:
    /// Throws DomainError if p is not prime or a, b >= p.
    MacKey(std::uint64_t a, std::uint64_t b, std::uint64_t p);

    std::uint64_t a() const { return a_; }
    std::uint64_t b() const { return b_; }
    std::uint64_t p() const { return p_; }

    friend bool operator==(const MacKey&, const MacKey&) = default;

  private:
    std::uint64_t a_;
    std::uint64_t b_;
    std::uint64_t p_;
};

struct Tag {
    std::uint64_t t = 0;
    friend bool operator==(const Tag&, const Tag&) = default;
};

/// t = a m + b (mod p). Requires m < p.
Tag mac_tag(const MacKey& key, std::uint64_t m);
bool mac_verify(const MacKey& key, std::uint64_t m, Tag t);

/// standard: d^k >= p^2 (two field elements). strict: d^k >= p^4.
enum class MacKeyStrength { standard, strict };

/// Smallest k with d^k >= p^2 (standard) or p^4 (strict).
int dits_required(int d, std::uint64_t p, MacKeyStrength strength);

/**
 * Packs the first dits_required(d, p, strength) dits base d, most significant
 * first, into an integer X and returns a = X mod p, b = (X / p) mod p.
 * Surplus dits are ignored. Throws InsufficientEntropyError when too few
 * dits are supplied.
 */
MacKey mac_key_from_dits(std::span<const int> dits, int d, std::uint64_t p,
                         MacKeyStrength strength = MacKeyStrength::standard);

} // namespace bosonkey

#endif
