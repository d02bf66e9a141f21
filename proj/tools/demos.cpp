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

#include <cmath>

#include "bosonkey/crypto.hpp"
#include "bosonkey/errors.hpp"
#include "bosonkey/kdc.hpp"
#include "bosonkey/kdc_net.hpp"
#include "bosonkey/rng.hpp"
#include "cli.hpp"

namespace bosonkey::cli {

namespace {

// Both parties' key material registered with a loopback KDC.
struct Session {
    explicit Session(const DemoConfig& config, int dits_per_party)
        : run(config.run),
          binning(run.binning()),
          unitary_a(haar_unitary(run.modes, run.unitary_seed)),
          unitary_b(haar_unitary(run.modes, config.unitary_seed_b)),
          alice(generate_key_material(Party::A, unitary_a, binning, dits_per_party, run.rng_seed,
                                      options())),
          bob(generate_key_material(Party::B, unitary_b, binning, dits_per_party,
                                    run.rng_seed + 1, options())),
          store(run.bins, run.rng_seed + 2),
          server(store, Endpoint{"127.0.0.1", 0}) {
        server.start();
        KdcClient(server.endpoint()).register_dits(Party::A, alice.dits());
        KdcClient(server.endpoint()).register_dits(Party::B, bob.dits());
    }

    SimulationOptions options() const {
        SimulationOptions o;
        o.threads = run.threads;
        return o;
    }

    // Alice re-derives her dit from the stored seed, as the protocol prescribes.
    int alice_dit(std::uint64_t index) const {
        const auto& entry = alice.at(index);
        const int dit = recompute_dit(unitary_a, binning,
                                      unrank_config(binning.space(), entry.seed_rank), options());
        if (dit != entry.dit) {
            throw ProtocolError("recomputed dit differs from the registered one");
        }
        return dit;
    }

    int bob_dit(std::uint64_t index) const {
        const auto& entry = bob.at(index);
        return recompute_dit(unitary_b, binning, unrank_config(binning.space(), entry.seed_rank),
                             options());
    }

    RunConfig run;
    BinningScheme binning;
    ModeUnitary unitary_a;
    ModeUnitary unitary_b;
    PartyKeyMaterial alice;
    PartyKeyMaterial bob;
    KeyStore store;
    KdcServer server;
};

} // namespace

nlohmann::json run_demo_otp(const DemoConfig& config, std::optional<int> message) {
    config.run.validate();
    if (config.count < 1) {
        throw DomainError("--count must be >= 1");
    }
    const int d = config.run.bins;
    if (message && (*message < 0 || *message >= d)) {
        throw DomainError("--message must be in Z_" + std::to_string(d));
    }
    Session session(config, config.count);
    KdcClient client(session.server.endpoint());
    const JointKeyRecord key = client.fetch();

    Rng rng(config.run.rng_seed + 3);
    const int m = message ? *message : static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(d)));
    const int ka = session.alice_dit(key.index);
    const Ciphertext c = otp_encrypt(m, key, ka, d);
    const int kb = session.bob_dit(key.index);
    const int decrypted = otp_decrypt(c, kb, d);
    session.server.stop();

    return {{"command", "demo-otp"},
            {"bins", d},
            {"index", key.index},
            {"joint_key", key.key},
            {"message", m},
            {"ciphertext", c.value},
            {"decrypted", decrypted},
            {"roundtrip_ok", decrypted == m},
            {"live_records_left", session.store.live_count()}};
}

nlohmann::json run_demo_auth(const DemoConfig& config, int trials) {
    config.run.validate();
    if (trials < 1) {
        throw DomainError("--trials must be >= 1");
    }
    const int d = config.run.bins;
    Session session(config, 2 * trials);
    KdcClient client(session.server.endpoint());

    int honest_accepts = 0;
    for (int t = 0; t < trials; ++t) {
        const JointKeyRecord key = client.fetch();
        const auto transcript =
            entity_auth_run(session.alice, session.bob, key, config.run.rng_seed + 100 + t);
        honest_accepts += transcript.result == AuthResult::accept ? 1 : 0;
    }

    Rng impostor(config.run.rng_seed + 4);
    int impostor_accepts = 0;
    for (int t = 0; t < trials; ++t) {
        const JointKeyRecord key = client.fetch();
        const auto transcript = entity_auth_challenge(
            session.alice, key, config.run.rng_seed + 100 + trials + t, [&](int) {
                return static_cast<int>(impostor.uniform_below(static_cast<std::uint64_t>(d)));
            });
        impostor_accepts += transcript.result == AuthResult::accept ? 1 : 0;
    }
    session.server.stop();

    const double expected = 1.0 / d;
    const double sigma = std::sqrt(expected * (1.0 - expected) / trials);
    const double impostor_rate = static_cast<double>(impostor_accepts) / trials;
    return {{"command", "demo-auth"},
            {"bins", d},
            {"trials", trials},
            {"honest_acceptance", static_cast<double>(honest_accepts) / trials},
            {"impostor_acceptance", impostor_rate},
            {"expected_impostor_acceptance", expected},
            {"impostor_sigma", sigma},
            {"impostor_within_5_sigma", std::abs(impostor_rate - expected) <= 5.0 * sigma}};
}

nlohmann::json run_demo_mac(const DemoConfig& config, std::optional<std::uint64_t> message,
                            bool strict) {
    config.run.validate();
    const int d = config.run.bins;
    const std::uint64_t p = smallest_prime_at_least(static_cast<std::uint64_t>(d));
    const auto strength = strict ? MacKeyStrength::strict : MacKeyStrength::standard;
    const int needed = dits_required(d, p, strength);
    if (message && *message >= p) {
        throw DomainError("--message must be < p = " + std::to_string(p));
    }
    Session session(config, needed);
    KdcClient client(session.server.endpoint());

    // both parties end up with Bob's dits: Alice via K - ka, Bob directly
    std::vector<int> alice_view;
    std::vector<int> bob_view;
    for (int k = 0; k < needed; ++k) {
        const JointKeyRecord key = client.fetch();
        alice_view.push_back(
            derive_shared_key(key.key, session.alice_dit(key.index), Party::A, d));
        bob_view.push_back(session.bob_dit(key.index));
    }
    session.server.stop();
    const MacKey alice_key = mac_key_from_dits(alice_view, d, p, strength);
    const MacKey bob_key = mac_key_from_dits(bob_view, d, p, strength);

    Rng rng(config.run.rng_seed + 5);
    const std::uint64_t m = message ? *message : rng.uniform_below(p);
    const Tag tag = mac_tag(alice_key, m);
    const std::uint64_t tampered = (m + 1) % p;
    return {{"command", "demo-mac"},
            {"bins", d},
            {"tag_prime", p},
            {"key_dits", needed},
            {"strict", strict},
            {"keys_agree", alice_key == bob_key},
            {"message", m},
            {"tag", tag.t},
            {"verified", mac_verify(bob_key, m, tag)},
            {"tampered_message", tampered},
            {"tampered_accepted", mac_verify(bob_key, tampered, tag)}};
}

} // namespace bosonkey::cli
