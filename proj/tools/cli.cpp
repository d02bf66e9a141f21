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

#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "bosonkey/bosonsim.hpp"
#include "bosonkey/errors.hpp"
#include "bosonkey/kdc.hpp"
#include "bosonkey/kdc_net.hpp"
#include "bosonkey/linalg.hpp"

namespace bosonkey::cli {

void RunConfig::validate() const {
    if (modes < 2) {
        throw DomainError("--modes must be >= 2");
    }
    if (photons < 1) {
        throw DomainError("--photons must be >= 1");
    }
    const std::uint64_t size = space().checked_size();
    if (static_cast<std::size_t>(photons) > kMaxRyserSize) {
        throw ResourceError("--photons exceeds the permanent size cap of " +
                            std::to_string(kMaxRyserSize));
    }
    if (bins < 2 || static_cast<std::uint64_t>(bins) > size) {
        throw DomainError("--bins must satisfy 2 <= d <= |S| = " + std::to_string(size));
    }
}

BinningScheme RunConfig::binning() const {
    return make_binning(space(), bins, binning_mode, binning_seed);
}

ReportFormat parse_report_format(std::string_view text) {
    if (text == "json") {
        return ReportFormat::json;
    }
    if (text == "csv") {
        return ReportFormat::csv;
    }
    throw DomainError("unknown report format '" + std::string(text) + "'");
}

std::filesystem::path resolve_output_path(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
            return std::filesystem::path(dir) / p;
        }
    }
    return p;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw Error("failed writing '" + path.string() + "'");
    }
}

void export_report(const IndistinguishabilityReport& report, const std::filesystem::path& path,
                   ReportFormat format) {
    std::ostringstream body;
    if (format == ReportFormat::json) {
        body << report_to_json(report).dump(2) << '\n';
    } else {
        write_report_csv(body, report);
    }
    write_text_file(path, body.str());
}

namespace {

const char* error_kind(const std::exception& e) {
    if (dynamic_cast<const DomainError*>(&e)) return "domain";
    if (dynamic_cast<const ResourceError*>(&e)) return "resource";
    if (dynamic_cast<const PreconditionError*>(&e)) return "precondition";
    if (dynamic_cast<const InsufficientEntropyError*>(&e)) return "entropy";
    if (dynamic_cast<const StoreEmptyError*>(&e)) return "empty";
    if (dynamic_cast<const ProtocolError*>(&e)) return "protocol";
    if (dynamic_cast<const TransportError*>(&e)) return "transport";
    if (dynamic_cast<const Error*>(&e)) return "io";
    return "internal";
}

void print_json(std::ostream& out, const nlohmann::json& j) {
    out << j.dump(2) << '\n';
}

// Options shared by every subcommand that needs a space, binning, or unitary.
struct CommonFlags {
    RunConfig run;
    std::string binning_mode = "contiguous";
    std::string unitary_path;
    std::string out_path;
    bool json = false;

    void add_space(CLI::App* app) {
        app->add_option("--modes,-M", run.modes, "number of optical modes M")->capture_default_str();
        app->add_option("--photons,-N", run.photons, "number of photons N")->capture_default_str();
    }
    void add_binning(CLI::App* app) {
        app->add_option("--bins,-d", run.bins, "number of bins d")->capture_default_str();
        app->add_option("--binning-mode", binning_mode, "contiguous | permuted")
            ->check(CLI::IsMember({"contiguous", "permuted"}))
            ->capture_default_str();
        app->add_option("--binning-seed", run.binning_seed, "seed of the permuted binning")
            ->capture_default_str();
    }
    void add_unitary(CLI::App* app) {
        app->add_option("--unitary-seed", run.unitary_seed, "seed of the Haar unitary")
            ->capture_default_str();
        app->add_option("--unitary", unitary_path, "load the unitary from a JSON file instead");
    }
    void add_common(CLI::App* app) {
        app->add_option("--out,-o", out_path, "output path (relative to $" +
                                                  std::string(kOutputDirEnv) + " if set)");
        app->add_flag("--json", json, "structured JSON output on stdout");
        app->add_option("--threads", run.threads, "worker threads (0 = all cores)")
            ->capture_default_str();
    }

    void finish() { run.binning_mode = parse_binning_mode(binning_mode); }

    SimulationOptions options() const {
        SimulationOptions o;
        o.threads = run.threads;
        return o;
    }

    ModeUnitary unitary() const {
        if (!unitary_path.empty()) {
            ModeUnitary u = load_unitary(unitary_path);
            if (u.modes() != run.modes) {
                throw DomainError("unitary in '" + unitary_path + "' acts on " +
                                  std::to_string(u.modes()) + " modes, expected " +
                                  std::to_string(run.modes));
            }
            return u;
        }
        return haar_unitary(run.modes, run.unitary_seed);
    }
};

BosonConfig select_seed(const ConfigSpace& space, const std::string& config_text,
                        std::optional<std::uint64_t> rank) {
    if (!config_text.empty()) {
        BosonConfig s = BosonConfig::parse(config_text);
        if (!space.contains(s)) {
            throw DomainError("--seed-config " + config_text + " is not a " +
                              std::to_string(space.modes()) + "-mode " +
                              std::to_string(space.photons()) + "-photon configuration");
        }
        return s;
    }
    return unrank_config(space, rank.value_or(0));
}

void emit(std::ostream& out, const CommonFlags& flags, const std::string& body) {
    if (flags.out_path.empty()) {
        out << body;
    } else {
        write_text_file(resolve_output_path(flags.out_path), body);
    }
}

} // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact coarse-grained boson sampling and MPB-keyed protocols", "bosonkey"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for all subcommands");

    CommonFlags flags;
    std::string seed_config;
    std::optional<std::uint64_t> seed_rank;
    std::string law = "born";
    std::string format = "json";
    std::uint64_t unitary_seed_b = 43;
    int count = 4;
    int trials = 200;
    std::optional<int> otp_message;
    std::optional<std::uint64_t> mac_message;
    bool strict = false;
    std::string bind = "127.0.0.1:7878";

    auto* gen = app.add_subcommand("gen-unitary", "sample a Haar-random mode unitary");
    gen->add_option("--modes,-M", flags.run.modes, "matrix size")->capture_default_str();
    gen->add_option("--seed,--unitary-seed", flags.run.unitary_seed, "RNG seed")
        ->capture_default_str();
    flags.add_common(gen);

    auto* enumerate = app.add_subcommand("enumerate", "list configurations in rank order");
    flags.add_space(enumerate);
    flags.add_common(enumerate);

    auto* dist = app.add_subcommand("distribution", "exact output distribution for one seed");
    flags.add_space(dist);
    flags.add_unitary(dist);
    dist->add_option("--seed-config", seed_config, "input configuration, e.g. 1,1,1,0");
    dist->add_option("--seed-rank", seed_rank, "input configuration by rank");
    auto* bins_opt = dist->add_option("--bins,-d", flags.run.bins, "coarse-grain into d bins");
    dist->add_option("--binning-mode", flags.binning_mode, "contiguous | permuted")
        ->check(CLI::IsMember({"contiguous", "permuted"}));
    dist->add_option("--binning-seed", flags.run.binning_seed, "seed of the permuted binning");
    dist->add_option("--law", law, "born | literal-abs")
        ->check(CLI::IsMember({"born", "literal-abs"}))
        ->capture_default_str();
    flags.add_common(dist);

    auto* mpb = app.add_subcommand("mpb", "most probable bin for one seed");
    flags.add_space(mpb);
    flags.add_binning(mpb);
    flags.add_unitary(mpb);
    mpb->add_option("--seed-config", seed_config, "input configuration, e.g. 1,1,1,0");
    mpb->add_option("--seed-rank", seed_rank, "input configuration by rank");
    flags.add_common(mpb);

    auto* analyze = app.add_subcommand("analyze", "exhaustive indistinguishability report");
    flags.add_space(analyze);
    flags.add_binning(analyze);
    flags.add_unitary(analyze);
    analyze->add_option("--format", format, "json | csv (for --out)")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    flags.add_common(analyze);

    auto add_demo = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        flags.add_space(sub);
        flags.add_binning(sub);
        sub->add_option("--unitary-seed-a,--unitary-seed", flags.run.unitary_seed,
                        "seed of Alice's unitary")
            ->capture_default_str();
        sub->add_option("--unitary-seed-b", unitary_seed_b, "seed of Bob's unitary")
            ->capture_default_str();
        sub->add_option("--rng-seed", flags.run.rng_seed, "seed for key material and protocol")
            ->capture_default_str();
        flags.add_common(sub);
        return sub;
    };
    auto* demo_otp = add_demo("demo-otp", "one-time-pad message through a loopback KDC");
    demo_otp->add_option("--count", count, "dits generated per party")->capture_default_str();
    demo_otp->add_option("--message", otp_message, "message dit (random if omitted)");
    auto* demo_auth = add_demo("demo-auth", "entity authentication, honest and impostor");
    demo_auth->add_option("--trials", trials, "runs per branch")->capture_default_str();
    auto* demo_mac = add_demo("demo-mac", "data-origin MAC keyed by MPB dits");
    demo_mac->add_option("--message", mac_message, "message, < tag prime (random if omitted)");
    demo_mac->add_flag("--strict", strict, "require 4 log2 p bits of key material");

    auto* serve_kdc = app.add_subcommand("serve-kdc", "run the key-distribution center");
    serve_kdc->add_option("--bind", bind, "host:port to listen on")->capture_default_str();
    serve_kdc->add_option("--bins,-d", flags.run.bins, "dit modulus d")->capture_default_str();
    serve_kdc->add_option("--rng-seed", flags.run.rng_seed, "seed for record selection")
        ->capture_default_str();
    serve_kdc->add_flag("--json", flags.json, "structured JSON output on stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            for (auto* sub : app.get_subcommands()) {
                out << sub->help();
            }
            return kExitOk;
        }
        err << "error: usage: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    try {
        flags.finish();
        if (gen->parsed()) {
            if (flags.run.modes < 1) {
                throw DomainError("--modes must be >= 1");
            }
            const ModeUnitary u = haar_unitary(flags.run.modes, flags.run.unitary_seed);
            const std::string body = unitary_to_json(u).dump() + "\n";
            if (flags.out_path.empty()) {
                out << body;
            } else {
                const auto path = resolve_output_path(flags.out_path);
                write_text_file(path, body);
                if (flags.json) {
                    print_json(out, {{"m", u.modes()},
                                     {"seed", flags.run.unitary_seed},
                                     {"path", path.string()},
                                     {"unitarity_defect", unitarity_defect(u.matrix())}});
                } else {
                    out << "wrote " << u.modes() << "x" << u.modes() << " unitary (seed "
                        << flags.run.unitary_seed << ") to " << path.string() << '\n';
                }
            }
            return kExitOk;
        }

        if (enumerate->parsed()) {
            const ConfigSpace space(flags.run.modes, flags.run.photons);
            const auto configs = enumerate_configs(space);
            std::ostringstream body;
            if (flags.json) {
                nlohmann::json list = nlohmann::json::array();
                for (const auto& c : configs) {
                    list.push_back(std::vector<int>(c.occupations().begin(), c.occupations().end()));
                }
                body << nlohmann::json{{"modes", space.modes()},
                                       {"photons", space.photons()},
                                       {"size", configs.size()},
                                       {"configs", std::move(list)}}
                            .dump(2)
                     << '\n';
            } else {
                body << "rank,occupations\n";
                for (std::size_t k = 0; k < configs.size(); ++k) {
                    body << k << ",\"" << configs[k].to_string() << "\"\n";
                }
            }
            emit(out, flags, body.str());
            return kExitOk;
        }

        if (dist->parsed()) {
            const ConfigSpace space(flags.run.modes, flags.run.photons);
            const ModeUnitary u = flags.unitary();
            const BosonConfig s = select_seed(space, seed_config, seed_rank);
            SimulationOptions options = flags.options();
            options.law = law == "born" ? ProbabilityLaw::born : ProbabilityLaw::literal_abs;
            const FineDistribution fine = output_distribution(u, s, options);
            std::ostringstream body;
            if (bins_opt->count() > 0) {
                const auto coarse = coarse_grain(
                    fine, make_binning(space, flags.run.bins, flags.run.binning_mode,
                                       flags.run.binning_seed));
                if (flags.json) {
                    body << nlohmann::json{{"seed_config", s.to_string()},
                                           {"bins", flags.run.bins},
                                           {"probs", coarse.probs},
                                           {"mpb", coarse.mpb},
                                           {"mpb_prob", coarse.mpb_prob}}
                                .dump(2)
                         << '\n';
                } else {
                    write_coarse_csv(body, coarse);
                }
            } else if (flags.json) {
                body << nlohmann::json{{"seed_config", s.to_string()}, {"probs", fine.probs}}.dump(2)
                     << '\n';
            } else {
                write_fine_csv(body, fine);
            }
            emit(out, flags, body.str());
            return kExitOk;
        }

        if (mpb->parsed()) {
            flags.run.validate();
            const BinningScheme binning = flags.run.binning();
            const ModeUnitary u = flags.unitary();
            const BosonConfig s = select_seed(binning.space(), seed_config, seed_rank);
            const auto coarse = coarse_grain(output_distribution(u, s, flags.options()), binning);
            std::ostringstream body;
            if (flags.json) {
                body << nlohmann::json{{"seed_config", s.to_string()},
                                       {"seed_rank", rank_config(binning.space(), s)},
                                       {"mpb", coarse.mpb},
                                       {"mpb_bits", bin_label_bits(coarse.mpb, flags.run.bins)},
                                       {"mpb_prob", coarse.mpb_prob}}
                            .dump(2)
                     << '\n';
            } else {
                body << "seed " << s.to_string() << " -> MPB " << coarse.mpb << " ("
                     << bin_label_bits(coarse.mpb, flags.run.bins) << "), P = "
                     << format_g17(coarse.mpb_prob) << '\n';
            }
            emit(out, flags, body.str());
            return kExitOk;
        }

        if (analyze->parsed()) {
            flags.run.validate();
            const BinningScheme binning = flags.run.binning();
            const ModeUnitary u = flags.unitary();
            const auto report = verify_indistinguishability(u, binning, flags.options());
            if (!flags.out_path.empty()) {
                export_report(report, resolve_output_path(flags.out_path),
                              parse_report_format(format));
            }
            print_json(out, report_to_json(report));
            if (!report.bounds_hold.all()) {
                err << "error: bounds: at least one claimed bound does not hold\n";
                return kExitDomain;
            }
            return kExitOk;
        }

        DemoConfig demo{flags.run, unitary_seed_b, count};
        nlohmann::json summary;
        if (demo_otp->parsed()) {
            summary = run_demo_otp(demo, otp_message);
            if (!flags.json) {
                out << "m = " << summary["message"] << ", C = " << summary["ciphertext"]
                    << ", m' = " << summary["decrypted"] << " (index " << summary["index"]
                    << ", K = " << summary["joint_key"] << ")\n";
            }
        } else if (demo_auth->parsed()) {
            summary = run_demo_auth(demo, trials);
            if (!flags.json) {
                out << "honest acceptance: " << summary["honest_acceptance"] << '\n'
                    << "impostor acceptance: " << summary["impostor_acceptance"]
                    << " (1/d = " << summary["expected_impostor_acceptance"] << ")\n";
            }
        } else if (demo_mac->parsed()) {
            summary = run_demo_mac(demo, mac_message, strict);
            if (!flags.json) {
                out << "m = " << summary["message"] << ", t = " << summary["tag"]
                    << ", verified = " << summary["verified"]
                    << ", tampered accepted = " << summary["tampered_accepted"] << '\n';
            }
        } else if (serve_kdc->parsed()) {
            const Endpoint endpoint = Endpoint::parse(bind);
            KeyStore store(flags.run.bins, flags.run.rng_seed);
            KdcServer server(store, endpoint);
            if (flags.json) {
                print_json(out, {{"listening", server.endpoint().to_string()},
                                 {"bins", flags.run.bins}});
            } else {
                out << "KDC listening on " << server.endpoint().to_string() << " (d = "
                    << flags.run.bins << ")\n";
            }
            out.flush();
            server.run();
            return kExitOk;
        }
        if (flags.json) {
            print_json(out, summary);
        }
        if (!flags.out_path.empty()) {
            write_text_file(resolve_output_path(flags.out_path), summary.dump(2) + "\n");
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << error_kind(e) << ": " << e.what() << '\n';
        return kExitDomain;
    }
}

} // namespace bosonkey::cli
