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

#ifndef BOSONKEY_TOOLS_CLI_HPP
#define BOSONKEY_TOOLS_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "bosonkey/analysis.hpp"
#include "bosonkey/combinatorics.hpp"

namespace bosonkey::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Relative output paths are resolved against this directory when set.
inline constexpr const char* kOutputDirEnv = "BOSONKEY_OUTPUT_DIR";

/// Public run parameters, validated before any work starts.
struct RunConfig {
    int modes = 12;
    int photons = 3;
    int bins = 8;
    BinningMode binning_mode = BinningMode::contiguous;
    std::uint64_t binning_seed = 0;
    std::uint64_t unitary_seed = 42;
    std::uint64_t rng_seed = 1;
    unsigned threads = 0;

    /// Throws DomainError/ResourceError on the first violated precondition.
    void validate() const;
    ConfigSpace space() const { return ConfigSpace(modes, photons); }
    BinningScheme binning() const;
};

enum class ReportFormat { json, csv };

ReportFormat parse_report_format(std::string_view text);

/// Writes `report` to `path`. Output is byte-identical for identical reports.
void export_report(const IndistinguishabilityReport& report, const std::filesystem::path& path,
                   ReportFormat format);

/// `path` resolved against $BOSONKEY_OUTPUT_DIR when relative and the variable is set.
std::filesystem::path resolve_output_path(const std::string& path);

/// Writes `contents` to `path`, throwing Error with the path on failure.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Runs one subcommand. Returns the process exit code.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// End-to-end protocol demos over a loopback KDC. Each returns a JSON summary.
struct DemoConfig {
    RunConfig run;
    std::uint64_t unitary_seed_b = 43;
    int count = 4;
};

nlohmann::json run_demo_otp(const DemoConfig& config, std::optional<int> message);
nlohmann::json run_demo_auth(const DemoConfig& config, int trials);
nlohmann::json run_demo_mac(const DemoConfig& config, std::optional<std::uint64_t> message,
                            bool strict);

} // namespace bosonkey::cli

#endif
