#pragma once

#include <iosfwd>
#include <string>

#include "rqsim/analysis.hpp"
#include "rqsim/serialize.hpp"

namespace rqsim {

// ---------------------------------------------------------------------------
// Run configuration and experiment orchestration.
//
// Config files are JSON with a strict schema (unknown keys rejected); every
// experiment writes one output directory with a manifest.json (config echo,
// artifact hashes, wall time), CSV artifacts, and a plot script. Identical
// config and seed produce byte-identical CSV numbers.
// ---------------------------------------------------------------------------

struct RunConfig {
    std::string experiment;  // simulate | compile | noise-map | chevron |
                             // error-scan | spectral | encoding-cost
    std::string preset_name;
    Json preset_params = Json::object();
    TrotterPlan plan;
    Json noise = Json::object();
    std::vector<std::string> observables;
    std::vector<int> initial_spins;
    std::vector<int> initial_modes;
    int truncation = 8;
    uint64_t seed = 0;
    std::string out_dir = "run_out";
    int jobs = 1;
    Json extra = Json::object();  // experiment-specific block
};

/// Validate a raw config document; returns diagnostics (empty when valid).
std::vector<std::string> validate_config(const Json& doc);

/// Parse after validation; throws ConfigError with the first diagnostic.
RunConfig parse_config(const Json& doc);

/// Execute an experiment; returns the process exit code (0 success,
/// 1 runtime failure). Progress notes go to `log`.
int run_experiment(const RunConfig& cfg, std::ostream& log);

/// FNV-1a 64-bit content hash, hex encoded (for the manifest).
std::string content_hash(const std::string& bytes);

/// Deterministic per-grid-point seed.
uint64_t mix_seed(uint64_t base, uint64_t index);

}  // namespace rqsim
