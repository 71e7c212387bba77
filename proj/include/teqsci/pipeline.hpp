#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "teqsci/integrals.hpp"

namespace teqsci {

// End-to-end run configuration. Orbital indices are 0-based positions in
// the FCIDUMP orbital list (assumed energy-ordered).
struct RunConfig {
    std::string fcidump_path;
    std::string output_dir = "runs/out";

    // Empty orbital lists mean defaults: full space = every orbital in the
    // FCIDUMP; initial space = centered window of initial_size.
    ActiveSpaceSpec initial_space;
    ActiveSpaceSpec full_space;
    int initial_electrons = -1;  // used with the centered-window default
    int initial_orbital_count = -1;

    std::vector<double> dt_grid{1e-3, 2.5, 5.0, 7.5};
    int shots_per_pair = 1500;
    std::vector<int> states{0, 1, 2};
    int trotter_steps = 2;
    long long gate_budget = 500;
    std::uint64_t seed = 1;
    std::string baseline = "initial-sector";  // or "hf"
    int n_roots = 3;
    std::string oniom_sidecar_path;
    bool with_oracle = true;
    bool dump_hamiltonian = false;
    bool resume = false;  // reuse shots.jsonl already in output_dir
};

// Key = value config file ("TOML-like": scalars, quoted strings and
// [a, b, c] lists; # comments). CLI flags override file values.
RunConfig parse_config_file(const std::string& path);
void apply_config_line(RunConfig& config, const std::string& key, const std::string& value);

// All diagnostics for a config; empty means runnable. Never throws.
std::vector<std::string> validate(const RunConfig& config);

// Qubit layout of the initial-space register inside the full-space register.
struct EmbeddingLayout {
    std::vector<int> placement;       // small qubit -> full-register qubit
    std::vector<int> extra_occupied;  // full-register qubits driven to |1>
};
EmbeddingLayout compute_embedding(const IntegralTable& parent, const ActiveSpaceSpec& initial,
                                  const ActiveSpaceSpec& full);

struct StageError : std::runtime_error {
    std::string stage;
    StageError(std::string stage_name, const std::string& message)
        : std::runtime_error(message), stage(std::move(stage_name)) {}
};

// Executes baseline -> sampling -> selection -> subspace solve -> reports,
// writing artifacts into config.output_dir in stage order. Identical
// config+seed produces byte-identical numeric artifacts. Throws StageError;
// artifacts of completed stages are retained.
void run(const RunConfig& config);

std::string config_to_json(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace teqsci
