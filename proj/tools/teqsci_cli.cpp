#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "teqsci/oniom.hpp"
#include "teqsci/pipeline.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string fcidump;
    std::string out_dir;
    std::vector<double> dt_grid;
    int shots = -1;
    std::vector<int> states;
    int trotter_steps = -1;
    long long gate_budget = -1;
    long long seed = -1;
    int roots = -1;
    std::vector<int> initial_size;
    std::vector<int> initial_orbitals;
    int initial_electrons = -1;
    std::vector<int> full_orbitals;
    int full_electrons = -1;
    std::string baseline;
    std::string sidecar;
    bool oracle = false;
    bool no_oracle = false;
    bool dump_hamiltonian = false;
    bool resume = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "key = value config file");
    cmd->add_option("--fcidump", flags.fcidump, "FCIDUMP integrals file");
    cmd->add_option("--out", flags.out_dir, "run output directory");
    cmd->add_option("--dt-grid", flags.dt_grid, "time steps in atomic units")->delimiter(',');
    cmd->add_option("--shots-per-pair", flags.shots, "shots per (dt, state) pair");
    cmd->add_option("--states", flags.states, "initial-state indices j")->delimiter(',');
    cmd->add_option("--trotter-steps", flags.trotter_steps, "product-formula steps");
    cmd->add_option("--gate-budget", flags.gate_budget, "two-qubit gates per step");
    cmd->add_option("--seed", flags.seed, "sampling seed");
    cmd->add_option("--roots", flags.roots, "eigenpairs to solve for");
    cmd->add_option("--initial-size", flags.initial_size,
                    "initial space as electrons,orbitals (centered window)")
        ->delimiter(',');
    cmd->add_option("--initial-orbitals", flags.initial_orbitals,
                    "explicit initial-space orbital indices (0-based)")
        ->delimiter(',');
    cmd->add_option("--initial-electrons", flags.initial_electrons, "initial-space electrons");
    cmd->add_option("--full-orbitals", flags.full_orbitals,
                    "explicit full-space orbital indices (0-based)")
        ->delimiter(',');
    cmd->add_option("--full-electrons", flags.full_electrons, "full-space electrons");
    cmd->add_option("--baseline", flags.baseline, "baseline set: initial-sector | hf");
    cmd->add_option("--oniom-sidecar", flags.sidecar, "layer-energy sidecar JSON");
    cmd->add_flag("--oracle", flags.oracle, "enable reference CASCI cross-checks");
    cmd->add_flag("--no-oracle", flags.no_oracle, "disable reference CASCI cross-checks");
    cmd->add_flag("--dump-hamiltonian", flags.dump_hamiltonian, "write full Pauli term lists");
    cmd->add_flag("--resume", flags.resume, "reuse shots.jsonl present in the output directory");
}

teqsci::RunConfig build_config(const CommonFlags& flags) {
    teqsci::RunConfig config;
    if (!flags.config_path.empty()) config = teqsci::parse_config_file(flags.config_path);
    if (!flags.fcidump.empty()) config.fcidump_path = flags.fcidump;
    if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
    if (!flags.dt_grid.empty()) config.dt_grid = flags.dt_grid;
    if (flags.shots >= 0) config.shots_per_pair = flags.shots;
    if (!flags.states.empty()) config.states = flags.states;
    if (flags.trotter_steps >= 0) config.trotter_steps = flags.trotter_steps;
    if (flags.gate_budget >= 0) config.gate_budget = flags.gate_budget;
    if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.roots >= 0) config.n_roots = flags.roots;
    if (!flags.initial_size.empty()) {
        if (flags.initial_size.size() != 2) {
            throw CLI::ValidationError("--initial-size expects electrons,orbitals");
        }
        config.initial_electrons = flags.initial_size[0];
        config.initial_orbital_count = flags.initial_size[1];
    }
    if (!flags.initial_orbitals.empty()) {
        config.initial_space.active_orbital_indices = flags.initial_orbitals;
    }
    if (flags.initial_electrons >= 0) {
        config.initial_space.n_active_electrons = flags.initial_electrons;
        if (config.initial_space.active_orbital_indices.empty()) {
            config.initial_electrons = flags.initial_electrons;
        }
    }
    if (!flags.full_orbitals.empty()) {
        config.full_space.active_orbital_indices = flags.full_orbitals;
    }
    if (flags.full_electrons >= 0) config.full_space.n_active_electrons = flags.full_electrons;
    if (!flags.baseline.empty()) config.baseline = flags.baseline;
    if (!flags.sidecar.empty()) config.oniom_sidecar_path = flags.sidecar;
    if (flags.oracle) config.with_oracle = true;
    if (flags.no_oracle) config.with_oracle = false;
    if (flags.dump_hamiltonian) config.dump_hamiltonian = true;
    if (flags.resume) config.resume = true;
    return config;
}

int run_report(const std::string& fixtures_path, const std::string& sidecar_path,
               const std::string& reference_label, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir.empty() ? "." : out_dir);
    const fs::path out(out_dir.empty() ? "." : out_dir);

    if (!fixtures_path.empty()) {
        std::ifstream in(fixtures_path);
        if (!in.good()) {
            std::cerr << "cannot open " << fixtures_path << "\n";
            return 1;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        const auto [e_hf, methods] = teqsci::parse_method_energies(ss.str());
        const teqsci::MetricsReport report = teqsci::build_metrics(e_hf, methods);
        std::ofstream json_out(out / "metrics.json");
        json_out << report.to_json();
        std::ofstream csv_out(out / "metrics.csv");
        report.write_csv(csv_out);
        report.write_csv(std::cout);
    }
    if (!sidecar_path.empty()) {
        std::ifstream in(sidecar_path);
        if (!in.good()) {
            std::cerr << "cannot open " << sidecar_path << "\n";
            return 1;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        std::vector<teqsci::LayerEnergies> layers;
        for (const auto& raw : teqsci::parse_oniom_sidecar(ss.str())) {
            if (!raw.e_high_model.has_value()) {
                std::cerr << "layer " << raw.label
                          << " has no e_high_model; run the pipeline to fill it\n";
                return 1;
            }
            layers.push_back({raw.label, raw.e_low_real, raw.e_low_model, *raw.e_high_model,
                              "ingested"});
        }
        const std::string reference =
            reference_label.empty() ? layers.front().label : reference_label;
        std::ofstream csv_out(out / "oniom.csv");
        csv_out << "label,e_oniom_hartree,delta_ev\n";
        std::cout << "label,e_oniom_hartree,delta_ev\n";
        for (const auto& entry : teqsci::relative_profile(layers, reference)) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", entry.label.c_str(),
                          entry.total_hartree, entry.delta_ev);
            csv_out << buf;
            std::cout << buf;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sampling-based configuration-interaction workflow driver"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "execute the full workflow");
    add_common_flags(run_cmd, run_flags);

    CommonFlags validate_flags;
    CLI::App* validate_cmd = app.add_subcommand("validate", "check a configuration");
    add_common_flags(validate_cmd, validate_flags);

    std::string report_fixtures, report_sidecar, report_reference, report_out;
    CLI::App* report_cmd =
        app.add_subcommand("report", "generate metrics/profile reports from energies");
    report_cmd->add_option("--fixtures", report_fixtures,
                           "method energies JSON (e_hf + per-method state energies)");
    report_cmd->add_option("--oniom-sidecar", report_sidecar, "layer-energy sidecar JSON");
    report_cmd->add_option("--reference", report_reference, "reference label for the profile");
    report_cmd->add_option("--out", report_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const teqsci::RunConfig config = build_config(run_flags);
            teqsci::run(config);
            std::cout << "run complete: " << config.output_dir << "\n";
            return 0;
        }
        if (validate_cmd->parsed()) {
            const teqsci::RunConfig config = build_config(validate_flags);
            const auto diags = teqsci::validate(config);
            if (diags.empty()) {
                std::cout << "configuration OK\n";
                return 0;
            }
            for (const auto& d : diags) std::cout << "diagnostic: " << d << "\n";
            return 2;
        }
        if (report_cmd->parsed()) {
            if (report_fixtures.empty() && report_sidecar.empty()) {
                std::cerr << "report needs --fixtures and/or --oniom-sidecar\n";
                return 1;
            }
            return run_report(report_fixtures, report_sidecar, report_reference, report_out);
        }
    } catch (const teqsci::StageError& e) {
        std::cerr << "stage " << e.stage << " failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
