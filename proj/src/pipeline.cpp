#include "teqsci/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "teqsci/common.hpp"
#include "teqsci/oniom.hpp"
#include "teqsci/oracle.hpp"
#include "teqsci/pauli.hpp"
#include "teqsci/qsci.hpp"
#include "teqsci/rng.hpp"
#include "teqsci/selection.hpp"
#include "teqsci/statevector.hpp"

namespace fs = std::filesystem;

namespace teqsci {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        require(out.good(), "cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

std::vector<std::string> split_list(std::string s) {
    for (char& c : s) {
        if (c == '[' || c == ']' || c == ',') c = ' ';
    }
    std::stringstream ss(s);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::string strip(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\''))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

}  // namespace

void apply_config_line(RunConfig& config, const std::string& key, const std::string& raw_value) {
    const std::string value = strip(raw_value);
    auto as_int = [&](const std::string& v) { return std::stoll(unquote(v)); };
    auto as_double = [&](const std::string& v) { return std::stod(unquote(v)); };
    auto as_bool = [&](const std::string& v) {
        const std::string u = unquote(v);
        if (u == "true" || u == "1") return true;
        if (u == "false" || u == "0") return false;
        throw std::invalid_argument("bad boolean: " + v);
    };

    if (key == "fcidump") config.fcidump_path = unquote(value);
    else if (key == "output_dir") config.output_dir = unquote(value);
    else if (key == "full_electrons") config.full_space.n_active_electrons = static_cast<int>(as_int(value));
    else if (key == "full_orbitals") {
        config.full_space.active_orbital_indices.clear();
        for (const auto& t : split_list(value)) {
            config.full_space.active_orbital_indices.push_back(static_cast<int>(as_int(t)));
        }
    } else if (key == "initial_electrons") config.initial_electrons = static_cast<int>(as_int(value));
    else if (key == "initial_orbital_count") config.initial_orbital_count = static_cast<int>(as_int(value));
    else if (key == "initial_orbitals") {
        config.initial_space.active_orbital_indices.clear();
        for (const auto& t : split_list(value)) {
            config.initial_space.active_orbital_indices.push_back(static_cast<int>(as_int(t)));
        }
    } else if (key == "initial_size") {
        const auto items = split_list(value);
        require(items.size() == 2, "initial_size expects [electrons, orbitals]");
        config.initial_electrons = static_cast<int>(as_int(items[0]));
        config.initial_orbital_count = static_cast<int>(as_int(items[1]));
    } else if (key == "dt_grid") {
        config.dt_grid.clear();
        for (const auto& t : split_list(value)) config.dt_grid.push_back(as_double(t));
    } else if (key == "shots_per_pair") config.shots_per_pair = static_cast<int>(as_int(value));
    else if (key == "states") {
        config.states.clear();
        for (const auto& t : split_list(value)) config.states.push_back(static_cast<int>(as_int(t)));
    } else if (key == "trotter_steps") config.trotter_steps = static_cast<int>(as_int(value));
    else if (key == "gate_budget") config.gate_budget = as_int(value);
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(as_int(value));
    else if (key == "baseline") config.baseline = unquote(value);
    else if (key == "roots") config.n_roots = static_cast<int>(as_int(value));
    else if (key == "oniom_sidecar") config.oniom_sidecar_path = unquote(value);
    else if (key == "oracle") config.with_oracle = as_bool(value);
    else if (key == "dump_hamiltonian") config.dump_hamiltonian = as_bool(value);
    else throw std::invalid_argument("unknown config key: " + key);
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open config file: " + path);
    RunConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        " is not key = value");
        }
        apply_config_line(config, strip(line.substr(0, eq)), line.substr(eq + 1));
    }
    return config;
}

namespace {

struct ResolvedSpaces {
    ActiveSpaceSpec initial;
    ActiveSpaceSpec full;
};

ResolvedSpaces resolve_spaces(const RunConfig& config, const IntegralTable& parent) {
    ResolvedSpaces out;
    out.full = config.full_space;
    if (out.full.active_orbital_indices.empty()) {
        for (int p = 0; p < parent.n_orbitals(); ++p) out.full.active_orbital_indices.push_back(p);
    }
    if (out.full.n_active_electrons <= 0) {
        // Default: every parent electron not frozen below the window.
        int below = 0;
        for (int p = 0; p < out.full.active_orbital_indices.front(); ++p) ++below;
        out.full.n_active_electrons = parent.n_electrons() - 2 * below;
    }

    out.initial = config.initial_space;
    if (out.initial.active_orbital_indices.empty()) {
        if (config.initial_electrons < 0 && config.initial_orbital_count < 0) {
            out.initial = out.full;  // degenerate default: H0 = H
        } else {
            require(config.initial_electrons >= 0 && config.initial_orbital_count > 0,
                    "initial space needs both electron and orbital counts");
            // Centered window inside the full space: freeze the lowest
            // (N_full - N_init)/2 full-space orbitals, take the next ones.
            const int removed = out.full.n_active_electrons - config.initial_electrons;
            require(removed >= 0 && removed % 2 == 0,
                    "initial electron count must differ from the full space by a closed shell");
            const int offset = removed / 2;
            require(offset + config.initial_orbital_count <=
                        static_cast<int>(out.full.active_orbital_indices.size()),
                    "initial window exceeds the full space");
            out.initial.n_active_electrons = config.initial_electrons;
            for (int k = 0; k < config.initial_orbital_count; ++k) {
                out.initial.active_orbital_indices.push_back(
                    out.full.active_orbital_indices[static_cast<std::size_t>(offset + k)]);
            }
        }
    }
    return out;
}

}  // namespace

EmbeddingLayout compute_embedding(const IntegralTable& parent, const ActiveSpaceSpec& initial,
                                  const ActiveSpaceSpec& full) {
    const std::vector<int> frozen_full = frozen_orbitals(parent, full);
    const std::vector<int> frozen_init = frozen_orbitals(parent, initial);

    auto position_in_full = [&](int parent_orbital) {
        const auto it = std::find(full.active_orbital_indices.begin(),
                                  full.active_orbital_indices.end(), parent_orbital);
        require(it != full.active_orbital_indices.end(),
                "initial-space orbital " + std::to_string(parent_orbital) +
                    " is not part of the full space");
        return static_cast<int>(it - full.active_orbital_indices.begin());
    };

    EmbeddingLayout layout;
    for (const int p : initial.active_orbital_indices) {
        const int pos = position_in_full(p);
        layout.placement.push_back(2 * pos);
        layout.placement.push_back(2 * pos + 1);
    }
    for (const int f : frozen_init) {
        if (std::find(frozen_full.begin(), frozen_full.end(), f) != frozen_full.end()) continue;
        // Frozen for H0 but active in the full space: doubly occupied there.
        const int pos = position_in_full(f);
        layout.extra_occupied.push_back(2 * pos);
        layout.extra_occupied.push_back(2 * pos + 1);
    }
    return layout;
}

std::vector<std::string> validate(const RunConfig& config) {
    std::vector<std::string> diags;
    if (config.fcidump_path.empty()) {
        diags.push_back("fcidump path is empty");
        return diags;
    }
    if (!fs::exists(config.fcidump_path)) {
        diags.push_back("fcidump file not found: " + config.fcidump_path);
        return diags;
    }

    IntegralTable parent(1, 0, 0);
    try {
        parent = parse_fcidump_file(config.fcidump_path);
    } catch (const std::exception& e) {
        diags.push_back(std::string("fcidump parse failed: ") + e.what());
        return diags;
    }

    ResolvedSpaces spaces;
    try {
        spaces = resolve_spaces(config, parent);
        frozen_orbitals(parent, spaces.full);
        frozen_orbitals(parent, spaces.initial);
    } catch (const std::exception& e) {
        diags.push_back(std::string("active-space resolution failed: ") + e.what());
        return diags;
    }

    for (const int p : spaces.initial.active_orbital_indices) {
        if (std::find(spaces.full.active_orbital_indices.begin(),
                      spaces.full.active_orbital_indices.end(),
                      p) == spaces.full.active_orbital_indices.end()) {
            std::ostringstream msg;
            msg << "initial space is not nested in the full space: orbital " << p
                << " missing from full orbitals [";
            for (std::size_t i = 0; i < spaces.full.active_orbital_indices.size(); ++i) {
                if (i) msg << ",";
                msg << spaces.full.active_orbital_indices[i];
            }
            msg << "]";
            diags.push_back(msg.str());
        }
    }
    if (spaces.initial.n_active_electrons > spaces.full.n_active_electrons) {
        diags.push_back("initial space has more electrons than the full space");
    }

    const int n_qubits = 2 * static_cast<int>(spaces.full.active_orbital_indices.size());
    if (n_qubits > kMaxQubits) {
        diags.push_back("register needs " + std::to_string(n_qubits) +
                        " qubits; the statevector backend is capped at " +
                        std::to_string(kMaxQubits));
    }

    if (config.dt_grid.empty()) diags.push_back("dt_grid is empty");
    for (const double dt : config.dt_grid) {
        if (!(dt > 0.0)) diags.push_back("dt_grid entries must be > 0 (got " + fmt(dt) + ")");
    }
    if (config.shots_per_pair < 0) diags.push_back("shots_per_pair must be >= 0");
    if (config.states.empty()) diags.push_back("states list is empty");
    for (const int j : config.states) {
        if (j < 0) diags.push_back("state index must be >= 0 (got " + std::to_string(j) + ")");
    }
    if (config.trotter_steps < 0) diags.push_back("trotter_steps must be >= 0");
    if (config.gate_budget < 0) diags.push_back("gate_budget must be >= 0");
    if (config.n_roots < 1) diags.push_back("roots must be >= 1");
    if (config.baseline != "initial-sector" && config.baseline != "hf") {
        diags.push_back("unknown baseline kind: " + config.baseline);
    }
    if (!config.oniom_sidecar_path.empty() && !fs::exists(config.oniom_sidecar_path)) {
        diags.push_back("oniom sidecar not found: " + config.oniom_sidecar_path);
    }
    return diags;
}

std::string config_to_json(const RunConfig& config) {
    std::ostringstream out;
    out << "{\"fcidump\":\"" << config.fcidump_path << "\"";
    auto list_int = [&](const char* key, const std::vector<int>& v) {
        out << ",\"" << key << "\":[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out << ",";
            out << v[i];
        }
        out << "]";
    };
    out << ",\"full_electrons\":" << config.full_space.n_active_electrons;
    list_int("full_orbitals", config.full_space.active_orbital_indices);
    out << ",\"initial_electrons\":"
        << (config.initial_space.active_orbital_indices.empty() ? config.initial_electrons
                                                                : config.initial_space.n_active_electrons);
    list_int("initial_orbitals", config.initial_space.active_orbital_indices);
    out << ",\"initial_orbital_count\":" << config.initial_orbital_count;
    out << ",\"dt_grid\":[";
    for (std::size_t i = 0; i < config.dt_grid.size(); ++i) {
        if (i) out << ",";
        out << fmt(config.dt_grid[i]);
    }
    out << "],\"shots_per_pair\":" << config.shots_per_pair;
    list_int("states", config.states);
    out << ",\"trotter_steps\":" << config.trotter_steps
        << ",\"gate_budget\":" << config.gate_budget << ",\"seed\":" << config.seed
        << ",\"baseline\":\"" << config.baseline << "\",\"roots\":" << config.n_roots
        << ",\"oniom_sidecar\":\"" << config.oniom_sidecar_path << "\",\"oracle\":"
        << (config.with_oracle ? "true" : "false") << ",\"dump_hamiltonian\":"
        << (config.dump_hamiltonian ? "true" : "false") << "}";
    return out.str();
}

std::uint64_t config_hash(const RunConfig& config) {
    // FNV-1a over the canonical config JSON.
    const std::string s = config_to_json(config);
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

Determinant embed_determinant(const Determinant& small, const EmbeddingLayout& layout,
                              int n_total) {
    std::uint64_t bits = 0;
    for (const int q : layout.extra_occupied) bits |= 1ULL << q;
    for (int q = 0; q < small.n_spin_orbitals; ++q) {
        if (small.occupied(q)) bits |= 1ULL << layout.placement[static_cast<std::size_t>(q)];
    }
    return Determinant(bits, n_total);
}

ConfigurationSet build_baseline(const RunConfig& config, const IntegralTable& table_full,
                                const IntegralTable& table_init, const EmbeddingLayout& layout) {
    const int n_qubits = 2 * table_full.n_orbitals();
    ConfigurationSet baseline(n_qubits);
    if (config.baseline == "hf") {
        baseline.insert(hf_determinant(table_full.n_orbitals(), table_full.n_electrons(),
                                       table_full.ms2()),
                        kBaseline);
        return baseline;
    }
    // "initial-sector": the full determinant sector of the initial space,
    // embedded with the extra occupied/virtual orbitals fixed.
    for (const auto& d :
         sector_basis(table_init.n_orbitals(), table_init.n_electrons(), table_init.ms2())) {
        baseline.insert(embed_determinant(d, layout, n_qubits), kBaseline);
    }
    return baseline;
}

struct ShotRecord {
    double dt;
    int j;
    std::vector<std::pair<Determinant, int>> outcomes;
    int n_shots;
};

std::string shots_to_jsonl(const std::vector<ShotBatch>& batches) {
    std::ostringstream out;
    for (const auto& b : batches) {
        for (const auto& [d, count] : b.outcomes) {
            out << "{\"dt\":" << fmt(b.dt) << ",\"j\":" << b.state_index << ",\"bitstring\":\""
                << d.to_string() << "\",\"count\":" << count << "}\n";
        }
    }
    return out.str();
}

std::vector<ShotBatch> shots_from_jsonl(const std::string& text, int n_qubits) {
    std::vector<ShotBatch> batches;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (strip(line).empty()) continue;
        const auto j = nlohmann::json::parse(line);
        const double dt = j.at("dt").get<double>();
        const int state = j.at("j").get<int>();
        const Determinant d = Determinant::from_string(j.at("bitstring").get<std::string>());
        require(d.n_spin_orbitals == n_qubits, "shot bitstring width mismatch");
        const int count = j.at("count").get<int>();
        if (batches.empty() || batches.back().dt != dt || batches.back().state_index != state) {
            ShotBatch b;
            b.dt = dt;
            b.state_index = state;
            batches.push_back(b);
        }
        batches.back().outcomes.push_back({d, count});
        batches.back().n_shots += count;
    }
    return batches;
}

}  // namespace

void run(const RunConfig& config) {
    {
        const auto diags = validate(config);
        if (!diags.empty()) {
            std::string msg = "configuration invalid:";
            for (const auto& d : diags) msg += "\n  - " + d;
            throw StageError("validate", msg);
        }
    }
    const fs::path out_dir(config.output_dir);
    fs::create_directories(out_dir);

    // ---- stage: ingest ----
    IntegralTable parent(1, 0, 0);
    ResolvedSpaces spaces;
    EmbeddingLayout layout;
    try {
        parent = parse_fcidump_file(config.fcidump_path);
        spaces = resolve_spaces(config, parent);
        layout = compute_embedding(parent, spaces.initial, spaces.full);
    } catch (const std::exception& e) {
        throw StageError("ingest", e.what());
    }

    const IntegralTable table_full = restrict_active_space(parent, spaces.full);
    const IntegralTable table_init = restrict_active_space(parent, spaces.initial);
    const int n_qubits = 2 * table_full.n_orbitals();

    // ---- stage: hamiltonian ----
    PauliSum h_full(n_qubits), h_init_embedded(n_qubits), h_drive(n_qubits);
    try {
        h_full = jordan_wigner(table_full);
        const PauliSum h_init = jordan_wigner(table_init);
        h_init_embedded = embed_operator(h_init, layout.placement, n_qubits);
        h_drive = subtract(h_full, h_init_embedded);

        std::ostringstream summary;
        summary << "{\"parent\":{\"n_orbitals\":" << parent.n_orbitals()
                << ",\"n_electrons\":" << parent.n_electrons() << ",\"ms2\":" << parent.ms2()
                << ",\"e_core\":" << fmt(parent.e_core()) << "}";
        auto space_json = [&](const char* key, const ActiveSpaceSpec& s, const IntegralTable& t) {
            summary << ",\"" << key << "\":{\"electrons\":" << s.n_active_electrons
                    << ",\"orbitals\":[";
            for (std::size_t i = 0; i < s.active_orbital_indices.size(); ++i) {
                if (i) summary << ",";
                summary << s.active_orbital_indices[i];
            }
            summary << "],\"e_core\":" << fmt(t.e_core()) << "}";
        };
        space_json("full_space", spaces.full, table_full);
        space_json("initial_space", spaces.initial, table_init);
        summary << ",\"n_qubits\":" << n_qubits << ",\"terms_full\":" << h_full.size()
                << ",\"terms_initial\":" << h_init.size()
                << ",\"terms_difference\":" << h_drive.size();
        summary << ",\"placement\":[";
        for (std::size_t i = 0; i < layout.placement.size(); ++i) {
            if (i) summary << ",";
            summary << layout.placement[i];
        }
        summary << "],\"extra_occupied\":[";
        for (std::size_t i = 0; i < layout.extra_occupied.size(); ++i) {
            if (i) summary << ",";
            summary << layout.extra_occupied[i];
        }
        summary << "]}";
        write_file_atomic(out_dir / "hamiltonian.json", summary.str());
        if (config.dump_hamiltonian) {
            write_file_atomic(out_dir / "hamiltonian_full.json", h_full.to_json());
            write_file_atomic(out_dir / "hamiltonian_difference.json", h_drive.to_json());
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError("hamiltonian", e.what());
    }

    // ---- stage: initial-eigenpairs ----
    int max_state = 0;
    for (const int j : config.states) max_state = std::max(max_state, j);
    CasciSolution h0_solution;
    try {
        h0_solution = casci(table_init, max_state + 1);
        std::ostringstream out;
        out << "{\"eigenvalues\":[";
        for (std::size_t k = 0; k < h0_solution.eigenvalues.size(); ++k) {
            if (k) out << ",";
            out << fmt(h0_solution.eigenvalues[k]);
        }
        out << "],\"s_squared\":[";
        for (int k = 0; k <= max_state; ++k) {
            if (k) out << ",";
            std::vector<double> coeffs(h0_solution.basis.size());
            for (std::size_t i = 0; i < coeffs.size(); ++i) {
                coeffs[i] = h0_solution.eigenvectors(static_cast<int>(i), k);
            }
            out << fmt(s_squared(h0_solution.basis, coeffs));
        }
        out << "]}";
        write_file_atomic(out_dir / "h0_eigenpairs.json", out.str());
    } catch (const std::exception& e) {
        throw StageError("initial-eigenpairs", e.what());
    }

    // ---- stage: sampling ----
    std::vector<ShotBatch> batches;
    const fs::path shots_path = out_dir / "shots.jsonl";
    try {
        if (config.resume && fs::exists(shots_path)) {
            std::ifstream in(shots_path);
            std::ostringstream ss;
            ss << in.rdbuf();
            batches = shots_from_jsonl(ss.str(), n_qubits);
        } else {
            // Small-register states seeded from the H0 eigenvectors.
            std::vector<Statevector> seeds;
            for (const int j : config.states) {
                require(j < static_cast<int>(h0_solution.basis.size()),
                        "state index exceeds the initial-space sector dimension");
                Statevector small(2 * table_init.n_orbitals());
                small[0] = 0.0;
                for (std::size_t i = 0; i < h0_solution.basis.size(); ++i) {
                    small[state_index(h0_solution.basis[i])] =
                        h0_solution.eigenvectors(static_cast<int>(i), j);
                }
                seeds.push_back(prepare_initial_state(small, layout.placement,
                                                      layout.extra_occupied, n_qubits));
            }

            std::ostringstream trotter_info;
            trotter_info << "{\"gate_budget\":" << config.gate_budget
                         << ",\"n_steps\":" << config.trotter_steps << ",\"plans\":[";
            SplitMix64 root(config.seed);
            std::uint64_t pair_index = 0;
            for (std::size_t di = 0; di < config.dt_grid.size(); ++di) {
                const double dt = config.dt_grid[di];
                const TrotterPlan plan =
                    build_trotter_plan(h_drive, dt, config.trotter_steps, config.gate_budget);
                if (di) trotter_info << ",";
                trotter_info << "{\"dt\":" << fmt(dt)
                             << ",\"retained_terms\":" << plan.retained_count()
                             << ",\"total_terms\":" << plan.terms.size()
                             << ",\"retained_cost\":" << plan.retained_cost() << "}";
                for (std::size_t si = 0; si < config.states.size(); ++si) {
                    const Statevector evolved = evolve(seeds[si], plan);
                    ShotBatch batch = sample(evolved, config.shots_per_pair,
                                             root.fork(pair_index).next());
                    ++pair_index;
                    batch.dt = dt;
                    batch.state_index = config.states[si];
                    batches.push_back(std::move(batch));
                }
            }
            trotter_info << "]}";
            write_file_atomic(out_dir / "trotter.json", trotter_info.str());
            write_file_atomic(shots_path, shots_to_jsonl(batches));
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError("sampling", e.what());
    }

    // ---- stage: selection ----
    ConfigurationSet baseline, merged;
    std::vector<PostselectResult> kept_batches;
    try {
        baseline = build_baseline(config, table_full, table_init, layout);
        std::ostringstream stats;
        stats << "{\"pairs\":[";
        long long total_kept = 0, total_rejected = 0;
        for (std::size_t b = 0; b < batches.size(); ++b) {
            PostselectResult result =
                postselect(batches[b], table_full.n_electrons(), table_full.ms2());
            long long kept_count = 0;
            for (const auto& [d, c] : result.kept) kept_count += c;
            if (b) stats << ",";
            stats << "{\"dt\":" << fmt(batches[b].dt) << ",\"j\":" << batches[b].state_index
                  << ",\"kept\":" << kept_count << ",\"rejected\":" << result.rejected_count
                  << "}";
            total_kept += kept_count;
            total_rejected += result.rejected_count;
            kept_batches.push_back(std::move(result));
        }
        merged = merge(kept_batches, baseline);

        const std::size_t n_baseline = baseline.size();
        std::size_t sampled_new = 0, augmented_new = 0;
        for (std::size_t i = 0; i < merged.size(); ++i) {
            const auto tag = merged.tags(i);
            if (tag & kBaseline) continue;
            if (tag & kSampled) ++sampled_new;
            else if (tag & kSpinAugmented) ++augmented_new;
        }
        stats << "],\"total_kept\":" << total_kept << ",\"total_rejected\":" << total_rejected
              << ",\"baseline_size\":" << n_baseline
              << ",\"new_sampled_configurations\":" << sampled_new
              << ",\"new_spin_augmented_configurations\":" << augmented_new
              << ",\"merged_size\":" << merged.size() << "}";
        write_file_atomic(out_dir / "postselection.json", stats.str());
        write_file_atomic(out_dir / "configurations.json", merged.to_json());
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError("selection", e.what());
    }

    // ---- stage: subspace ----
    SubspaceResult subspace;
    try {
        require(config.n_roots <= static_cast<int>(merged.size()),
                "requested more roots than merged configurations");
        subspace = qsci_energies(table_full, merged, config.n_roots);
        write_file_atomic(out_dir / "subspace.json", subspace.to_json());
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError("subspace", e.what());
    }

    // ---- stage: reports ----
    try {
        // Reference solution for fidelities and histogram ordering.
        const int oracle_roots = std::max(config.n_roots, max_state + 1);
        CasciSolution full_solution;
        bool have_oracle = false;
        if (config.with_oracle) {
            full_solution = casci(table_full, oracle_roots);
            have_oracle = true;
        }

        auto coeffs_of = [](const Eigen::MatrixXd& vectors, int col) {
            std::vector<double> c(static_cast<std::size_t>(vectors.rows()));
            for (int i = 0; i < vectors.rows(); ++i) {
                c[static_cast<std::size_t>(i)] = vectors(i, col);
            }
            return c;
        };

        // Histograms per sampled state.
        for (const int j : config.states) {
            std::unordered_map<std::uint64_t, double> weights;
            if (have_oracle && j < static_cast<int>(full_solution.eigenvalues.size())) {
                for (std::size_t i = 0; i < full_solution.basis.size(); ++i) {
                    const double c = full_solution.eigenvectors(static_cast<int>(i), j);
                    weights[full_solution.basis[i].bits] = c * c;
                }
            } else if (j < subspace.n_roots) {
                for (std::size_t i = 0; i < merged.size(); ++i) {
                    const double c = subspace.eigenvectors(static_cast<int>(i), j);
                    weights[merged.members()[i].bits] = c * c;
                }
            }
            std::vector<ShotBatch> state_batches;
            for (const auto& b : batches) {
                if (b.state_index == j) state_batches.push_back(b);
            }
            const HistogramTable table = histogram(state_batches, baseline, weights,
                                                   table_full.n_electrons(), table_full.ms2());
            std::ostringstream csv;
            write_histogram_csv(table, csv);
            write_file_atomic(out_dir / ("histogram_j" + std::to_string(j) + ".csv"), csv.str());
        }

        // Method comparison metrics.
        const double e_hf = hf_energy(table_full);
        std::vector<MethodEnergies> methods;
        {
            MethodEnergies hf;
            hf.label = "HF";
            hf.state_energies = {e_hf};
            hf.s_squared = {0.0};
            if (have_oracle) {
                const Determinant hf_det = hf_determinant(
                    table_full.n_orbitals(), table_full.n_electrons(), table_full.ms2());
                const std::vector<Determinant> det{hf_det};
                const std::vector<double> one{1.0};
                hf.fidelities = {fidelity(det, one, full_solution.basis,
                                          coeffs_of(full_solution.eigenvectors, 0))};
            }
            methods.push_back(std::move(hf));
        }
        {
            const int roots_b = std::min<int>(config.n_roots, static_cast<int>(baseline.size()));
            const SubspaceResult base_result = qsci_energies(table_full, baseline, roots_b);
            MethodEnergies base;
            base.label = config.baseline == "hf"
                             ? "baseline-HF-CI"
                             : "baseline-CASCI(" + std::to_string(table_init.n_electrons()) + "," +
                                   std::to_string(table_init.n_orbitals()) + ")";
            base.state_energies = base_result.eigenvalues;
            for (int k = 0; k < roots_b; ++k) {
                base.s_squared.push_back(s_squared(base_result.configurations.members(),
                                                   coeffs_of(base_result.eigenvectors, k)));
                if (have_oracle) {
                    base.fidelities.push_back(
                        fidelity(base_result.configurations.members(),
                                 coeffs_of(base_result.eigenvectors, k), full_solution.basis,
                                 coeffs_of(full_solution.eigenvectors, k)));
                }
            }
            methods.push_back(std::move(base));
        }
        {
            MethodEnergies te;
            te.label = "TE-QSCI(" + std::to_string(table_full.n_electrons()) + "," +
                       std::to_string(table_full.n_orbitals()) + ")";
            te.state_energies = subspace.eigenvalues;
            for (int k = 0; k < subspace.n_roots; ++k) {
                te.s_squared.push_back(
                    s_squared(merged.members(), coeffs_of(subspace.eigenvectors, k)));
                if (have_oracle) {
                    te.fidelities.push_back(fidelity(
                        merged.members(), coeffs_of(subspace.eigenvectors, k),
                        full_solution.basis, coeffs_of(full_solution.eigenvectors, k)));
                }
            }
            methods.push_back(std::move(te));
        }
        if (have_oracle) {
            MethodEnergies exact;
            exact.label = "CASCI(" + std::to_string(table_full.n_electrons()) + "," +
                          std::to_string(table_full.n_orbitals()) + ")";
            exact.state_energies.assign(full_solution.eigenvalues.begin(),
                                        full_solution.eigenvalues.begin() + config.n_roots);
            for (int k = 0; k < config.n_roots; ++k) {
                exact.s_squared.push_back(
                    s_squared(full_solution.basis, coeffs_of(full_solution.eigenvectors, k)));
                exact.fidelities.push_back(1.0);
            }
            methods.push_back(std::move(exact));
        }
        const MetricsReport metrics = build_metrics(e_hf, methods);
        write_file_atomic(out_dir / "metrics.json", metrics.to_json());
        std::ostringstream metrics_csv;
        metrics.write_csv(metrics_csv);
        write_file_atomic(out_dir / "metrics.csv", metrics_csv.str());

        if (!config.oniom_sidecar_path.empty()) {
            std::ifstream in(config.oniom_sidecar_path);
            std::ostringstream ss;
            ss << in.rdbuf();
            std::vector<LayerEnergies> layers;
            for (const auto& raw : parse_oniom_sidecar(ss.str())) {
                LayerEnergies layer;
                layer.label = raw.label;
                layer.e_low_real = raw.e_low_real;
                layer.e_low_model = raw.e_low_model;
                if (raw.e_high_model.has_value()) {
                    layer.e_high_model = *raw.e_high_model;
                    layer.provenance = "ingested";
                } else {
                    layer.e_high_model = subspace.eigenvalues[0];
                    layer.provenance = "qsci";
                }
                layers.push_back(std::move(layer));
            }
            require(!layers.empty(), "oniom sidecar has no layers");
            const auto profile = relative_profile(layers, layers.front().label);
            std::ostringstream oniom_json;
            oniom_json << "{\"reference\":\"" << layers.front().label << "\",\"entries\":[";
            for (std::size_t i = 0; i < profile.size(); ++i) {
                if (i) oniom_json << ",";
                oniom_json << "{\"label\":\"" << profile[i].label
                           << "\",\"e_oniom\":" << fmt(profile[i].total_hartree)
                           << ",\"delta_ev\":" << fmt(profile[i].delta_ev) << ",\"provenance\":\""
                           << layers[i].provenance << "\"}";
            }
            oniom_json << "]}";
            write_file_atomic(out_dir / "oniom.json", oniom_json.str());
            std::ostringstream oniom_csv;
            oniom_csv << "label,e_oniom_hartree,delta_ev,provenance\n";
            for (std::size_t i = 0; i < profile.size(); ++i) {
                oniom_csv << profile[i].label << "," << fmt(profile[i].total_hartree) << ","
                          << fmt(profile[i].delta_ev) << "," << layers[i].provenance << "\n";
            }
            write_file_atomic(out_dir / "oniom.csv", oniom_csv.str());
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError("reports", e.what());
    }

    // ---- manifest ----
    std::ostringstream manifest;
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(config_hash(config)));
    manifest << "{\"version\":\"" << kVersion << "\",\"config_hash\":\"" << hash_hex
             << "\",\"stages\":[\"ingest\",\"hamiltonian\",\"initial-eigenpairs\",\"sampling\","
                "\"selection\",\"subspace\",\"reports\"],\"config\":"
             << config_to_json(config) << "}";
    write_file_atomic(out_dir / "manifest.json", manifest.str());
}

}  // namespace teqsci
