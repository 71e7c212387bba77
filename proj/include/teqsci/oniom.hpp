#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace teqsci {

// Two-layer subtractive energy combination. The low-level energies are
// always ingested (from a JSON sidecar), never computed here.
struct LayerEnergies {
    std::string label;
    double e_low_real = 0.0;   // hartree
    double e_low_model = 0.0;  // hartree
    double e_high_model = 0.0; // hartree
    std::string provenance;    // ingested | qsci | oracle
};

// e_low_real + e_high_model - e_low_model. Inputs must be finite.
double oniom_energy(const LayerEnergies& layer);

struct RelativeEntry {
    std::string label;
    double total_hartree = 0.0;
    double delta_ev = 0.0;
};

// Totals relative to the reference label, in eV.
std::vector<RelativeEntry> relative_profile(const std::vector<LayerEnergies>& entries,
                                            const std::string& reference_label);

// Sidecar JSON: {"layers":[{"label":..., "e_low_real":..., "e_low_model":...,
// "e_high_model": <optional>}]}. Layers without e_high_model get it filled
// by the caller from a subspace/oracle run.
struct SidecarLayer {
    std::string label;
    double e_low_real = 0.0;
    double e_low_model = 0.0;
    std::optional<double> e_high_model;
};
std::vector<SidecarLayer> parse_oniom_sidecar(const std::string& text);

// Method comparison report: correlation and excitation energies in eV plus
// per-root fidelities against a reference solver.
struct MethodEnergies {
    std::string label;
    std::vector<double> state_energies;      // hartree, ascending roots
    std::vector<double> fidelities;          // optional, per root
    std::vector<double> s_squared;           // optional, per root
};

struct MetricsRow {
    std::string label;
    double e0_hartree = 0.0;
    double e_corr_ev = 0.0;
    std::vector<double> delta_e_ev;  // excited roots vs root 0
    std::vector<double> fidelities;
    std::vector<double> s_squared;
};

struct MetricsReport {
    double e_hf_hartree = 0.0;
    std::vector<MetricsRow> rows;

    std::string to_json() const;
    void write_csv(std::ostream& out) const;
};

MetricsReport build_metrics(double e_hf_hartree, const std::vector<MethodEnergies>& methods);

// Fixture/report input JSON:
// {"e_hf": <hartree>, "methods": [{"label":..., "energies":[...],
//  "fidelities":[...], "s_squared":[...]}]}
std::pair<double, std::vector<MethodEnergies>> parse_method_energies(const std::string& text);

}  // namespace teqsci
