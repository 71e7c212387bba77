#include "teqsci/oniom.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "teqsci/common.hpp"

namespace teqsci {

double oniom_energy(const LayerEnergies& layer) {
    require(std::isfinite(layer.e_low_real) && std::isfinite(layer.e_low_model) &&
                std::isfinite(layer.e_high_model),
            "layer energies must be finite");
    return layer.e_low_real + layer.e_high_model - layer.e_low_model;
}

std::vector<RelativeEntry> relative_profile(const std::vector<LayerEnergies>& entries,
                                            const std::string& reference_label) {
    double reference = 0.0;
    bool found = false;
    for (const auto& layer : entries) {
        if (layer.label == reference_label) {
            reference = oniom_energy(layer);
            found = true;
            break;
        }
    }
    require(found, "reference label not present: " + reference_label);

    std::vector<RelativeEntry> out;
    out.reserve(entries.size());
    for (const auto& layer : entries) {
        const double total = oniom_energy(layer);
        out.push_back({layer.label, total, (total - reference) * kHartreeToEv});
    }
    return out;
}

std::vector<SidecarLayer> parse_oniom_sidecar(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    require(j.contains("layers") && j["layers"].is_array(), "sidecar missing layers array");
    std::vector<SidecarLayer> out;
    for (const auto& item : j["layers"]) {
        SidecarLayer layer;
        layer.label = item.at("label").get<std::string>();
        layer.e_low_real = item.at("e_low_real").get<double>();
        layer.e_low_model = item.at("e_low_model").get<double>();
        if (item.contains("e_high_model") && !item["e_high_model"].is_null()) {
            layer.e_high_model = item["e_high_model"].get<double>();
        }
        out.push_back(std::move(layer));
    }
    return out;
}

MetricsReport build_metrics(double e_hf_hartree, const std::vector<MethodEnergies>& methods) {
    MetricsReport report;
    report.e_hf_hartree = e_hf_hartree;
    for (const auto& method : methods) {
        require(!method.state_energies.empty(), "method has no state energies: " + method.label);
        MetricsRow row;
        row.label = method.label;
        row.e0_hartree = method.state_energies[0];
        row.e_corr_ev = (method.state_energies[0] - e_hf_hartree) * kHartreeToEv;
        for (std::size_t j = 1; j < method.state_energies.size(); ++j) {
            row.delta_e_ev.push_back((method.state_energies[j] - method.state_energies[0]) *
                                     kHartreeToEv);
        }
        row.fidelities = method.fidelities;
        row.s_squared = method.s_squared;
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string MetricsReport::to_json() const {
    std::ostringstream out;
    out << "{\"e_hf\":" << format_double(e_hf_hartree) << ",\"rows\":[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i) out << ",";
        const auto& r = rows[i];
        out << "{\"label\":\"" << r.label << "\",\"e0\":" << format_double(r.e0_hartree)
            << ",\"e_corr_ev\":" << format_double(r.e_corr_ev) << ",\"delta_e_ev\":[";
        for (std::size_t k = 0; k < r.delta_e_ev.size(); ++k) {
            if (k) out << ",";
            out << format_double(r.delta_e_ev[k]);
        }
        out << "],\"fidelities\":[";
        for (std::size_t k = 0; k < r.fidelities.size(); ++k) {
            if (k) out << ",";
            out << format_double(r.fidelities[k]);
        }
        out << "],\"s_squared\":[";
        for (std::size_t k = 0; k < r.s_squared.size(); ++k) {
            if (k) out << ",";
            out << format_double(r.s_squared[k]);
        }
        out << "]}";
    }
    out << "]}";
    return out.str();
}

void MetricsReport::write_csv(std::ostream& out) const {
    std::size_t max_excited = 0;
    std::size_t max_f = 0;
    for (const auto& r : rows) {
        max_excited = std::max(max_excited, r.delta_e_ev.size());
        max_f = std::max(max_f, r.fidelities.size());
    }
    out << "method,e0_hartree,e_corr_ev";
    for (std::size_t k = 0; k < max_excited; ++k) out << ",delta_e_" << k + 1 << "_ev";
    for (std::size_t k = 0; k < max_f; ++k) out << ",fidelity_" << k;
    out << "\n";
    for (const auto& r : rows) {
        out << r.label << "," << format_double(r.e0_hartree) << ","
            << format_double(r.e_corr_ev);
        for (std::size_t k = 0; k < max_excited; ++k) {
            out << ",";
            if (k < r.delta_e_ev.size()) out << format_double(r.delta_e_ev[k]);
        }
        for (std::size_t k = 0; k < max_f; ++k) {
            out << ",";
            if (k < r.fidelities.size()) out << format_double(r.fidelities[k]);
        }
        out << "\n";
    }
}

std::pair<double, std::vector<MethodEnergies>> parse_method_energies(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const double e_hf = j.at("e_hf").get<double>();
    std::vector<MethodEnergies> methods;
    for (const auto& item : j.at("methods")) {
        MethodEnergies m;
        m.label = item.at("label").get<std::string>();
        m.state_energies = item.at("energies").get<std::vector<double>>();
        if (item.contains("fidelities")) {
            m.fidelities = item["fidelities"].get<std::vector<double>>();
        }
        if (item.contains("s_squared")) {
            m.s_squared = item["s_squared"].get<std::vector<double>>();
        }
        methods.push_back(std::move(m));
    }
    return {e_hf, methods};
}

}  // namespace teqsci
