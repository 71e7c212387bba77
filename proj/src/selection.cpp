#include "teqsci/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "teqsci/common.hpp"

namespace teqsci {

bool ConfigurationSet::insert(const Determinant& d, std::uint8_t tag) {
    if (n_spin_orbitals_ == 0) n_spin_orbitals_ = d.n_spin_orbitals;
    require(d.n_spin_orbitals == n_spin_orbitals_, "register width mismatch");
    const auto it = index_.find(d.bits);
    if (it != index_.end()) {
        tags_[it->second] |= tag;
        return false;
    }
    index_[d.bits] = members_.size();
    members_.push_back(d);
    tags_.push_back(tag);
    return true;
}

bool ConfigurationSet::contains(const Determinant& d) const {
    return index_.count(d.bits) != 0;
}

std::optional<std::size_t> ConfigurationSet::index_of(const Determinant& d) const {
    const auto it = index_.find(d.bits);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t ConfigurationSet::count_with_tag(std::uint8_t tag) const {
    std::size_t n = 0;
    for (const auto t : tags_) n += (t & tag) ? 1 : 0;
    return n;
}

std::string ConfigurationSet::to_json() const {
    std::ostringstream out;
    out << "{\"n_spin_orbitals\":" << n_spin_orbitals_ << ",\"members\":[";
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (i) out << ",";
        out << "{\"bits\":\"" << members_[i].to_string() << "\",\"tags\":[";
        bool first = true;
        auto emit = [&](std::uint8_t flag, const char* name) {
            if (tags_[i] & flag) {
                if (!first) out << ",";
                out << "\"" << name << "\"";
                first = false;
            }
        };
        emit(kBaseline, "baseline");
        emit(kSampled, "sampled");
        emit(kSpinAugmented, "spin-augmented");
        out << "]}";
    }
    out << "]}";
    return out.str();
}

ConfigurationSet ConfigurationSet::from_json(const std::string& text) {
    // Minimal parser for the writer's own output.
    ConfigurationSet set;
    std::size_t pos = 0;
    auto find_key = [&](const char* key) {
        pos = text.find(key, pos);
        return pos != std::string::npos;
    };
    if (!find_key("\"members\"")) {
        require(false, "configuration JSON missing members");
    }
    std::size_t scan = pos;
    while ((scan = text.find("\"bits\":\"", scan)) != std::string::npos) {
        scan += 8;
        const auto end = text.find('"', scan);
        require(end != std::string::npos, "unterminated bits string");
        const Determinant d = Determinant::from_string(text.substr(scan, end - scan));
        std::uint8_t tag = 0;
        const auto tags_start = text.find('[', end);
        const auto tags_end = text.find(']', end);
        require(tags_start != std::string::npos && tags_end != std::string::npos,
                "malformed tags array");
        const std::string tags = text.substr(tags_start, tags_end - tags_start);
        if (tags.find("baseline") != std::string::npos) tag |= kBaseline;
        if (tags.find("sampled") != std::string::npos) tag |= kSampled;
        if (tags.find("spin-augmented") != std::string::npos) tag |= kSpinAugmented;
        set.insert(d, tag);
        scan = tags_end;
    }
    return set;
}

PostselectResult postselect(const ShotBatch& batch, int n_electrons, int ms2) {
    PostselectResult out;
    for (const auto& [d, count] : batch.outcomes) {
        if (d.n_electrons() == n_electrons && d.sz2() == ms2) {
            out.kept.push_back({d, count});
        } else {
            out.rejected_count += count;
        }
    }
    return out;
}

std::vector<Determinant> spin_augment(const Determinant& d) {
    const int m = d.n_spin_orbitals / 2;
    std::vector<int> singly;
    std::uint64_t fixed = 0;  // doubly occupied pairs stay put
    for (int p = 0; p < m; ++p) {
        const bool a = d.occupied(2 * p);
        const bool b = d.occupied(2 * p + 1);
        if (a && b) fixed |= 3ULL << (2 * p);
        else if (a || b) singly.push_back(p);
    }
    const int k = static_cast<int>(singly.size());
    int n_alpha_single = 0;
    for (int p : singly) n_alpha_single += d.occupied(2 * p) ? 1 : 0;

    // Choose which singly occupied orbitals carry alpha; Sz is preserved.
    std::vector<Determinant> out;
    for (std::uint32_t choice = 0; choice < (1U << k); ++choice) {
        if (std::popcount(choice) != n_alpha_single) continue;
        Determinant nd(fixed, d.n_spin_orbitals);
        for (int t = 0; t < k; ++t) {
            const int p = singly[static_cast<std::size_t>(t)];
            nd.bits |= ((choice >> t) & 1U) ? (1ULL << (2 * p)) : (1ULL << (2 * p + 1));
        }
        out.push_back(nd);
    }
    std::sort(out.begin(), out.end(),
              [](const Determinant& a, const Determinant& b) { return a.bits < b.bits; });
    return out;
}

ConfigurationSet merge(const std::vector<PostselectResult>& batches,
                       const ConfigurationSet& baseline) {
    ConfigurationSet out(baseline.n_spin_orbitals());
    for (std::size_t i = 0; i < baseline.size(); ++i) {
        out.insert(baseline.members()[i], baseline.tags(i) | kBaseline);
    }
    for (const auto& batch : batches) {
        for (const auto& [d, count] : batch.kept) {
            out.insert(d, kSampled);
            for (const auto& aug : spin_augment(d)) {
                if (aug == d) continue;
                out.insert(aug, kSpinAugmented);
            }
        }
    }
    return out;
}

HistogramTable histogram(const std::vector<ShotBatch>& batches, const ConfigurationSet& baseline,
                         const std::unordered_map<std::uint64_t, double>& reference_weight,
                         int n_electrons, int ms2) {
    HistogramTable table;

    // dt columns in first-appearance order.
    std::vector<long long> total_shots;
    auto dt_column = [&](double dt) {
        for (std::size_t c = 0; c < table.dt_values.size(); ++c) {
            if (table.dt_values[c] == dt) return c;
        }
        table.dt_values.push_back(dt);
        total_shots.push_back(0);
        return table.dt_values.size() - 1;
    };

    std::map<std::uint64_t, std::vector<long long>> counts;
    for (const auto& batch : batches) {
        const std::size_t col = dt_column(batch.dt);
        total_shots[col] += batch.n_shots;
        const PostselectResult kept = postselect(batch, n_electrons, ms2);
        for (const auto& [d, count] : kept.kept) {
            auto& row = counts[d.bits];
            row.resize(table.dt_values.size(), 0);
            row[col] += count;
        }
    }

    const int width = baseline.n_spin_orbitals();
    auto add_row = [&](const Determinant& d) {
        HistogramTable::Row row;
        row.config = d;
        const auto wit = reference_weight.find(d.bits);
        row.reference_weight = wit == reference_weight.end() ? 0.0 : wit->second;
        row.is_baseline = baseline.contains(d);
        row.probability.assign(table.dt_values.size(), 0.0);
        const auto cit = counts.find(d.bits);
        if (cit != counts.end()) {
            for (std::size_t c = 0; c < cit->second.size(); ++c) {
                if (total_shots[c] > 0) {
                    row.probability[c] =
                        static_cast<double>(cit->second[c]) / static_cast<double>(total_shots[c]);
                }
            }
        }
        table.rows.push_back(std::move(row));
    };

    for (const auto& d : baseline.members()) add_row(d);
    for (const auto& [bits, row_counts] : counts) {
        const Determinant d(bits, width);
        if (!baseline.contains(d)) add_row(d);
    }

    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const HistogramTable::Row& a, const HistogramTable::Row& b) {
                         if (a.reference_weight != b.reference_weight) {
                             return a.reference_weight > b.reference_weight;
                         }
                         return a.config.bits < b.config.bits;
                     });
    return table;
}

void write_histogram_csv(const HistogramTable& table, std::ostream& out) {
    out << "config_bits,reference_weight,is_baseline";
    char buf[64];
    for (const double dt : table.dt_values) {
        std::snprintf(buf, sizeof(buf), ",p_dt_%g", dt);
        out << buf;
    }
    out << "\n";
    for (const auto& row : table.rows) {
        out << row.config.to_string();
        std::snprintf(buf, sizeof(buf), ",%.17g,%d", row.reference_weight,
                      row.is_baseline ? 1 : 0);
        out << buf;
        for (const double p : row.probability) {
            std::snprintf(buf, sizeof(buf), ",%.17g", p);
            out << buf;
        }
        out << "\n";
    }
}

}  // namespace teqsci
