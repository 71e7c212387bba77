#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "teqsci/determinant.hpp"
#include "teqsci/statevector.hpp"

namespace teqsci {

// Where a configuration came from; a member may carry several tags.
enum ProvenanceTag : std::uint8_t {
    kBaseline = 1,
    kSampled = 2,
    kSpinAugmented = 4,
};

// Ordered, duplicate-free determinant set with provenance tags.
// Insertion order is deterministic given input order.
class ConfigurationSet {
  public:
    ConfigurationSet() = default;
    explicit ConfigurationSet(int n_spin_orbitals) : n_spin_orbitals_(n_spin_orbitals) {}

    int n_spin_orbitals() const { return n_spin_orbitals_; }
    std::size_t size() const { return members_.size(); }
    const std::vector<Determinant>& members() const { return members_; }
    std::uint8_t tags(std::size_t i) const { return tags_[i]; }

    // Returns true when the determinant is new; always ORs the tag in.
    bool insert(const Determinant& d, std::uint8_t tag);
    bool contains(const Determinant& d) const;
    std::optional<std::size_t> index_of(const Determinant& d) const;

    std::size_t count_with_tag(std::uint8_t tag) const;

    std::string to_json() const;
    static ConfigurationSet from_json(const std::string& text);

  private:
    int n_spin_orbitals_ = 0;
    std::vector<Determinant> members_;
    std::vector<std::uint8_t> tags_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

struct PostselectResult {
    std::vector<std::pair<Determinant, int>> kept;  // batch order, counts preserved
    long long rejected_count = 0;
};

// Keeps exactly the outcomes with n_electrons occupation and Sz = ms2/2.
PostselectResult postselect(const ShotBatch& batch, int n_electrons, int ms2);

// All determinants sharing d's spatial occupation pattern and Sz: every
// Sz-preserving reassignment of spin among the singly occupied orbitals,
// d itself included. Sorted by bitstring.
std::vector<Determinant> spin_augment(const Determinant& d);

// Union of baseline, kept determinants and their spin augmentations.
// Member order: baseline first, then first appearance (each sampled
// determinant immediately followed by its new augmentations).
ConfigurationSet merge(const std::vector<PostselectResult>& batches,
                       const ConfigurationSet& baseline);

// Per-configuration measured probability per dt column, x-axis sorted by
// descending weight in a reference eigenvector. Probabilities are counts
// over all shots of that dt group, so columns sum to the post-selection
// survival fraction.
struct HistogramTable {
    std::vector<double> dt_values;
    struct Row {
        Determinant config;
        double reference_weight = 0.0;
        bool is_baseline = false;
        std::vector<double> probability;  // one per dt value
    };
    std::vector<Row> rows;
};

HistogramTable histogram(const std::vector<ShotBatch>& batches,
                         const ConfigurationSet& baseline,
                         const std::unordered_map<std::uint64_t, double>& reference_weight,
                         int n_electrons, int ms2);

// CSV: config_bits, reference_weight, is_baseline, p_dt_<value>...
void write_histogram_csv(const HistogramTable& table, std::ostream& out);

}  // namespace teqsci
