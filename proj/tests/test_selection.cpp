#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "teqsci/selection.hpp"
#include "test_helpers.hpp"

using namespace teqsci;

namespace {

ShotBatch batch_of(std::vector<std::pair<std::string, int>> outcomes, double dt = 0.5,
                   int j = 0) {
    ShotBatch b;
    b.dt = dt;
    b.state_index = j;
    for (const auto& [bits, count] : outcomes) {
        b.outcomes.push_back({Determinant::from_string(bits), count});
        b.n_shots += count;
    }
    return b;
}

}  // namespace

TEST_CASE("postselection filters particle number and Sz") {
    const ShotBatch batch = batch_of({{"1100", 5}, {"1010", 3}, {"1000", 2}});
    const PostselectResult r = postselect(batch, 2, 0);
    REQUIRE(r.kept.size() == 1);
    CHECK(r.kept[0].first.to_string() == "1100");
    CHECK(r.kept[0].second == 5);
    CHECK(r.rejected_count == 5);
}

TEST_CASE("postselection of an empty batch") {
    ShotBatch empty;
    const PostselectResult r = postselect(empty, 2, 0);
    CHECK(r.kept.empty());
    CHECK(r.rejected_count == 0);
}

TEST_CASE("postselection filter is exhaustive over small registers") {
    // Every 6-bit outcome, each with one shot.
    ShotBatch all;
    for (std::uint64_t bits = 0; bits < 64; ++bits) {
        all.outcomes.push_back({Determinant(bits, 6), 1});
        all.n_shots += 1;
    }
    for (const int n : {1, 2, 3}) {
        for (const int ms2 : {-1, 0, 1, 2}) {
            const PostselectResult r = postselect(all, n, ms2);
            long long kept = 0;
            for (const auto& [d, c] : r.kept) {
                CHECK(d.n_electrons() == n);
                CHECK(d.sz2() == ms2);
                kept += c;
            }
            long long expected = 0;
            for (std::uint64_t bits = 0; bits < 64; ++bits) {
                const Determinant d(bits, 6);
                expected += (d.n_electrons() == n && d.sz2() == ms2) ? 1 : 0;
            }
            CHECK(kept == expected);
            CHECK(kept + r.rejected_count == 64);
        }
    }
}

TEST_CASE("spin augmentation examples") {
    // Closed shell: nothing to reassign.
    const auto closed = spin_augment(Determinant::from_string("110011"));
    REQUIRE(closed.size() == 1);
    CHECK(closed[0].to_string() == "110011");

    // Two singly occupied orbitals at Sz = 0: up-down and down-up,
    // ordered by bitstring value.
    const auto pair = spin_augment(Determinant::from_string("1001"));
    REQUIRE(pair.size() == 2);
    CHECK(pair[0].to_string() == "0110");
    CHECK(pair[1].to_string() == "1001");

    // Four singly occupied orbitals at Sz = 0: C(4,2) = 6 assignments.
    const auto quad = spin_augment(Determinant::from_string("10100101"));
    CHECK(quad.size() == 6);
    for (const auto& d : quad) {
        CHECK(d.n_electrons() == 4);
        CHECK(d.sz2() == 0);
    }

    // Sz = +1 halves the choices: three singles with two alphas.
    const auto polarized = spin_augment(Determinant::from_string("101001"));
    CHECK(polarized.size() == 3);
}

TEST_CASE("spin augmentation is closed and idempotent") {
    for (std::uint64_t bits = 0; bits < (1ULL << 8); ++bits) {
        const Determinant d(bits, 8);
        const auto aug = spin_augment(d);
        CHECK(std::find(aug.begin(), aug.end(), d) != aug.end());

        auto spatial = [](const Determinant& x) {
            std::vector<int> occ;
            for (int p = 0; p < x.n_spin_orbitals / 2; ++p) {
                occ.push_back((x.occupied(2 * p) ? 1 : 0) + (x.occupied(2 * p + 1) ? 1 : 0));
            }
            return occ;
        };
        std::set<std::uint64_t> once;
        for (const auto& a : aug) {
            CHECK(a.sz2() == d.sz2());
            CHECK(spatial(a) == spatial(d));
            once.insert(a.bits);
            // Idempotence: augmenting any member reproduces the same set.
            const auto twice = spin_augment(a);
            CHECK(twice.size() == aug.size());
            for (std::size_t i = 0; i < twice.size(); ++i) CHECK(twice[i] == aug[i]);
        }
        CHECK(once.size() == aug.size());
    }
}

TEST_CASE("merge identities") {
    ConfigurationSet baseline(4);
    baseline.insert(Determinant::from_string("1100"), kBaseline);
    baseline.insert(Determinant::from_string("0011"), kBaseline);

    SUBCASE("no batches") {
        const ConfigurationSet merged = merge({}, baseline);
        CHECK(merged.size() == 2);
        CHECK(merged.to_json() == baseline.to_json());
    }
    SUBCASE("batches inside the baseline only update provenance") {
        const ShotBatch b = batch_of({{"1100", 3}});
        const ConfigurationSet merged = merge({postselect(b, 2, 0)}, baseline);
        REQUIRE(merged.size() == 2);
        CHECK(merged.members()[0].to_string() == "1100");
        CHECK((merged.tags(0) & kBaseline) != 0);
        CHECK((merged.tags(0) & kSampled) != 0);
        CHECK(merged.members()[1].to_string() == "0011");
    }
    SUBCASE("new samples bring their spin complements") {
        const ShotBatch b = batch_of({{"1001", 2}});
        const ConfigurationSet merged = merge({postselect(b, 2, 0)}, baseline);
        REQUIRE(merged.size() == 4);
        CHECK(merged.members()[2].to_string() == "1001");
        CHECK(merged.tags(2) == kSampled);
        CHECK(merged.members()[3].to_string() == "0110");
        CHECK(merged.tags(3) == kSpinAugmented);
    }
}

TEST_CASE("merge is monotone and deterministic") {
    SplitMix64 rng(77);
    ConfigurationSet baseline(8);
    const auto basis = [] {
        std::vector<Determinant> out;
        for (std::uint64_t bits = 0; bits < (1ULL << 8); ++bits) {
            const Determinant d(bits, 8);
            if (d.n_electrons() == 4 && d.sz2() == 0) out.push_back(d);
        }
        return out;
    }();
    for (int i = 0; i < 6; ++i) baseline.insert(basis[i], kBaseline);

    std::vector<PostselectResult> batches;
    std::size_t previous_size = baseline.size();
    for (int round = 0; round < 8; ++round) {
        ShotBatch b;
        b.dt = 1.0;
        for (int k = 0; k < 5; ++k) {
            b.outcomes.push_back({basis[rng.next() % basis.size()], 1 + static_cast<int>(rng.next() % 4)});
            b.n_shots += b.outcomes.back().second;
        }
        batches.push_back(postselect(b, 4, 0));
        const ConfigurationSet merged = merge(batches, baseline);
        CHECK(merged.size() >= previous_size);
        previous_size = merged.size();

        // Every member satisfies the sector constraints (re-asserted).
        for (const auto& d : merged.members()) {
            CHECK(d.n_electrons() == 4);
            CHECK(d.sz2() == 0);
        }

        // Bit-identical serialization on repeated merges of the same input.
        CHECK(merge(batches, baseline).to_json() == merged.to_json());
    }

    // Independent recount: union of baseline, kept and augmentations.
    const ConfigurationSet merged = merge(batches, baseline);
    std::set<std::uint64_t> expected;
    for (const auto& d : baseline.members()) expected.insert(d.bits);
    for (const auto& batch : batches) {
        for (const auto& [d, c] : batch.kept) {
            expected.insert(d.bits);
            for (const auto& a : spin_augment(d)) expected.insert(a.bits);
        }
    }
    CHECK(merged.size() == expected.size());
}

TEST_CASE("configuration set json round-trip") {
    ConfigurationSet set(4);
    set.insert(Determinant::from_string("1100"), kBaseline);
    set.insert(Determinant::from_string("1001"), kSampled);
    set.insert(Determinant::from_string("0110"), static_cast<std::uint8_t>(kSampled | kSpinAugmented));
    const ConfigurationSet back = ConfigurationSet::from_json(set.to_json());
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.members()[i] == set.members()[i]);
        CHECK(back.tags(i) == set.tags(i));
    }
}

TEST_CASE("histogram accounting") {
    ConfigurationSet baseline(4);
    baseline.insert(Determinant::from_string("1100"), kBaseline);

    SUBCASE("single deterministic outcome") {
        const std::vector<ShotBatch> batches{batch_of({{"1100", 10}}, 0.001)};
        const HistogramTable t = histogram(batches, baseline, {}, 2, 0);
        REQUIRE(t.rows.size() == 1);
        CHECK(t.rows[0].probability[0] == doctest::Approx(1.0));
        CHECK(t.rows[0].is_baseline);
    }

    SUBCASE("columns sum to the survival fraction") {
        const std::vector<ShotBatch> batches{
            batch_of({{"1100", 4}, {"1001", 3}, {"1000", 3}}, 0.001, 0),
            batch_of({{"0110", 5}, {"0011", 3}, {"1110", 2}}, 2.5, 0),
            batch_of({{"1100", 6}, {"0101", 4}}, 2.5, 1),
        };
        const HistogramTable t = histogram(batches, baseline, {}, 2, 0);
        REQUIRE(t.dt_values.size() == 2);
        // dt = 0.001: 7 of 10 survive; dt = 2.5: 18 of 20 survive.
        double col0 = 0.0, col1 = 0.0;
        for (const auto& row : t.rows) {
            col0 += row.probability[0];
            col1 += row.probability[1];
        }
        CHECK(col0 == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(col1 == doctest::Approx(0.9).epsilon(1e-12));
    }

    SUBCASE("rows ordered by reference weight") {
        std::unordered_map<std::uint64_t, double> weights;
        weights[Determinant::from_string("1001").bits] = 0.7;
        weights[Determinant::from_string("1100").bits] = 0.2;
        const std::vector<ShotBatch> batches{batch_of({{"1001", 5}, {"1100", 5}}, 1.0)};
        const HistogramTable t = histogram(batches, baseline, weights, 2, 0);
        REQUIRE(t.rows.size() == 2);
        CHECK(t.rows[0].config.to_string() == "1001");
        CHECK(!t.rows[0].is_baseline);
        CHECK(t.rows[1].config.to_string() == "1100");
        CHECK(t.rows[1].is_baseline);

        std::ostringstream csv;
        write_histogram_csv(t, csv);
        CHECK(csv.str().find("config_bits,reference_weight,is_baseline,p_dt_1") == 0);
    }
}
