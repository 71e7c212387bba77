#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "teqsci/integrals.hpp"
#include "teqsci/oracle.hpp"
#include "test_helpers.hpp"

using namespace teqsci;
using teqsci::test::data_path;
using teqsci::test::random_table;

TEST_CASE("parse minimal header and records") {
    const std::string text =
        "&FCI NORB=2,NELEC=2,MS2=0,\n"
        " ORBSYM=1,1,\n"
        " ISYM=1,\n"
        "&END\n"
        "-1.25 1 1 0 0\n"
        "0.71 0 0 0 0\n";
    const IntegralTable t = parse_fcidump(text);
    CHECK(t.n_orbitals() == 2);
    CHECK(t.n_electrons() == 2);
    CHECK(t.ms2() == 0);
    CHECK(t.e_core() == doctest::Approx(0.71).epsilon(1e-15));
    CHECK(t.h1(0, 0) == doctest::Approx(-1.25).epsilon(1e-15));
    CHECK(t.h1(1, 1) == 0.0);
}

TEST_CASE("h1 symmetry completion") {
    const std::string text = "&FCI NORB=2,NELEC=2,MS2=0,&END\n0.5 1 2 0 0\n0.0 0 0 0 0\n";
    const IntegralTable t = parse_fcidump(text);
    CHECK(t.h1(0, 1) == 0.5);
    CHECK(t.h1(1, 0) == 0.5);
}

TEST_CASE("h2 eightfold completion and slash terminator") {
    const std::string text = "&FCI NORB=3,NELEC=2,MS2=0\n/\n0.25 1 2 3 3\n0.0 0 0 0 0\n";
    const IntegralTable t = parse_fcidump(text);
    CHECK(t.h2(0, 1, 2, 2) == 0.25);
    CHECK(t.h2(1, 0, 2, 2) == 0.25);
    CHECK(t.h2(2, 2, 0, 1) == 0.25);
    CHECK(t.h2(2, 2, 1, 0) == 0.25);
}

TEST_CASE("fortran D exponents and orbital-energy records") {
    const std::string text =
        "&FCI NORB=2,NELEC=2,MS2=0,&END\n"
        "1.5D-01 1 1 0 0\n"
        "-0.5722 1 0 0 0\n"  // orbital energy line, ignored
        "0.0 0 0 0 0\n";
    const IntegralTable t = parse_fcidump(text);
    CHECK(t.h1(0, 0) == doctest::Approx(0.15).epsilon(1e-15));
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_fcidump(std::string("NORB=2\n")), std::invalid_argument);
    CHECK_THROWS_AS(parse_fcidump(std::string("&FCI NELEC=2,MS2=0,&END\n0.0 0 0 0 0\n")),
                    std::invalid_argument);
    // index out of range
    CHECK_THROWS_AS(parse_fcidump(std::string("&FCI NORB=2,NELEC=2,MS2=0,&END\n1.0 3 1 0 0\n")),
                    std::invalid_argument);
    // conflicting duplicates report both values
    try {
        parse_fcidump(std::string("&FCI NORB=2,NELEC=2,MS2=0,&END\n1.0 1 1 0 0\n2.0 1 1 0 0\n"));
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find('1') != std::string::npos);
        CHECK(msg.find('2') != std::string::npos);
    }
    // agreeing duplicates are fine
    CHECK_NOTHROW(
        parse_fcidump(std::string("&FCI NORB=2,NELEC=2,MS2=0,&END\n1.0 1 1 0 0\n1.0 1 1 0 0\n")));
}

TEST_CASE("write/parse round-trip is bitwise") {
    const IntegralTable t = random_table(7, 4, 4, 0);
    const std::string dump = fcidump_string(t);
    const IntegralTable u = parse_fcidump(dump);
    CHECK(u.n_orbitals() == t.n_orbitals());
    CHECK(u.n_electrons() == t.n_electrons());
    CHECK(u.ms2() == t.ms2());
    CHECK(u.e_core() == t.e_core());
    for (int p = 0; p < 4; ++p) {
        for (int q = 0; q < 4; ++q) {
            CHECK(u.h1(p, q) == t.h1(p, q));
            for (int r = 0; r < 4; ++r) {
                for (int s = 0; s < 4; ++s) CHECK(u.h2(p, q, r, s) == t.h2(p, q, r, s));
            }
        }
    }
    // ... and the serialized text itself is stable.
    CHECK(fcidump_string(u) == dump);
}

TEST_CASE("hydrogen-molecule fixture matches external FCI energy") {
    const IntegralTable t = parse_fcidump_file(data_path("h2_sto3g.fcidump"));
    std::ifstream ref_in(data_path("reference.json"));
    REQUIRE(ref_in.good());
    nlohmann::json ref;
    ref_in >> ref;
    const double expected = ref["h2_sto3g"]["fci"][0].get<double>();
    const CasciSolution sol = casci(t, 1);
    CHECK(std::abs(sol.eigenvalues[0] - expected) < 1e-8);
}

TEST_CASE("identity restriction") {
    const IntegralTable t = random_table(11, 4, 4, 0);
    ActiveSpaceSpec spec;
    spec.n_active_electrons = 4;
    spec.active_orbital_indices = {0, 1, 2, 3};
    const IntegralTable r = restrict_active_space(t, spec);
    CHECK(r.e_core() == doctest::Approx(t.e_core()).epsilon(1e-14));
    for (int p = 0; p < 4; ++p) {
        for (int q = 0; q < 4; ++q) {
            CHECK(r.h1(p, q) == doctest::Approx(t.h1(p, q)).epsilon(1e-14));
            for (int r2 = 0; r2 < 4; ++r2) {
                for (int s = 0; s < 4; ++s) {
                    CHECK(r.h2(p, q, r2, s) == doctest::Approx(t.h2(p, q, r2, s)).epsilon(1e-14));
                }
            }
        }
    }
}

TEST_CASE("frozen core with vanishing two-electron terms") {
    IntegralTable t(3, 4, 0, 0.5);
    t.set_h1(0, 0, -2.0);
    t.set_h1(1, 1, -1.0);
    t.set_h1(2, 2, -0.5);
    t.set_h1(1, 2, 0.1);
    ActiveSpaceSpec spec;
    spec.n_active_electrons = 2;
    spec.active_orbital_indices = {1, 2};
    const IntegralTable r = restrict_active_space(t, spec);
    CHECK(r.e_core() == doctest::Approx(0.5 + 2.0 * (-2.0)).epsilon(1e-14));
    CHECK(r.h1(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(r.h1(1, 1) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(r.h1(0, 1) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("active-space restriction against projected diagonalization") {
    // Freeze orbital 0 of the 4-orbital chain fixture; CASCI(2,2) of the
    // restricted table must match the parent Hamiltonian projected onto
    // determinants with orbital 0 doubly occupied and orbital 3 empty.
    const IntegralTable parent = parse_fcidump_file(data_path("h4_chain.fcidump"));
    ActiveSpaceSpec spec;
    spec.n_active_electrons = 2;
    spec.active_orbital_indices = {1, 2};
    const IntegralTable sub = restrict_active_space(parent, spec);
    const CasciSolution small = casci(sub, 2);

    std::vector<Determinant> projected;
    for (const auto& d : sector_basis(parent.n_orbitals(), parent.n_electrons(), parent.ms2())) {
        if (d.occupied(0) && d.occupied(1) && !d.occupied(6) && !d.occupied(7)) {
            projected.push_back(d);
        }
    }
    REQUIRE(projected.size() == 4);
    Eigen::MatrixXd h(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            h(i, j) = slater_condon(parent, projected[static_cast<std::size_t>(i)],
                                    projected[static_cast<std::size_t>(j)]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    CHECK(std::abs(small.eigenvalues[0] - es.eigenvalues()[0]) < 1e-10);
    CHECK(std::abs(small.eigenvalues[1] - es.eigenvalues()[1]) < 1e-10);
}

TEST_CASE("restriction preserves symmetry invariants") {
    const IntegralTable t = random_table(23, 5, 6, 0);
    ActiveSpaceSpec spec;
    spec.n_active_electrons = 4;
    spec.active_orbital_indices = {1, 2, 4};
    const IntegralTable r = restrict_active_space(t, spec);
    CHECK_NOTHROW(r.validate(1e-12));
}

TEST_CASE("restriction error paths") {
    const IntegralTable t = random_table(3, 4, 4, 0);
    ActiveSpaceSpec odd;  // removing an odd electron count
    odd.n_active_electrons = 3;
    odd.active_orbital_indices = {2, 3};
    CHECK_THROWS_AS(restrict_active_space(t, odd), std::invalid_argument);

    ActiveSpaceSpec too_many;
    too_many.n_active_electrons = 6;
    too_many.active_orbital_indices = {2, 3};
    CHECK_THROWS_AS(restrict_active_space(t, too_many), std::invalid_argument);

    ActiveSpaceSpec bad_order;
    bad_order.n_active_electrons = 2;
    bad_order.active_orbital_indices = {3, 2};
    CHECK_THROWS_AS(restrict_active_space(t, bad_order), std::invalid_argument);
}
