#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "teqsci/determinant.hpp"
#include "teqsci/integrals.hpp"

namespace teqsci {

// Brute-force reference solver: full CASCI in the determinant basis.
// Everything here is the verification side of the dual-route checks and
// deliberately avoids the qubit (Jordan-Wigner) code path.

struct CasciSolution {
    int n_electrons = 0;
    int ms2 = 0;
    std::vector<Determinant> basis;   // alpha-major enumeration order
    std::vector<double> eigenvalues;  // ascending, n_roots of them
    Eigen::MatrixXd eigenvectors;     // basis.size() x n_roots
};

// All determinants of the (n_electrons, ms2) sector over n_orbitals spatial
// orbitals, ordered by (alpha mask, beta mask) ascending.
std::vector<Determinant> sector_basis(int n_orbitals, int n_electrons, int ms2);

// <x|H|y> by the Slater-Condon rules: zero beyond double excitations,
// e_core on the diagonal, fermionic parity from the blocked spin-orbital
// order. Orbitals are real, so the element is real.
double slater_condon(const IntegralTable& table, const Determinant& x, const Determinant& y);

// Lowest n_roots exact eigenpairs of the sector Hamiltonian. Dense
// diagonalization up to dimension 4096, Davidson above. Sector dimension
// is capped at 10^6.
CasciSolution casci(const IntegralTable& table, int n_roots);

// Aufbau determinant: doubly fill the lowest orbitals, remaining alpha
// electrons in the next ones.
Determinant hf_determinant(int n_orbitals, int n_electrons, int ms2);
double hf_energy(const IntegralTable& table);

// Squared overlap |sum_x a_x * b_x|^2 over the common support of two
// states given on possibly different configuration sets.
double fidelity(std::span<const Determinant> a_configs, std::span<const double> a_coeffs,
                std::span<const Determinant> b_configs, std::span<const double> b_coeffs);

// <S^2> of a normalized state over a configuration set.
double s_squared(std::span<const Determinant> configs, std::span<const double> coeffs);

}  // namespace teqsci
