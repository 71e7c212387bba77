#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace teqsci {

// Occupation bitstring over 2M spin orbitals.
//
// Spin-orbital layout is blocked by spatial orbital: qubit 2p is orbital p
// alpha, qubit 2p+1 is orbital p beta. Bit value 1 means occupied (|1>).
// Text rendering puts qubit 0 leftmost.
struct Determinant {
    std::uint64_t bits = 0;
    int n_spin_orbitals = 0;

    Determinant() = default;
    Determinant(std::uint64_t b, int n) : bits(b), n_spin_orbitals(n) {}

    bool occupied(int q) const { return (bits >> q) & 1ULL; }
    int n_electrons() const { return std::popcount(bits); }

    int n_alpha() const { return std::popcount(bits & alpha_mask(n_spin_orbitals)); }
    int n_beta() const { return std::popcount(bits & beta_mask(n_spin_orbitals)); }

    // Twice the spin projection, n_alpha - n_beta.
    int sz2() const { return n_alpha() - n_beta(); }

    std::string to_string() const;
    static Determinant from_string(const std::string& s);

    static std::uint64_t alpha_mask(int n) {
        return 0x5555555555555555ULL & low_bits(n);
    }
    static std::uint64_t beta_mask(int n) {
        return 0xAAAAAAAAAAAAAAAAULL & low_bits(n);
    }
    static std::uint64_t low_bits(int n) {
        return n >= 64 ? ~0ULL : (1ULL << n) - 1ULL;
    }

    friend auto operator<=>(const Determinant&, const Determinant&) = default;
};

// Index of the basis state in a 2^n statevector. Qubit 0 maps to the most
// significant index bit, so index order equals lexicographic bitstring order.
std::size_t state_index(const Determinant& d);
Determinant determinant_from_index(std::size_t index, int n_spin_orbitals);

// Fermionic ladder operations with Jordan-Wigner parity. Both return the
// sign (+1/-1) and update bits in place, or return 0 and leave bits alone
// when the operator annihilates the state.
int apply_annihilate(std::uint64_t& bits, int q);
int apply_create(std::uint64_t& bits, int q);

// Occupied spin-orbital indices, ascending.
std::vector<int> occupied_list(const Determinant& d);

}  // namespace teqsci
