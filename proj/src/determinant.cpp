#include "teqsci/determinant.hpp"

#include "teqsci/common.hpp"

namespace teqsci {

std::string Determinant::to_string() const {
    std::string s(static_cast<std::size_t>(n_spin_orbitals), '0');
    for (int q = 0; q < n_spin_orbitals; ++q) {
        if (occupied(q)) s[static_cast<std::size_t>(q)] = '1';
    }
    return s;
}

Determinant Determinant::from_string(const std::string& s) {
    require(s.size() <= 64, "determinant string too long");
    Determinant d(0, static_cast<int>(s.size()));
    for (std::size_t q = 0; q < s.size(); ++q) {
        if (s[q] == '1') {
            d.bits |= 1ULL << q;
        } else {
            require(s[q] == '0', "determinant string must be 0/1");
        }
    }
    return d;
}

std::size_t state_index(const Determinant& d) {
    std::size_t index = 0;
    for (int q = 0; q < d.n_spin_orbitals; ++q) {
        if (d.occupied(q)) index |= 1ULL << (d.n_spin_orbitals - 1 - q);
    }
    return index;
}

Determinant determinant_from_index(std::size_t index, int n_spin_orbitals) {
    Determinant d(0, n_spin_orbitals);
    for (int q = 0; q < n_spin_orbitals; ++q) {
        if ((index >> (n_spin_orbitals - 1 - q)) & 1ULL) d.bits |= 1ULL << q;
    }
    return d;
}

int apply_annihilate(std::uint64_t& bits, int q) {
    const std::uint64_t mask = 1ULL << q;
    if (!(bits & mask)) return 0;
    const int parity = std::popcount(bits & (mask - 1)) & 1;
    bits &= ~mask;
    return parity ? -1 : 1;
}

int apply_create(std::uint64_t& bits, int q) {
    const std::uint64_t mask = 1ULL << q;
    if (bits & mask) return 0;
    const int parity = std::popcount(bits & (mask - 1)) & 1;
    bits |= mask;
    return parity ? -1 : 1;
}

std::vector<int> occupied_list(const Determinant& d) {
    std::vector<int> occ;
    occ.reserve(static_cast<std::size_t>(d.n_electrons()));
    std::uint64_t b = d.bits;
    while (b) {
        occ.push_back(std::countr_zero(b));
        b &= b - 1;
    }
    return occ;
}

}  // namespace teqsci
