#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "teqsci/integrals.hpp"

namespace teqsci {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

// Tensor product of single-qubit Paulis, stored as X/Z bit masks
// (Y = both bits set). Qubit q lives at bit q of the masks.
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(int n_qubits);
    static PauliString from_letters(const std::string& letters);

    int n_qubits() const { return n_; }
    Pauli at(int q) const;
    void set(int q, Pauli p);

    // Number of non-identity letters.
    int weight() const;
    bool is_identity() const { return x_ == 0 && z_ == 0; }

    std::uint64_t x_mask() const { return x_; }
    std::uint64_t z_mask() const { return z_; }
    std::uint64_t y_mask() const { return x_ & z_; }

    std::string letters() const;

    bool operator==(const PauliString& o) const {
        return n_ == o.n_ && x_ == o.x_ && z_ == o.z_;
    }
    // Lexicographic on letters with I < X < Y < Z, qubit 0 first.
    bool operator<(const PauliString& o) const;

  private:
    std::uint64_t x_ = 0;
    std::uint64_t z_ = 0;
    int n_ = 0;
};

// Product a*b: resulting string plus the accumulated phase (a power of i).
std::pair<std::complex<double>, PauliString> multiply(const PauliString& a, const PauliString& b);

// Weighted collection of Pauli strings. Canonical form: terms merged by
// string, sorted lexicographically, |coefficient| <= prune dropped.
class PauliSum {
  public:
    using Term = std::pair<std::complex<double>, PauliString>;

    explicit PauliSum(int n_qubits = 0) : n_(n_qubits) {}

    int n_qubits() const { return n_; }
    std::size_t size() const { return terms_.size(); }
    const std::vector<Term>& terms() const { return terms_; }

    void add(std::complex<double> coeff, const PauliString& s);
    void add(const PauliSum& other);
    void scale(std::complex<double> factor);

    PauliSum canonicalized(double prune = 1e-12) const;

    // Max |imaginary part| over canonical coefficients is below tol.
    bool is_hermitian(double tol = 1e-12) const;

    // Coefficient of a string in the canonical form (0 if absent).
    std::complex<double> coefficient(const PauliString& s) const;

    std::string to_json() const;

  private:
    int n_;
    std::vector<Term> terms_;
};

PauliSum operator*(const PauliSum& a, const PauliSum& b);

// Jordan-Wigner image of the second-quantized Hamiltonian of `table` on
// 2M qubits (blocked spin-orbital order). Hermitian; reproduces
// Slater-Condon matrix elements in the occupation basis, with e_core on
// the identity term.
PauliSum jordan_wigner(const IntegralTable& table);

// JW images of single ladder operators, mostly for tests.
PauliSum jw_annihilation(int q, int n_qubits);
PauliSum jw_creation(int q, int n_qubits);

// Canonicalized a - b; requires equal qubit counts.
PauliSum subtract(const PauliSum& a, const PauliSum& b);

// Places a small-register operator into a larger register: letter on small
// qubit q moves to placement[q], identity elsewhere. Placement must be
// injective and in range.
PauliSum embed_operator(const PauliSum& op, const std::vector<int>& placement, int n_total);

}  // namespace teqsci
