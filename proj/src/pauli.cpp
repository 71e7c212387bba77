#include "teqsci/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "teqsci/common.hpp"

namespace teqsci {

PauliString::PauliString(int n_qubits) : n_(n_qubits) {
    require(n_qubits >= 0 && n_qubits <= 64, "qubit count out of range");
}

PauliString PauliString::from_letters(const std::string& letters) {
    PauliString s(static_cast<int>(letters.size()));
    for (std::size_t q = 0; q < letters.size(); ++q) {
        switch (letters[q]) {
            case 'I': break;
            case 'X': s.set(static_cast<int>(q), Pauli::X); break;
            case 'Y': s.set(static_cast<int>(q), Pauli::Y); break;
            case 'Z': s.set(static_cast<int>(q), Pauli::Z); break;
            default: throw std::invalid_argument("Pauli letter must be one of IXYZ");
        }
    }
    return s;
}

Pauli PauliString::at(int q) const {
    const bool x = (x_ >> q) & 1ULL;
    const bool z = (z_ >> q) & 1ULL;
    if (x && z) return Pauli::Y;
    if (x) return Pauli::X;
    if (z) return Pauli::Z;
    return Pauli::I;
}

void PauliString::set(int q, Pauli p) {
    require(q >= 0 && q < n_, "qubit index out of range");
    const std::uint64_t mask = 1ULL << q;
    x_ &= ~mask;
    z_ &= ~mask;
    if (p == Pauli::X || p == Pauli::Y) x_ |= mask;
    if (p == Pauli::Z || p == Pauli::Y) z_ |= mask;
}

int PauliString::weight() const { return std::popcount(x_ | z_); }

std::string PauliString::letters() const {
    static constexpr char kLetter[4] = {'I', 'X', 'Y', 'Z'};
    std::string s(static_cast<std::size_t>(n_), 'I');
    for (int q = 0; q < n_; ++q) s[static_cast<std::size_t>(q)] = kLetter[static_cast<int>(at(q))];
    return s;
}

bool PauliString::operator<(const PauliString& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    for (int q = 0; q < n_; ++q) {
        const auto a = static_cast<int>(at(q));
        const auto b = static_cast<int>(o.at(q));
        if (a != b) return a < b;
    }
    return false;
}

std::pair<std::complex<double>, PauliString> multiply(const PauliString& a, const PauliString& b) {
    require(a.n_qubits() == b.n_qubits(), "Pauli string qubit counts differ");
    // sigma_a sigma_b = i^k sigma_c per qubit; k accumulated mod 4.
    // Rows: a in {I,X,Y,Z}, cols: b.
    static constexpr int kPhase[4][4] = {
        {0, 0, 0, 0},
        {0, 0, 1, 3},
        {0, 3, 0, 1},
        {0, 1, 3, 0},
    };
    int k = 0;
    for (int q = 0; q < a.n_qubits(); ++q) {
        const int la = static_cast<int>(a.at(q));
        const int lb = static_cast<int>(b.at(q));
        k = (k + kPhase[la][lb]) % 4;
    }
    // Resulting letters are the XOR of the symplectic masks.
    PauliString c(a.n_qubits());
    const std::uint64_t xm = a.x_mask() ^ b.x_mask();
    const std::uint64_t zm = a.z_mask() ^ b.z_mask();
    for (int q = 0; q < a.n_qubits(); ++q) {
        const bool x = (xm >> q) & 1ULL;
        const bool z = (zm >> q) & 1ULL;
        c.set(q, x && z ? Pauli::Y : x ? Pauli::X : z ? Pauli::Z : Pauli::I);
    }
    static constexpr std::complex<double> kI(0.0, 1.0);
    std::complex<double> phase = 1.0;
    for (int i = 0; i < k; ++i) phase *= kI;
    return {phase, c};
}

void PauliSum::add(std::complex<double> coeff, const PauliString& s) {
    require(s.n_qubits() == n_, "term qubit count does not match sum");
    terms_.push_back({coeff, s});
}

void PauliSum::add(const PauliSum& other) {
    require(other.n_ == n_, "qubit-count mismatch");
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
}

void PauliSum::scale(std::complex<double> factor) {
    for (auto& [c, s] : terms_) c *= factor;
}

PauliSum PauliSum::canonicalized(double prune) const {
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::complex<double>> acc;
    for (const auto& [c, s] : terms_) acc[{s.x_mask(), s.z_mask()}] += c;

    PauliSum out(n_);
    std::vector<Term> collected;
    collected.reserve(acc.size());
    for (const auto& [key, c] : acc) {
        if (std::abs(c) < prune) continue;
        PauliString s(n_);
        for (int q = 0; q < n_; ++q) {
            const bool x = (key.first >> q) & 1ULL;
            const bool z = (key.second >> q) & 1ULL;
            s.set(q, x && z ? Pauli::Y : x ? Pauli::X : z ? Pauli::Z : Pauli::I);
        }
        collected.push_back({c, s});
    }
    std::sort(collected.begin(), collected.end(),
              [](const Term& a, const Term& b) { return a.second < b.second; });
    out.terms_ = std::move(collected);
    return out;
}

bool PauliSum::is_hermitian(double tol) const {
    for (const auto& [c, s] : canonicalized(0.0).terms()) {
        if (std::abs(c.imag()) > tol) return false;
    }
    return true;
}

std::complex<double> PauliSum::coefficient(const PauliString& s) const {
    std::complex<double> c = 0.0;
    for (const auto& [coeff, str] : terms_) {
        if (str == s) c += coeff;
    }
    return c;
}

std::string PauliSum::to_json() const {
    std::ostringstream out;
    out << "[";
    bool first = true;
    char buf[96];
    for (const auto& [c, s] : terms_) {
        if (!first) out << ",";
        first = false;
        std::snprintf(buf, sizeof(buf), "{\"re\":%.17g,\"im\":%.17g,\"letters\":\"", c.real(),
                      c.imag());
        out << buf << s.letters() << "\"}";
    }
    out << "]";
    return out.str();
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
    require(a.n_qubits() == b.n_qubits(), "qubit-count mismatch");
    PauliSum out(a.n_qubits());
    for (const auto& [ca, sa] : a.terms()) {
        for (const auto& [cb, sb] : b.terms()) {
            auto [phase, sc] = multiply(sa, sb);
            out.add(ca * cb * phase, sc);
        }
    }
    return out;
}

PauliSum jw_annihilation(int q, int n_qubits) {
    // a_q = (prod_{k<q} Z_k) (X_q + i Y_q)/2, with |1> = occupied.
    PauliSum out(n_qubits);
    PauliString x(n_qubits), y(n_qubits);
    for (int k = 0; k < q; ++k) {
        x.set(k, Pauli::Z);
        y.set(k, Pauli::Z);
    }
    x.set(q, Pauli::X);
    y.set(q, Pauli::Y);
    out.add(0.5, x);
    out.add(std::complex<double>(0.0, 0.5), y);
    return out;
}

PauliSum jw_creation(int q, int n_qubits) {
    PauliSum out(n_qubits);
    PauliString x(n_qubits), y(n_qubits);
    for (int k = 0; k < q; ++k) {
        x.set(k, Pauli::Z);
        y.set(k, Pauli::Z);
    }
    x.set(q, Pauli::X);
    y.set(q, Pauli::Y);
    out.add(0.5, x);
    out.add(std::complex<double>(0.0, -0.5), y);
    return out;
}

PauliSum jordan_wigner(const IntegralTable& table) {
    const int m = table.n_orbitals();
    const int n = 2 * m;
    require(n <= kMaxQubits || n <= 64, "register too large");

    // Cache ladder images per spin orbital.
    std::vector<PauliSum> ann, cre;
    ann.reserve(static_cast<std::size_t>(n));
    cre.reserve(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
        ann.push_back(jw_annihilation(q, n));
        cre.push_back(jw_creation(q, n));
    }

    PauliSum total(n);
    total.add(table.e_core(), PauliString(n));

    // One-electron part: sum_pq,s h1[p][q] a+_{ps} a_{qs}.
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            const double v = table.h1(p, q);
            if (v == 0.0) continue;
            for (int spin = 0; spin < 2; ++spin) {
                PauliSum term = cre[2 * p + spin] * ann[2 * q + spin];
                term.scale(v);
                total.add(term);
            }
        }
    }

    // Two-electron part, chemists' (pq|rs):
    // 1/2 sum_pqrs (pq|rs) sum_{s,t} a+_{ps} a+_{rt} a_{st} a_{qs}.
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            for (int r = 0; r < m; ++r) {
                for (int s = 0; s < m; ++s) {
                    const double v = table.h2(p, q, r, s);
                    if (v == 0.0) continue;
                    for (int sa = 0; sa < 2; ++sa) {
                        for (int sb = 0; sb < 2; ++sb) {
                            PauliSum term =
                                (cre[2 * p + sa] * cre[2 * r + sb]) *
                                (ann[2 * s + sb] * ann[2 * q + sa]);
                            term.scale(0.5 * v);
                            total.add(term);
                        }
                    }
                }
            }
        }
    }
    return total.canonicalized();
}

PauliSum subtract(const PauliSum& a, const PauliSum& b) {
    require(a.n_qubits() == b.n_qubits(), "qubit-count mismatch");
    PauliSum out(a.n_qubits());
    out.add(a);
    PauliSum neg(b.n_qubits());
    neg.add(b);
    neg.scale(-1.0);
    out.add(neg);
    return out.canonicalized();
}

PauliSum embed_operator(const PauliSum& op, const std::vector<int>& placement, int n_total) {
    require(static_cast<int>(placement.size()) == op.n_qubits(),
            "placement size must match operator qubit count");
    std::vector<bool> used(static_cast<std::size_t>(n_total), false);
    for (int target : placement) {
        require(target >= 0 && target < n_total, "placement target out of range");
        require(!used[static_cast<std::size_t>(target)], "placement must be injective");
        used[static_cast<std::size_t>(target)] = true;
    }
    PauliSum out(n_total);
    for (const auto& [c, s] : op.terms()) {
        PauliString big(n_total);
        for (int q = 0; q < op.n_qubits(); ++q) big.set(placement[q], s.at(q));
        out.add(c, big);
    }
    return out.canonicalized(0.0);
}

}  // namespace teqsci
