#include "teqsci/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "teqsci/common.hpp"
#include "teqsci/davidson.hpp"

namespace teqsci {

namespace {

constexpr std::size_t kSectorCap = 1000000;
constexpr int kDenseCap = 4096;

int spin_of(int q) { return q & 1; }
int orbital_of(int q) { return q >> 1; }

// Masks of the given popcount over n bits, ascending.
std::vector<std::uint64_t> combinations(int n, int k) {
    std::vector<std::uint64_t> out;
    if (k < 0 || k > n) return out;
    if (k == 0) {
        out.push_back(0);
        return out;
    }
    std::uint64_t mask = (1ULL << k) - 1;
    const std::uint64_t limit = 1ULL << n;
    while (mask < limit) {
        out.push_back(mask);
        // Gosper's hack: next mask with the same popcount.
        const std::uint64_t c = mask & -mask;
        const std::uint64_t r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    return out;
}

}  // namespace

std::vector<Determinant> sector_basis(int n_orbitals, int n_electrons, int ms2) {
    require(n_orbitals >= 1 && n_orbitals <= 32, "orbital count out of range");
    require((n_electrons + ms2) % 2 == 0, "N_e + ms2 must be even");
    const int n_alpha = (n_electrons + ms2) / 2;
    const int n_beta = (n_electrons - ms2) / 2;
    require(n_alpha >= 0 && n_beta >= 0 && n_alpha <= n_orbitals && n_beta <= n_orbitals,
            "sector is empty for this orbital count");

    const auto alpha_masks = combinations(n_orbitals, n_alpha);
    const auto beta_masks = combinations(n_orbitals, n_beta);
    require(alpha_masks.size() * beta_masks.size() <= kSectorCap, "sector basis too large");

    std::vector<Determinant> basis;
    basis.reserve(alpha_masks.size() * beta_masks.size());
    for (const auto ma : alpha_masks) {
        std::uint64_t spread_a = 0;
        for (int p = 0; p < n_orbitals; ++p) {
            if ((ma >> p) & 1ULL) spread_a |= 1ULL << (2 * p);
        }
        for (const auto mb : beta_masks) {
            std::uint64_t bits = spread_a;
            for (int p = 0; p < n_orbitals; ++p) {
                if ((mb >> p) & 1ULL) bits |= 1ULL << (2 * p + 1);
            }
            basis.emplace_back(bits, 2 * n_orbitals);
        }
    }
    return basis;
}

double slater_condon(const IntegralTable& table, const Determinant& x, const Determinant& y) {
    require(x.n_spin_orbitals == y.n_spin_orbitals, "register width mismatch");
    require(x.n_spin_orbitals == 2 * table.n_orbitals(), "determinant width does not match table");

    const std::uint64_t diff = x.bits ^ y.bits;
    const int degree2 = std::popcount(diff);
    if (degree2 > 4) return 0.0;

    if (degree2 == 0) {
        const auto occ = occupied_list(x);
        double e = table.e_core();
        for (std::size_t a = 0; a < occ.size(); ++a) {
            const int i = occ[a];
            e += table.h1(orbital_of(i), orbital_of(i));
            for (std::size_t b = 0; b < a; ++b) {
                const int j = occ[b];
                e += table.h2(orbital_of(i), orbital_of(i), orbital_of(j), orbital_of(j));
                if (spin_of(i) == spin_of(j)) {
                    e -= table.h2(orbital_of(i), orbital_of(j), orbital_of(j), orbital_of(i));
                }
            }
        }
        return e;
    }

    if (degree2 == 2) {
        if (std::popcount(x.bits & diff) != 1) return 0.0;  // particle-number mismatch
        const int i = std::countr_zero(x.bits & diff);  // occupied in x only
        const int a = std::countr_zero(y.bits & diff);  // occupied in y only
        if (spin_of(i) != spin_of(a)) return 0.0;
        // Parity: occupied orbitals strictly between the two positions.
        const std::uint64_t lo = 1ULL << std::min(i, a);
        const std::uint64_t hi = 1ULL << std::max(i, a);
        const int crossings = std::popcount(x.bits & (hi - 1) & ~(lo * 2 - 1));
        const double sign = (crossings & 1) ? -1.0 : 1.0;

        double e = table.h1(orbital_of(i), orbital_of(a));
        std::uint64_t common = x.bits & y.bits;
        while (common) {
            const int j = std::countr_zero(common);
            common &= common - 1;
            e += table.h2(orbital_of(i), orbital_of(a), orbital_of(j), orbital_of(j));
            if (spin_of(j) == spin_of(i)) {
                e -= table.h2(orbital_of(i), orbital_of(j), orbital_of(j), orbital_of(a));
            }
        }
        return sign * e;
    }

    // Double excitation: {i<j} occupied in x only, {a<b} occupied in y only.
    const std::uint64_t xonly = x.bits & diff;
    const std::uint64_t yonly = y.bits & diff;
    if (std::popcount(xonly) != 2) return 0.0;  // e.g. particle-number mismatch
    const int i = std::countr_zero(xonly);
    const int j = 63 - std::countl_zero(xonly);
    const int a = std::countr_zero(yonly);
    const int b = 63 - std::countl_zero(yonly);

    // Sign of <y| a+_a a+_b a_j a_i |x>.
    std::uint64_t z = x.bits;
    int sign = 1;
    sign *= apply_annihilate(z, i);
    sign *= apply_annihilate(z, j);
    sign *= apply_create(z, b);
    sign *= apply_create(z, a);
    if (sign == 0 || z != y.bits) return 0.0;

    double e = 0.0;
    if (spin_of(a) == spin_of(i) && spin_of(b) == spin_of(j)) {
        e += table.h2(orbital_of(a), orbital_of(i), orbital_of(b), orbital_of(j));
    }
    if (spin_of(a) == spin_of(j) && spin_of(b) == spin_of(i)) {
        e -= table.h2(orbital_of(a), orbital_of(j), orbital_of(b), orbital_of(i));
    }
    return sign * e;
}

namespace {

// Shared by casci and the s_squared helper: dense sector Hamiltonian.
Eigen::MatrixXd dense_sector_hamiltonian(const IntegralTable& table,
                                         const std::vector<Determinant>& basis) {
    const int dim = static_cast<int>(basis.size());
    Eigen::MatrixXd h(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            const double v = slater_condon(table, basis[static_cast<std::size_t>(i)],
                                           basis[static_cast<std::size_t>(j)]);
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

}  // namespace

CasciSolution casci(const IntegralTable& table, int n_roots) {
    CasciSolution out;
    out.n_electrons = table.n_electrons();
    out.ms2 = table.ms2();
    out.basis = sector_basis(table.n_orbitals(), table.n_electrons(), table.ms2());
    const int dim = static_cast<int>(out.basis.size());
    require(n_roots >= 1 && n_roots <= dim, "n_roots exceeds sector dimension");

    if (dim <= kDenseCap) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_sector_hamiltonian(table, out.basis));
        out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n_roots);
        out.eigenvectors = es.eigenvectors().leftCols(n_roots);
        return out;
    }

    // Above the dense cap: sparse rows + Davidson.
    std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(dim));
    std::vector<double> diag(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            if (std::popcount(out.basis[static_cast<std::size_t>(i)].bits ^
                              out.basis[static_cast<std::size_t>(j)].bits) > 4) {
                continue;
            }
            const double v = slater_condon(table, out.basis[static_cast<std::size_t>(i)],
                                           out.basis[static_cast<std::size_t>(j)]);
            if (i == j) {
                diag[static_cast<std::size_t>(i)] = v;
            } else if (v != 0.0) {
                rows[static_cast<std::size_t>(i)].push_back({j, v});
            }
        }
    }
    auto matvec = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i < dim; ++i) {
            y[i] += diag[static_cast<std::size_t>(i)] * x[i];
            for (const auto& [j, v] : rows[static_cast<std::size_t>(i)]) {
                y[i] += v * x[j];
                y[j] += v * x[i];
            }
        }
        return y;
    };
    DavidsonOptions opts;
    const DavidsonResult res = davidson(matvec, diag, n_roots, opts);
    if (!res.converged) {
        std::string msg = "casci Davidson did not converge; residuals:";
        for (double r : res.residuals) msg += " " + std::to_string(r);
        throw std::runtime_error(msg);
    }
    out.eigenvalues = res.eigenvalues;
    out.eigenvectors = res.eigenvectors;
    return out;
}

Determinant hf_determinant(int n_orbitals, int n_electrons, int ms2) {
    require((n_electrons + ms2) % 2 == 0, "N_e + ms2 must be even");
    const int n_alpha = (n_electrons + ms2) / 2;
    const int n_beta = (n_electrons - ms2) / 2;
    require(n_alpha <= n_orbitals && n_beta <= n_orbitals && n_alpha >= 0 && n_beta >= 0,
            "electron count infeasible");
    Determinant d(0, 2 * n_orbitals);
    for (int p = 0; p < n_alpha; ++p) d.bits |= 1ULL << (2 * p);
    for (int p = 0; p < n_beta; ++p) d.bits |= 1ULL << (2 * p + 1);
    return d;
}

double hf_energy(const IntegralTable& table) {
    const Determinant hf = hf_determinant(table.n_orbitals(), table.n_electrons(), table.ms2());
    return slater_condon(table, hf, hf);
}

double fidelity(std::span<const Determinant> a_configs, std::span<const double> a_coeffs,
                std::span<const Determinant> b_configs, std::span<const double> b_coeffs) {
    require(a_configs.size() == a_coeffs.size() && b_configs.size() == b_coeffs.size(),
            "configuration/coefficient length mismatch");
    std::unordered_map<std::uint64_t, double> a_map;
    a_map.reserve(a_configs.size());
    for (std::size_t i = 0; i < a_configs.size(); ++i) a_map[a_configs[i].bits] = a_coeffs[i];
    double s = 0.0;
    for (std::size_t i = 0; i < b_configs.size(); ++i) {
        const auto it = a_map.find(b_configs[i].bits);
        if (it != a_map.end()) s += it->second * b_coeffs[i];
    }
    return s * s;
}

double s_squared(std::span<const Determinant> configs, std::span<const double> coeffs) {
    require(configs.size() == coeffs.size(), "configuration/coefficient length mismatch");
    if (configs.empty()) return 0.0;
    std::unordered_map<std::uint64_t, std::size_t> index;
    index.reserve(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) index[configs[i].bits] = i;

    const int n_so = configs[0].n_spin_orbitals;
    const int m = n_so / 2;
    const double sz = 0.5 * configs[0].sz2();

    // <S^2> = <S- S+> + Sz(Sz + 1); S+ = sum_p a+_{p,alpha} a_{p,beta}.
    double total = sz * (sz + 1.0);
    for (std::size_t col = 0; col < configs.size(); ++col) {
        if (coeffs[col] == 0.0) continue;
        for (int p = 0; p < m; ++p) {
            std::uint64_t z1 = configs[col].bits;
            int s1 = apply_annihilate(z1, 2 * p + 1);
            if (s1 == 0) continue;
            const int s2 = apply_create(z1, 2 * p);
            if (s2 == 0) continue;
            for (int q = 0; q < m; ++q) {
                std::uint64_t z2 = z1;
                const int s3 = apply_annihilate(z2, 2 * q);
                if (s3 == 0) continue;
                const int s4 = apply_create(z2, 2 * q + 1);
                if (s4 == 0) continue;
                const auto it = index.find(z2);
                if (it == index.end()) continue;
                total += coeffs[it->second] * coeffs[col] * s1 * s2 * s3 * s4;
            }
        }
    }
    return total;
}

}  // namespace teqsci
