#include "teqsci/statevector.hpp"

#include <algorithm>
#include <cmath>

#include "teqsci/common.hpp"
#include "teqsci/rng.hpp"

namespace teqsci {

namespace {

// Index-space masks for a Pauli string: qubit q sits at index bit n-1-q.
struct IndexMasks {
    std::uint64_t flip = 0;  // X or Y
    std::uint64_t yz = 0;    // Y or Z (sign flips on occupied)
    int n_y = 0;
};

IndexMasks index_masks(const PauliString& p) {
    IndexMasks m;
    const int n = p.n_qubits();
    for (int q = 0; q < n; ++q) {
        const std::uint64_t bit = 1ULL << (n - 1 - q);
        switch (p.at(q)) {
            case Pauli::I: break;
            case Pauli::X: m.flip |= bit; break;
            case Pauli::Y:
                m.flip |= bit;
                m.yz |= bit;
                ++m.n_y;
                break;
            case Pauli::Z: m.yz |= bit; break;
        }
    }
    return m;
}

// P |i> = phase(i) |i ^ flip>.
inline std::complex<double> basis_phase(std::uint64_t index, const IndexMasks& m) {
    static constexpr std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int sign = std::popcount(index & m.yz) & 1;
    std::complex<double> phase = kIPow[m.n_y & 3];
    return sign ? -phase : phase;
}

}  // namespace

Statevector::Statevector(int n_qubits) : n_(n_qubits) {
    require(n_qubits >= 0 && n_qubits <= kMaxQubits, "statevector register capped at 24 qubits");
    amplitudes_.assign(std::size_t{1} << n_qubits, 0.0);
    amplitudes_[0] = 1.0;
}

Statevector Statevector::basis_state(const Determinant& d) {
    Statevector s(d.n_spin_orbitals);
    s.amplitudes_[0] = 0.0;
    s.amplitudes_[state_index(d)] = 1.0;
    return s;
}

std::complex<double> Statevector::amplitude(const Determinant& d) const {
    require(d.n_spin_orbitals == n_, "register width mismatch");
    return amplitudes_[state_index(d)];
}

double Statevector::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s;
}

void Statevector::normalize() {
    const double n2 = norm_squared();
    require(n2 > 0.0, "cannot normalize a zero state");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : amplitudes_) a *= inv;
}

void apply_pauli_exponential(Statevector& state, const PauliString& p, double theta) {
    require(p.n_qubits() == state.n_qubits(), "dimension mismatch");
    const IndexMasks m = index_masks(p);
    const std::size_t dim = state.dimension();
    const double c = std::cos(theta);
    const std::complex<double> mis(0.0, -std::sin(theta));

    if (p.is_identity()) {
        const std::complex<double> phase = c + mis;
        for (std::size_t i = 0; i < dim; ++i) state[i] *= phase;
        return;
    }
    if (m.flip == 0) {
        // Diagonal string: amplitude-wise phase.
        const std::complex<double> plus = c + mis;
        const std::complex<double> minus = c - mis;
        for (std::size_t i = 0; i < dim; ++i) {
            state[i] *= (std::popcount(i & m.yz) & 1) ? minus : plus;
        }
        return;
    }
    for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t j = i ^ m.flip;
        if (j < i) continue;
        const std::complex<double> phi_i = basis_phase(i, m);  // P|i> = phi_i |j>
        const std::complex<double> phi_j = basis_phase(j, m);
        const std::complex<double> vi = state[i];
        const std::complex<double> vj = state[j];
        state[i] = c * vi + mis * phi_j * vj;
        state[j] = c * vj + mis * phi_i * vi;
    }
}

Statevector apply(const PauliSum& op, const Statevector& state) {
    require(op.n_qubits() == state.n_qubits(), "dimension mismatch");
    Statevector out(state.n_qubits());
    out[0] = 0.0;
    for (const auto& [coeff, s] : op.terms()) {
        const IndexMasks m = index_masks(s);
        for (std::size_t i = 0; i < state.dimension(); ++i) {
            if (state[i] == std::complex<double>(0.0)) continue;
            out[i ^ m.flip] += coeff * basis_phase(i, m) * state[i];
        }
    }
    return out;
}

std::complex<double> expectation(const PauliSum& op, const Statevector& state) {
    require(op.n_qubits() == state.n_qubits(), "dimension mismatch");
    std::complex<double> total = 0.0;
    for (const auto& [coeff, s] : op.terms()) {
        const IndexMasks m = index_masks(s);
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < state.dimension(); ++i) {
            const std::size_t j = i ^ m.flip;
            acc += std::conj(state[j]) * basis_phase(i, m) * state[i];
        }
        total += coeff * acc;
    }
    return total;
}

std::complex<double> overlap(const Statevector& a, const Statevector& b) {
    require(a.n_qubits() == b.n_qubits(), "dimension mismatch");
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

long long two_qubit_gate_cost(const PauliString& s) {
    const int w = s.weight();
    return w <= 1 ? 0 : 2LL * (w - 1);
}

std::size_t TrotterPlan::retained_count() const {
    std::size_t n = 0;
    for (const auto& t : terms) n += t.truncated ? 0 : 1;
    return n;
}

long long TrotterPlan::retained_cost() const {
    long long c = 0;
    for (const auto& t : terms) c += t.truncated ? 0 : t.cost;
    return c;
}

TrotterPlan build_trotter_plan(const PauliSum& op, double dt, int n_steps, long long gate_budget) {
    require(std::isfinite(dt), "dt must be real");
    require(n_steps >= 0, "n_steps must be non-negative");
    require(gate_budget >= 0, "gate budget must be non-negative");

    const PauliSum canon = op.canonicalized();
    require(canon.is_hermitian(1e-10), "operator must be hermitian");

    TrotterPlan plan;
    plan.n_qubits = op.n_qubits();
    plan.dt = dt;
    plan.n_steps = n_steps;
    plan.gate_budget = gate_budget;
    plan.terms.reserve(canon.size());
    for (const auto& [c, s] : canon.terms()) {
        plan.terms.push_back({s, c.real(), two_qubit_gate_cost(s), false});
    }
    std::sort(plan.terms.begin(), plan.terms.end(), [](const auto& a, const auto& b) {
        const double ma = std::abs(a.coefficient);
        const double mb = std::abs(b.coefficient);
        if (ma != mb) return ma > mb;
        return a.string < b.string;
    });

    long long used = 0;
    for (auto& term : plan.terms) {
        if (term.cost <= gate_budget - used) {
            used += term.cost;
        } else {
            term.truncated = true;
        }
    }
    return plan;
}

Statevector evolve(const Statevector& state, const TrotterPlan& plan) {
    require(plan.n_qubits == state.n_qubits(), "dimension mismatch");
    Statevector out = state;
    for (int step = 0; step < plan.n_steps; ++step) {
        for (const auto& term : plan.terms) {
            if (term.truncated) continue;
            apply_pauli_exponential(out, term.string, term.coefficient * plan.dt);
        }
    }
    return out;
}

ShotBatch sample(const Statevector& state, int n_shots, std::uint64_t seed) {
    require(n_shots >= 0, "shot count must be non-negative");
    const double n2 = state.norm_squared();
    require(n2 > 1e-12, "cannot sample a zero-norm state");

    ShotBatch batch;
    batch.n_shots = n_shots;
    if (n_shots == 0) return batch;

    SplitMix64 rng(seed);
    std::vector<double> draws(static_cast<std::size_t>(n_shots));
    for (auto& u : draws) u = rng.next_double() * n2;
    std::sort(draws.begin(), draws.end());

    // Single sweep over the cumulative distribution; outcomes come out
    // sorted by index, i.e. by bitstring.
    std::size_t k = 0;
    double cum = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < state.dimension() && k < draws.size(); ++i) {
        const double p = std::norm(state[i]);
        if (p == 0.0) continue;
        last_nonzero = i;
        cum += p;
        int count = 0;
        while (k < draws.size() && draws[k] < cum) {
            ++count;
            ++k;
        }
        if (count > 0) {
            batch.outcomes.push_back({determinant_from_index(i, state.n_qubits()), count});
        }
    }
    if (k < draws.size()) {
        // Floating-point tail: assign the remainder to the last outcome.
        const int rest = static_cast<int>(draws.size() - k);
        const Determinant tail = determinant_from_index(last_nonzero, state.n_qubits());
        if (!batch.outcomes.empty() && batch.outcomes.back().first == tail) {
            batch.outcomes.back().second += rest;
        } else {
            batch.outcomes.push_back({tail, rest});
        }
    }
    return batch;
}

Statevector prepare_initial_state(const Statevector& small_state,
                                  const std::vector<int>& placement,
                                  const std::vector<int>& extra_occupied, int n_total) {
    require(static_cast<int>(placement.size()) == small_state.n_qubits(),
            "placement size must match the small register");
    require(std::abs(small_state.norm_squared() - 1.0) < 1e-8, "input state is not normalized");

    std::vector<bool> used(static_cast<std::size_t>(n_total), false);
    for (int q : placement) {
        require(q >= 0 && q < n_total, "placement target out of range");
        require(!used[static_cast<std::size_t>(q)], "placement must be injective");
        used[static_cast<std::size_t>(q)] = true;
    }
    std::uint64_t extra_bits = 0;
    for (int q : extra_occupied) {
        require(q >= 0 && q < n_total, "extra_occupied qubit out of range");
        require(!used[static_cast<std::size_t>(q)],
                "extra_occupied overlaps the placement image");
        used[static_cast<std::size_t>(q)] = true;
        extra_bits |= 1ULL << q;
    }

    Statevector big(n_total);
    big[0] = 0.0;
    const int ns = small_state.n_qubits();
    for (std::size_t i = 0; i < small_state.dimension(); ++i) {
        if (small_state[i] == std::complex<double>(0.0)) continue;
        const Determinant small_det = determinant_from_index(i, ns);
        Determinant big_det(extra_bits, n_total);
        for (int q = 0; q < ns; ++q) {
            if (small_det.occupied(q)) big_det.bits |= 1ULL << placement[q];
        }
        big[state_index(big_det)] = small_state[i];
    }
    return big;
}

}  // namespace teqsci
