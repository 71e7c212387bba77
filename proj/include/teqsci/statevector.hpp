#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "teqsci/determinant.hpp"
#include "teqsci/pauli.hpp"

namespace teqsci {

// Dense 2^n complex amplitude array. Basis index convention follows
// state_index(): qubit 0 is the most significant index bit.
class Statevector {
  public:
    Statevector() = default;
    explicit Statevector(int n_qubits);  // |00...0>
    static Statevector basis_state(const Determinant& d);

    int n_qubits() const { return n_; }
    std::size_t dimension() const { return amplitudes_.size(); }

    std::complex<double>& operator[](std::size_t i) { return amplitudes_[i]; }
    const std::complex<double>& operator[](std::size_t i) const { return amplitudes_[i]; }
    std::complex<double> amplitude(const Determinant& d) const;

    const std::vector<std::complex<double>>& amplitudes() const { return amplitudes_; }

    double norm_squared() const;
    void normalize();

  private:
    int n_ = 0;
    std::vector<std::complex<double>> amplitudes_;
};

// In-place exp(-i * theta * P) |psi>.
void apply_pauli_exponential(Statevector& state, const PauliString& p, double theta);

// op |psi> and <psi| op |psi>.
Statevector apply(const PauliSum& op, const Statevector& state);
std::complex<double> expectation(const PauliSum& op, const Statevector& state);
std::complex<double> overlap(const Statevector& a, const Statevector& b);

constexpr long long kUnlimitedGateBudget = std::numeric_limits<long long>::max();

// Two-qubit-gate cost of exponentiating one Pauli string: a string of
// weight w costs 2*(w-1) CNOTs, weight <= 1 costs none.
long long two_qubit_gate_cost(const PauliString& s);

// First-order product formula schedule for exp(-i * op * n_steps * dt).
// Terms are ordered by descending |coefficient| (ties by lexicographic
// string); each term in that order is retained when its gate cost fits the
// remaining per-step budget, otherwise marked truncated. Identity and other
// weight<=1 strings cost nothing and are always retained.
struct TrotterPlan {
    struct Term {
        PauliString string;
        double coefficient = 0.0;
        long long cost = 0;
        bool truncated = false;
    };

    int n_qubits = 0;
    double dt = 0.0;
    int n_steps = 0;
    long long gate_budget = kUnlimitedGateBudget;
    std::vector<Term> terms;

    std::size_t retained_count() const;
    long long retained_cost() const;
};

TrotterPlan build_trotter_plan(const PauliSum& op, double dt, int n_steps,
                               long long gate_budget = kUnlimitedGateBudget);

// Applies the retained terms in plan order, n_steps times. Pure: the input
// state is copied.
Statevector evolve(const Statevector& state, const TrotterPlan& plan);

// Measurement record for one circuit: outcomes sorted by bitstring with
// multiplicities summing to n_shots.
struct ShotBatch {
    std::vector<std::pair<Determinant, int>> outcomes;
    int n_shots = 0;
    double dt = 0.0;
    int state_index = 0;
};

// n_shots i.i.d. draws from |amplitude|^2, deterministic given seed
// (SplitMix64 inverse-CDF; see rng.hpp).
ShotBatch sample(const Statevector& state, int n_shots, std::uint64_t seed);

// Layered state preparation: amplitudes of the small register placed
// through `placement`, extra_occupied qubits set to |1>, every other qubit
// |0>. The small state must be normalized and the placement image disjoint
// from extra_occupied.
Statevector prepare_initial_state(const Statevector& small_state,
                                  const std::vector<int>& placement,
                                  const std::vector<int>& extra_occupied,
                                  int n_total);

}  // namespace teqsci
