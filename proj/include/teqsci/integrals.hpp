#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace teqsci {

// Active-space electronic Hamiltonian: scalar core energy, one-electron
// integrals h1[p][q] and two-electron integrals (pq|rs) in chemists'
// notation with 8-fold permutational symmetry. All values in hartree,
// orbitals real.
class IntegralTable {
  public:
    IntegralTable(int n_orbitals, int n_electrons, int ms2, double e_core = 0.0);

    int n_orbitals() const { return m_; }
    int n_electrons() const { return n_electrons_; }
    int ms2() const { return ms2_; }
    double e_core() const { return e_core_; }
    void set_e_core(double v) { e_core_ = v; }

    double h1(int p, int q) const { return h1_[idx2(p, q)]; }
    double h2(int p, int q, int r, int s) const { return h2_[idx4(p, q, r, s)]; }

    // Symmetric / 8-fold symmetric assignment.
    void set_h1(int p, int q, double v);
    void set_h2(int p, int q, int r, int s, double v);

    // Throws when a stored invariant is broken (symmetry, electron count).
    void validate(double tol = 1e-12) const;

  private:
    std::size_t idx2(int p, int q) const;
    std::size_t idx4(int p, int q, int r, int s) const;

    int m_;
    int n_electrons_;
    int ms2_;
    double e_core_;
    std::vector<double> h1_;
    std::vector<double> h2_;
};

// Selection of an active window inside a parent table. Orbital indices are
// 0-based positions in the parent and strictly increasing. The electrons
// removed from the parent doubly occupy the lowest non-active orbitals.
struct ActiveSpaceSpec {
    int n_active_electrons = 0;
    std::vector<int> active_orbital_indices;
};

// FCIDUMP (Molpro convention): namelist header `&FCI NORB=..,NELEC=..,MS2=..`
// closed by `&END` or `/`, then `value p q r s` records with 1-based indices.
// `value p q 0 0` is h1, `value 0 0 0 0` is the core energy, ORBSYM/ISYM are
// parsed and ignored. Duplicate records with conflicting values are an error.
IntegralTable parse_fcidump(std::istream& in);
IntegralTable parse_fcidump(const std::string& text);
IntegralTable parse_fcidump_file(const std::string& path);

// Emits unique 8-fold entries with full precision; parse(write(t)) == t.
void write_fcidump(const IntegralTable& table, std::ostream& out);
std::string fcidump_string(const IntegralTable& table);

// Orbitals frozen by the spec: the lowest non-active parent orbitals that
// absorb the removed electrons, ascending.
std::vector<int> frozen_orbitals(const IntegralTable& parent, const ActiveSpaceSpec& spec);

// Restriction onto the active window with the frozen-core (inactive Fock)
// contributions folded into h1 and e_core.
IntegralTable restrict_active_space(const IntegralTable& parent, const ActiveSpaceSpec& spec);

}  // namespace teqsci
