#include "teqsci/integrals.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "teqsci/common.hpp"

namespace teqsci {

IntegralTable::IntegralTable(int n_orbitals, int n_electrons, int ms2, double e_core)
    : m_(n_orbitals), n_electrons_(n_electrons), ms2_(ms2), e_core_(e_core) {
    require(n_orbitals > 0, "n_orbitals must be positive");
    require(n_electrons >= 0 && n_electrons <= 2 * n_orbitals,
            "electron count exceeds 2 * n_orbitals");
    require((n_electrons + ms2) % 2 == 0, "N_e + ms2 must be even");
    require(std::abs(ms2) <= n_electrons, "|ms2| cannot exceed N_e");
    const auto m = static_cast<std::size_t>(m_);
    h1_.assign(m * m, 0.0);
    h2_.assign(m * m * m * m, 0.0);
}

std::size_t IntegralTable::idx2(int p, int q) const {
    require(p >= 0 && p < m_ && q >= 0 && q < m_, "h1 index out of range");
    return static_cast<std::size_t>(p) * m_ + q;
}

std::size_t IntegralTable::idx4(int p, int q, int r, int s) const {
    require(p >= 0 && p < m_ && q >= 0 && q < m_ && r >= 0 && r < m_ && s >= 0 && s < m_,
            "h2 index out of range");
    return ((static_cast<std::size_t>(p) * m_ + q) * m_ + r) * m_ + s;
}

void IntegralTable::set_h1(int p, int q, double v) {
    h1_[idx2(p, q)] = v;
    h1_[idx2(q, p)] = v;
}

void IntegralTable::set_h2(int p, int q, int r, int s, double v) {
    h2_[idx4(p, q, r, s)] = v;
    h2_[idx4(q, p, r, s)] = v;
    h2_[idx4(p, q, s, r)] = v;
    h2_[idx4(q, p, s, r)] = v;
    h2_[idx4(r, s, p, q)] = v;
    h2_[idx4(s, r, p, q)] = v;
    h2_[idx4(r, s, q, p)] = v;
    h2_[idx4(s, r, q, p)] = v;
}

void IntegralTable::validate(double tol) const {
    for (int p = 0; p < m_; ++p) {
        for (int q = 0; q <= p; ++q) {
            require(std::abs(h1(p, q) - h1(q, p)) <= tol, "h1 not symmetric");
        }
    }
    for (int p = 0; p < m_; ++p) {
        for (int q = 0; q < m_; ++q) {
            for (int r = 0; r < m_; ++r) {
                for (int s = 0; s < m_; ++s) {
                    const double v = h2(p, q, r, s);
                    require(std::abs(v - h2(q, p, r, s)) <= tol &&
                                std::abs(v - h2(p, q, s, r)) <= tol &&
                                std::abs(v - h2(r, s, p, q)) <= tol,
                            "h2 8-fold symmetry broken");
                }
            }
        }
    }
}

namespace {

// Canonical representative of the 8 equivalent index orderings.
std::array<int, 4> canonical4(int p, int q, int r, int s) {
    std::array<std::array<int, 4>, 8> perms{{{p, q, r, s},
                                             {q, p, r, s},
                                             {p, q, s, r},
                                             {q, p, s, r},
                                             {r, s, p, q},
                                             {s, r, p, q},
                                             {r, s, q, p},
                                             {s, r, q, p}}};
    return *std::min_element(perms.begin(), perms.end());
}

// Fortran reals may use D exponents.
double parse_value(std::string token) {
    for (char& c : token) {
        if (c == 'D' || c == 'd') c = 'E';
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad numeric value in FCIDUMP: " + token);
    }
    require(pos == token.size(), "bad numeric value in FCIDUMP: " + token);
    return v;
}

struct Header {
    int norb = -1;
    int nelec = -1;
    int ms2 = 0;
    std::size_t body_offset = 0;
};

Header parse_header(const std::string& text) {
    const auto start = text.find('&');
    require(start != std::string::npos, "FCIDUMP header missing &FCI namelist");
    std::string tag = text.substr(start + 1, 3);
    for (char& c : tag) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    require(tag == "FCI", "FCIDUMP header missing &FCI namelist");

    // Header ends at &END or a bare / (Fortran namelist terminator).
    std::size_t end = std::string::npos;
    std::size_t end_len = 0;
    for (std::size_t i = start + 4; i < text.size(); ++i) {
        if (text[i] == '/') {
            end = i;
            end_len = 1;
            break;
        }
        if (text[i] == '&') {
            std::string word = text.substr(i + 1, 3);
            for (char& c : word) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            require(word == "END", "unexpected & inside FCIDUMP header");
            end = i;
            end_len = 4;
            break;
        }
    }
    require(end != std::string::npos, "FCIDUMP header not terminated by &END or /");

    Header h;
    h.body_offset = end + end_len;
    std::string fields = text.substr(start + 4, end - start - 4);
    std::replace(fields.begin(), fields.end(), '\n', ',');
    std::stringstream ss(fields);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        std::string key = item.substr(0, eq);
        key.erase(std::remove_if(key.begin(), key.end(),
                                 [](unsigned char c) { return std::isspace(c); }),
                  key.end());
        for (char& c : key) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        std::string value = item.substr(eq + 1);
        // Multi-valued fields (ORBSYM) spill fields across commas; only the
        // scalar keys matter and point-group labels are ignored.
        if (key == "NORB" || key == "NELEC" || key == "MS2") {
            try {
                const int v = std::stoi(value);
                if (key == "NORB") h.norb = v;
                if (key == "NELEC") h.nelec = v;
                if (key == "MS2") h.ms2 = v;
            } catch (const std::exception&) {
                throw std::invalid_argument("malformed FCIDUMP header field " + key);
            }
        }
    }
    require(h.norb > 0, "FCIDUMP header missing NORB");
    require(h.nelec >= 0, "FCIDUMP header missing NELEC");
    return h;
}

}  // namespace

IntegralTable parse_fcidump(const std::string& text) {
    const Header header = parse_header(text);
    IntegralTable table(header.norb, header.nelec, header.ms2);

    // Track first-seen values per canonical index to report conflicts.
    std::vector<std::pair<std::array<int, 4>, double>> seen2;
    bool seen_core = false;
    double core_value = 0.0;
    std::vector<std::pair<std::array<int, 2>, double>> seen1;

    std::stringstream body(text.substr(header.body_offset));
    std::string line;
    while (std::getline(body, line)) {
        std::stringstream ls(line);
        std::string vtok;
        if (!(ls >> vtok)) continue;
        long p, q, r, s;
        if (!(ls >> p >> q >> r >> s)) {
            throw std::invalid_argument("malformed FCIDUMP record: " + line);
        }
        std::string extra;
        require(!(ls >> extra), "trailing tokens in FCIDUMP record: " + line);
        const double v = parse_value(vtok);
        require(std::abs(v) < 1e30, "non-finite FCIDUMP value");

        const int n = table.n_orbitals();
        auto in_range = [n](long i) { return i >= 1 && i <= n; };
        if (p == 0 && q == 0 && r == 0 && s == 0) {
            if (seen_core && std::abs(core_value - v) > 0.0) {
                std::ostringstream msg;
                msg << "conflicting core-energy records: " << core_value << " vs " << v;
                throw std::invalid_argument(msg.str());
            }
            seen_core = true;
            core_value = v;
            table.set_e_core(v);
        } else if (r == 0 && s == 0) {
            if (q == 0) continue;  // orbital-energy record, ignored
            require(in_range(p) && in_range(q), "FCIDUMP h1 index out of range: " + line);
            const std::array<int, 2> key{static_cast<int>(std::min(p, q)) - 1,
                                         static_cast<int>(std::max(p, q)) - 1};
            for (const auto& [k, old] : seen1) {
                if (k == key && std::abs(old - v) > 0.0) {
                    std::ostringstream msg;
                    msg << "conflicting h1 records at (" << p << "," << q << "): " << old
                        << " vs " << v;
                    throw std::invalid_argument(msg.str());
                }
            }
            seen1.push_back({key, v});
            table.set_h1(static_cast<int>(p) - 1, static_cast<int>(q) - 1, v);
        } else {
            require(in_range(p) && in_range(q) && in_range(r) && in_range(s),
                    "FCIDUMP h2 index out of range: " + line);
            const auto key = canonical4(static_cast<int>(p) - 1, static_cast<int>(q) - 1,
                                        static_cast<int>(r) - 1, static_cast<int>(s) - 1);
            for (const auto& [k, old] : seen2) {
                if (k == key && std::abs(old - v) > 0.0) {
                    std::ostringstream msg;
                    msg << "conflicting h2 records at (" << p << "," << q << "|" << r << ","
                        << s << "): " << old << " vs " << v;
                    throw std::invalid_argument(msg.str());
                }
            }
            seen2.push_back({key, v});
            table.set_h2(static_cast<int>(p) - 1, static_cast<int>(q) - 1,
                         static_cast<int>(r) - 1, static_cast<int>(s) - 1, v);
        }
    }
    return table;
}

IntegralTable parse_fcidump(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_fcidump(ss.str());
}

IntegralTable parse_fcidump_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open FCIDUMP file: " + path);
    return parse_fcidump(in);
}

void write_fcidump(const IntegralTable& table, std::ostream& out) {
    const int m = table.n_orbitals();
    out << "&FCI NORB=" << m << ",NELEC=" << table.n_electrons() << ",MS2=" << table.ms2()
        << ",\n  ORBSYM=";
    for (int p = 0; p < m; ++p) out << "1,";
    out << "\n  ISYM=1,\n&END\n";

    char buf[64];
    auto emit = [&](double v, int p, int q, int r, int s) {
        std::snprintf(buf, sizeof(buf), "%23.16E %3d %3d %3d %3d\n", v, p, q, r, s);
        out << buf;
    };
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            for (int r = 0; r < m; ++r) {
                for (int s = 0; s < m; ++s) {
                    if (canonical4(p, q, r, s) != std::array<int, 4>{p, q, r, s}) continue;
                    const double v = table.h2(p, q, r, s);
                    if (v != 0.0) emit(v, p + 1, q + 1, r + 1, s + 1);
                }
            }
        }
    }
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q <= p; ++q) {
            const double v = table.h1(p, q);
            if (v != 0.0) emit(v, p + 1, q + 1, 0, 0);
        }
    }
    emit(table.e_core(), 0, 0, 0, 0);
}

std::string fcidump_string(const IntegralTable& table) {
    std::ostringstream ss;
    write_fcidump(table, ss);
    return ss.str();
}

std::vector<int> frozen_orbitals(const IntegralTable& parent, const ActiveSpaceSpec& spec) {
    const int m = parent.n_orbitals();
    require(!spec.active_orbital_indices.empty(), "active orbital list is empty");
    for (std::size_t i = 0; i < spec.active_orbital_indices.size(); ++i) {
        const int p = spec.active_orbital_indices[i];
        require(p >= 0 && p < m, "active orbital index out of parent range");
        if (i > 0) {
            require(p > spec.active_orbital_indices[i - 1],
                    "active orbital indices must be strictly increasing");
        }
    }
    const int n_active_orb = static_cast<int>(spec.active_orbital_indices.size());
    require(spec.n_active_electrons >= 0 && spec.n_active_electrons <= 2 * n_active_orb,
            "active electron count infeasible for the window");
    const int removed = parent.n_electrons() - spec.n_active_electrons;
    require(removed >= 0, "active space has more electrons than the parent");
    require(removed % 2 == 0, "removed electrons cannot doubly occupy frozen orbitals");
    const int n_frozen = removed / 2;

    std::vector<int> frozen;
    for (int p = 0; p < m && static_cast<int>(frozen.size()) < n_frozen; ++p) {
        if (!std::binary_search(spec.active_orbital_indices.begin(),
                                spec.active_orbital_indices.end(), p)) {
            frozen.push_back(p);
        }
    }
    require(static_cast<int>(frozen.size()) == n_frozen,
            "not enough non-active orbitals to hold the frozen electrons");
    return frozen;
}

IntegralTable restrict_active_space(const IntegralTable& parent, const ActiveSpaceSpec& spec) {
    const std::vector<int> frozen = frozen_orbitals(parent, spec);
    const auto& active = spec.active_orbital_indices;
    const int n_active = static_cast<int>(active.size());

    // ms2 is preserved: frozen shells are closed.
    require((spec.n_active_electrons + parent.ms2()) % 2 == 0 &&
                std::abs(parent.ms2()) <= spec.n_active_electrons,
            "active electron count incompatible with parent ms2");
    IntegralTable out(n_active, spec.n_active_electrons, parent.ms2());

    // Core term: doubly occupied frozen orbitals.
    double e_core = parent.e_core();
    for (int f : frozen) {
        e_core += 2.0 * parent.h1(f, f);
        for (int g : frozen) {
            e_core += 2.0 * parent.h2(f, f, g, g) - parent.h2(f, g, g, f);
        }
    }
    out.set_e_core(e_core);

    // Inactive-Fock fold into the active one-electron block.
    for (int a = 0; a < n_active; ++a) {
        for (int b = 0; b <= a; ++b) {
            const int p = active[a];
            const int q = active[b];
            double v = parent.h1(p, q);
            for (int f : frozen) {
                v += 2.0 * parent.h2(p, q, f, f) - parent.h2(p, f, f, q);
            }
            out.set_h1(a, b, v);
        }
    }

    for (int a = 0; a < n_active; ++a) {
        for (int b = 0; b < n_active; ++b) {
            for (int c = 0; c < n_active; ++c) {
                for (int d = 0; d < n_active; ++d) {
                    out.set_h2(a, b, c, d, parent.h2(active[a], active[b], active[c], active[d]));
                }
            }
        }
    }
    return out;
}

}  // namespace teqsci
