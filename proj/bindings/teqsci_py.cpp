#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "teqsci/common.hpp"
#include "teqsci/determinant.hpp"
#include "teqsci/integrals.hpp"
#include "teqsci/oniom.hpp"
#include "teqsci/oracle.hpp"
#include "teqsci/pauli.hpp"
#include "teqsci/pipeline.hpp"
#include "teqsci/qsci.hpp"
#include "teqsci/selection.hpp"
#include "teqsci/statevector.hpp"

namespace py = pybind11;
using namespace teqsci;

namespace {

std::vector<double> column_of(const Eigen::MatrixXd& m, int col) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, col);
    return out;
}

}  // namespace

PYBIND11_MODULE(_teqsci, m) {
    m.doc() = "Sampling-based selected CI with a statevector backend";

    py::class_<Determinant>(m, "Determinant")
        .def(py::init<std::uint64_t, int>(), py::arg("bits"), py::arg("n_spin_orbitals"))
        .def_static("from_string", &Determinant::from_string)
        .def_readonly("bits", &Determinant::bits)
        .def_readonly("n_spin_orbitals", &Determinant::n_spin_orbitals)
        .def("n_electrons", &Determinant::n_electrons)
        .def("n_alpha", &Determinant::n_alpha)
        .def("n_beta", &Determinant::n_beta)
        .def("sz2", &Determinant::sz2)
        .def("__str__", &Determinant::to_string)
        .def("__repr__",
             [](const Determinant& d) { return "Determinant('" + d.to_string() + "')"; })
        .def("__eq__", [](const Determinant& a, const Determinant& b) { return a == b; })
        .def("__hash__", [](const Determinant& d) {
            return std::hash<std::uint64_t>{}(d.bits) ^ d.n_spin_orbitals;
        });

    py::class_<IntegralTable>(m, "IntegralTable")
        .def(py::init<int, int, int, double>(), py::arg("n_orbitals"), py::arg("n_electrons"),
             py::arg("ms2"), py::arg("e_core") = 0.0)
        .def_property_readonly("n_orbitals", &IntegralTable::n_orbitals)
        .def_property_readonly("n_electrons", &IntegralTable::n_electrons)
        .def_property_readonly("ms2", &IntegralTable::ms2)
        .def_property_readonly("e_core", &IntegralTable::e_core)
        .def("set_e_core", &IntegralTable::set_e_core)
        .def("h1", &IntegralTable::h1)
        .def("h2", &IntegralTable::h2)
        .def("set_h1", &IntegralTable::set_h1)
        .def("set_h2", &IntegralTable::set_h2)
        .def("validate", &IntegralTable::validate, py::arg("tol") = 1e-12);

    py::class_<ActiveSpaceSpec>(m, "ActiveSpaceSpec")
        .def(py::init([](int electrons, std::vector<int> orbitals) {
                 ActiveSpaceSpec s;
                 s.n_active_electrons = electrons;
                 s.active_orbital_indices = std::move(orbitals);
                 return s;
             }),
             py::arg("n_active_electrons"), py::arg("active_orbital_indices"))
        .def_readwrite("n_active_electrons", &ActiveSpaceSpec::n_active_electrons)
        .def_readwrite("active_orbital_indices", &ActiveSpaceSpec::active_orbital_indices);

    m.def("parse_fcidump", py::overload_cast<const std::string&>(&parse_fcidump),
          "Parse FCIDUMP text");
    m.def("parse_fcidump_file", &parse_fcidump_file);
    m.def("fcidump_string", &fcidump_string);
    m.def("restrict_active_space", &restrict_active_space);
    m.def("frozen_orbitals", &frozen_orbitals);

    py::class_<PauliString>(m, "PauliString")
        .def_static("from_letters", &PauliString::from_letters)
        .def_property_readonly("n_qubits", &PauliString::n_qubits)
        .def("weight", &PauliString::weight)
        .def("letters", &PauliString::letters)
        .def("__str__", &PauliString::letters);

    py::class_<PauliSum>(m, "PauliSum")
        .def_property_readonly("n_qubits", &PauliSum::n_qubits)
        .def("__len__", &PauliSum::size)
        .def("terms",
             [](const PauliSum& s) {
                 std::vector<std::pair<std::complex<double>, std::string>> out;
                 for (const auto& [c, p] : s.terms()) out.push_back({c, p.letters()});
                 return out;
             })
        .def("is_hermitian", &PauliSum::is_hermitian, py::arg("tol") = 1e-12)
        .def("to_json", &PauliSum::to_json);

    m.def("jordan_wigner", &jordan_wigner);
    m.def("subtract", &subtract);
    m.def("embed_operator", &embed_operator);

    py::class_<Statevector>(m, "Statevector")
        .def(py::init<int>(), py::arg("n_qubits"))
        .def_static("basis_state", &Statevector::basis_state)
        .def_property_readonly("n_qubits", &Statevector::n_qubits)
        .def("amplitude", &Statevector::amplitude)
        .def("norm_squared", &Statevector::norm_squared)
        .def("amplitudes",
             [](const Statevector& s) {
                 return py::array_t<std::complex<double>>(
                     static_cast<py::ssize_t>(s.dimension()), s.amplitudes().data());
             })
        .def("set_amplitudes", [](Statevector& s, py::array_t<std::complex<double>> values) {
            const auto r = values.unchecked<1>();
            if (static_cast<std::size_t>(r.shape(0)) != s.dimension()) {
                throw std::invalid_argument("amplitude array has wrong length");
            }
            for (py::ssize_t i = 0; i < r.shape(0); ++i) s[static_cast<std::size_t>(i)] = r(i);
        });

    m.def("expectation", &expectation);
    m.def("apply", &apply);
    m.def("overlap", &overlap);
    m.def("prepare_initial_state", &prepare_initial_state, py::arg("small_state"),
          py::arg("placement"), py::arg("extra_occupied"), py::arg("n_total"));

    py::class_<TrotterPlan>(m, "TrotterPlan")
        .def_readonly("n_qubits", &TrotterPlan::n_qubits)
        .def_readonly("dt", &TrotterPlan::dt)
        .def_readonly("n_steps", &TrotterPlan::n_steps)
        .def("retained_count", &TrotterPlan::retained_count)
        .def("retained_cost", &TrotterPlan::retained_cost)
        .def("terms", [](const TrotterPlan& p) {
            std::vector<py::dict> out;
            for (const auto& t : p.terms) {
                py::dict d;
                d["letters"] = t.string.letters();
                d["coefficient"] = t.coefficient;
                d["cost"] = t.cost;
                d["truncated"] = t.truncated;
                out.push_back(d);
            }
            return out;
        });

    m.attr("UNLIMITED_GATE_BUDGET") = py::int_(kUnlimitedGateBudget);
    m.def("build_trotter_plan", &build_trotter_plan, py::arg("op"), py::arg("dt"),
          py::arg("n_steps"), py::arg("gate_budget") = kUnlimitedGateBudget);
    m.def("evolve", &evolve);

    py::class_<ShotBatch>(m, "ShotBatch")
        .def_readonly("n_shots", &ShotBatch::n_shots)
        .def_readonly("dt", &ShotBatch::dt)
        .def_readonly("state_index", &ShotBatch::state_index)
        .def("outcomes", [](const ShotBatch& b) {
            std::vector<std::pair<std::string, int>> out;
            for (const auto& [d, c] : b.outcomes) out.push_back({d.to_string(), c});
            return out;
        });

    m.def("sample", &sample, py::arg("state"), py::arg("n_shots"), py::arg("seed"));

    py::class_<ConfigurationSet>(m, "ConfigurationSet")
        .def(py::init<int>(), py::arg("n_spin_orbitals"))
        .def("__len__", &ConfigurationSet::size)
        .def("insert", &ConfigurationSet::insert, py::arg("determinant"), py::arg("tag"))
        .def("contains", &ConfigurationSet::contains)
        .def("members", &ConfigurationSet::members)
        .def("to_json", &ConfigurationSet::to_json);

    m.attr("TAG_BASELINE") = py::int_(static_cast<int>(kBaseline));
    m.attr("TAG_SAMPLED") = py::int_(static_cast<int>(kSampled));
    m.attr("TAG_SPIN_AUGMENTED") = py::int_(static_cast<int>(kSpinAugmented));

    m.def("postselect",
          [](const ShotBatch& batch, int n_electrons, int ms2) {
              const PostselectResult r = postselect(batch, n_electrons, ms2);
              std::vector<std::pair<std::string, int>> kept;
              for (const auto& [d, c] : r.kept) kept.push_back({d.to_string(), c});
              return py::make_tuple(kept, r.rejected_count);
          },
          py::arg("batch"), py::arg("n_electrons"), py::arg("ms2"));
    m.def("spin_augment", &spin_augment);

    py::class_<CasciSolution>(m, "CasciSolution")
        .def_readonly("eigenvalues", &CasciSolution::eigenvalues)
        .def_readonly("basis", &CasciSolution::basis)
        .def_property_readonly("eigenvectors",
                               [](const CasciSolution& s) { return s.eigenvectors; })
        .def("root", [](const CasciSolution& s, int k) { return column_of(s.eigenvectors, k); });

    m.def("sector_basis", &sector_basis);
    m.def("casci", &casci, py::arg("table"), py::arg("n_roots"));
    m.def("slater_condon", &slater_condon);
    m.def("hf_determinant", &hf_determinant);
    m.def("hf_energy", &hf_energy);
    m.def("fidelity",
          [](const std::vector<Determinant>& a_configs, const std::vector<double>& a_coeffs,
             const std::vector<Determinant>& b_configs, const std::vector<double>& b_coeffs) {
              return fidelity(a_configs, a_coeffs, b_configs, b_coeffs);
          });
    m.def("s_squared",
          [](const std::vector<Determinant>& configs, const std::vector<double>& coeffs) {
              return s_squared(configs, coeffs);
          });

    py::class_<SubspaceResult>(m, "SubspaceResult")
        .def_readonly("eigenvalues", &SubspaceResult::eigenvalues)
        .def_readonly("n_roots", &SubspaceResult::n_roots)
        .def_property_readonly("configurations",
                               [](const SubspaceResult& r) { return r.configurations; })
        .def_property_readonly("eigenvectors",
                               [](const SubspaceResult& r) { return r.eigenvectors; })
        .def("root", [](const SubspaceResult& r, int k) { return column_of(r.eigenvectors, k); })
        .def("to_json", &SubspaceResult::to_json, py::arg("top_k") = 10);

    m.def(
        "qsci_energies",
        [](const IntegralTable& table, const ConfigurationSet& configs, int n_roots) {
            return qsci_energies(table, configs, n_roots);
        },
        py::arg("table"), py::arg("configs"), py::arg("n_roots"));
    m.def(
        "build_subspace_hamiltonian_dense",
        [](const IntegralTable& table, const ConfigurationSet& configs) {
            return build_subspace_hamiltonian(table, configs).dense();
        },
        py::arg("table"), py::arg("configs"));

    py::class_<LayerEnergies>(m, "LayerEnergies")
        .def(py::init([](std::string label, double e_low_real, double e_low_model,
                         double e_high_model) {
                 LayerEnergies l;
                 l.label = std::move(label);
                 l.e_low_real = e_low_real;
                 l.e_low_model = e_low_model;
                 l.e_high_model = e_high_model;
                 return l;
             }),
             py::arg("label"), py::arg("e_low_real"), py::arg("e_low_model"),
             py::arg("e_high_model"))
        .def_readwrite("label", &LayerEnergies::label)
        .def_readwrite("e_low_real", &LayerEnergies::e_low_real)
        .def_readwrite("e_low_model", &LayerEnergies::e_low_model)
        .def_readwrite("e_high_model", &LayerEnergies::e_high_model);

    m.def("oniom_energy", &oniom_energy);
    m.def("relative_profile", [](const std::vector<LayerEnergies>& entries,
                                 const std::string& reference) {
        std::vector<py::dict> out;
        for (const auto& e : relative_profile(entries, reference)) {
            py::dict d;
            d["label"] = e.label;
            d["e_oniom_hartree"] = e.total_hartree;
            d["delta_ev"] = e.delta_ev;
            out.push_back(d);
        }
        return out;
    });
    m.attr("HARTREE_TO_EV") = py::float_(kHartreeToEv);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("fcidump_path", &RunConfig::fcidump_path)
        .def_readwrite("output_dir", &RunConfig::output_dir)
        .def_readwrite("initial_space", &RunConfig::initial_space)
        .def_readwrite("full_space", &RunConfig::full_space)
        .def_readwrite("initial_electrons", &RunConfig::initial_electrons)
        .def_readwrite("initial_orbital_count", &RunConfig::initial_orbital_count)
        .def_readwrite("dt_grid", &RunConfig::dt_grid)
        .def_readwrite("shots_per_pair", &RunConfig::shots_per_pair)
        .def_readwrite("states", &RunConfig::states)
        .def_readwrite("trotter_steps", &RunConfig::trotter_steps)
        .def_readwrite("gate_budget", &RunConfig::gate_budget)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("baseline", &RunConfig::baseline)
        .def_readwrite("n_roots", &RunConfig::n_roots)
        .def_readwrite("oniom_sidecar_path", &RunConfig::oniom_sidecar_path)
        .def_readwrite("with_oracle", &RunConfig::with_oracle)
        .def_readwrite("dump_hamiltonian", &RunConfig::dump_hamiltonian)
        .def_readwrite("resume", &RunConfig::resume);

    m.def("validate_config", &validate);
    m.def("run_pipeline", &run);
    m.def("parse_config_file", &parse_config_file);

    m.attr("__version__") = kVersion;
}
