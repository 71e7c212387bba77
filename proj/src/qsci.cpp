#include "teqsci/qsci.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "teqsci/common.hpp"
#include "teqsci/davidson.hpp"

namespace teqsci {

SubspaceMatrix::SubspaceMatrix(int dimension)
    : rows_(static_cast<std::size_t>(dimension)), diagonal_(static_cast<std::size_t>(dimension), 0.0) {}

void SubspaceMatrix::set(int i, int j, double value) {
    require(i >= 0 && j >= i && j < dimension(), "index out of range");
    if (i == j) {
        diagonal_[static_cast<std::size_t>(i)] = value;
    } else if (value != 0.0) {
        rows_[static_cast<std::size_t>(i)].push_back({j, value});
    }
}

void SubspaceMatrix::matvec(std::span<const double> x, std::span<double> y) const {
    const int n = dimension();
    require(static_cast<int>(x.size()) == n && static_cast<int>(y.size()) == n,
            "dimension mismatch");
    for (int i = 0; i < n; ++i) y[i] = diagonal_[static_cast<std::size_t>(i)] * x[i];
    for (int i = 0; i < n; ++i) {
        for (const auto& [j, v] : rows_[static_cast<std::size_t>(i)]) {
            y[i] += v * x[j];
            y[j] += v * x[i];
        }
    }
}

Eigen::VectorXd SubspaceMatrix::matvec(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(dimension());
    matvec(std::span<const double>(x.data(), x.size()), std::span<double>(y.data(), y.size()));
    return y;
}

Eigen::MatrixXd SubspaceMatrix::dense() const {
    const int n = dimension();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = diagonal_[static_cast<std::size_t>(i)];
        for (const auto& [j, v] : rows_[static_cast<std::size_t>(i)]) {
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

std::size_t SubspaceMatrix::nonzeros() const {
    std::size_t n = diagonal_.size();
    for (const auto& row : rows_) n += 2 * row.size();
    return n;
}

SubspaceMatrix build_subspace_hamiltonian(const IntegralTable& table,
                                          std::span<const Determinant> configs) {
    const int n = static_cast<int>(configs.size());
    require(n > 0, "configuration set is empty");
    for (const auto& d : configs) {
        require(d.n_spin_orbitals == 2 * table.n_orbitals(), "configuration width mismatch");
        require(d.n_electrons() == table.n_electrons(),
                "configuration outside the particle-number sector");
        require(d.sz2() == table.ms2(), "configuration outside the Sz sector");
    }
    SubspaceMatrix h(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            if (std::popcount(configs[static_cast<std::size_t>(i)].bits ^
                              configs[static_cast<std::size_t>(j)].bits) > 4) {
                continue;
            }
            const double v = slater_condon(table, configs[static_cast<std::size_t>(i)],
                                           configs[static_cast<std::size_t>(j)]);
            if (i == j || v != 0.0) h.set(i, j, v);
        }
    }
    return h;
}

SubspaceMatrix build_subspace_hamiltonian(const IntegralTable& table,
                                          const ConfigurationSet& configs) {
    return build_subspace_hamiltonian(
        table, std::span<const Determinant>(configs.members().data(), configs.members().size()));
}

EigenSolution solve(const SubspaceMatrix& matrix, int n_roots, const SolverOptions& options) {
    const int dim = matrix.dimension();
    require(n_roots >= 1 && n_roots <= dim, "n_roots exceeds subspace dimension");

    EigenSolution out;
    if (dim <= options.dense_threshold) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix.dense());
        out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n_roots);
        out.eigenvectors = es.eigenvectors().leftCols(n_roots);
    } else {
        DavidsonOptions dopts;
        dopts.residual_tol = options.residual_tol;
        dopts.max_iterations = options.max_iterations;
        dopts.max_subspace = options.max_subspace;
        const DavidsonResult res = davidson(
            [&matrix](const Eigen::VectorXd& x) { return matrix.matvec(x); },
            matrix.diagonal(), n_roots, dopts);
        if (!res.converged) {
            std::ostringstream msg;
            msg << "eigensolver did not converge after " << res.iterations
                << " iterations; achieved residuals:";
            for (double r : res.residuals) msg << " " << r;
            throw std::runtime_error(msg.str());
        }
        out.eigenvalues = res.eigenvalues;
        out.eigenvectors = res.eigenvectors;
        out.iterations = res.iterations;
    }

    out.residuals.resize(static_cast<std::size_t>(n_roots));
    for (int k = 0; k < n_roots; ++k) {
        const Eigen::VectorXd r =
            matrix.matvec(out.eigenvectors.col(k)) - out.eigenvalues[static_cast<std::size_t>(k)] * out.eigenvectors.col(k);
        out.residuals[static_cast<std::size_t>(k)] = r.norm();
    }
    return out;
}

SubspaceResult qsci_energies(const IntegralTable& table, const ConfigurationSet& configs,
                             int n_roots, const SolverOptions& options) {
    SubspaceResult result;
    result.configurations = configs;
    result.n_roots = n_roots;
    result.n_electrons = table.n_electrons();
    result.ms2 = table.ms2();

    const SubspaceMatrix h = build_subspace_hamiltonian(table, configs);
    EigenSolution sol = solve(h, n_roots, options);

    // Deterministic output under degeneracy: fix each eigenvector's sign by
    // its largest-|coefficient| entry (first such index on ties), then order
    // degenerate roots by their leading configuration.
    std::vector<int> leading(static_cast<std::size_t>(n_roots), 0);
    for (int k = 0; k < n_roots; ++k) {
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < sol.eigenvectors.rows(); ++i) {
            const double a = std::abs(sol.eigenvectors(i, k));
            if (a > best + 1e-14) {
                best = a;
                arg = i;
            }
        }
        if (sol.eigenvectors(arg, k) < 0.0) sol.eigenvectors.col(k) *= -1.0;
        leading[static_cast<std::size_t>(k)] = arg;
    }
    std::vector<int> root_order(static_cast<std::size_t>(n_roots));
    for (int k = 0; k < n_roots; ++k) root_order[static_cast<std::size_t>(k)] = k;
    std::stable_sort(root_order.begin(), root_order.end(), [&](int a, int b) {
        const double ea = sol.eigenvalues[static_cast<std::size_t>(a)];
        const double eb = sol.eigenvalues[static_cast<std::size_t>(b)];
        if (std::abs(ea - eb) > 1e-12) return ea < eb;
        return configs.members()[static_cast<std::size_t>(leading[static_cast<std::size_t>(a)])].bits <
               configs.members()[static_cast<std::size_t>(leading[static_cast<std::size_t>(b)])].bits;
    });
    result.eigenvalues.resize(static_cast<std::size_t>(n_roots));
    result.eigenvectors.resize(sol.eigenvectors.rows(), n_roots);
    for (int k = 0; k < n_roots; ++k) {
        result.eigenvalues[static_cast<std::size_t>(k)] =
            sol.eigenvalues[static_cast<std::size_t>(root_order[static_cast<std::size_t>(k)])];
        result.eigenvectors.col(k) = sol.eigenvectors.col(root_order[static_cast<std::size_t>(k)]);
    }
    return result;
}

std::string SubspaceResult::to_json(int top_k) const {
    std::ostringstream out;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "{\"n_roots\":" << n_roots << ",\"n_electrons\":" << n_electrons
        << ",\"ms2\":" << ms2 << ",\"dimension\":" << configurations.size();
    out << ",\"eigenvalues\":[";
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        if (k) out << ",";
        out << num(eigenvalues[k]);
    }
    out << "],\"roots\":[";
    for (int k = 0; k < n_roots; ++k) {
        if (k) out << ",";
        // Top-k configurations by |coefficient|.
        std::vector<int> order(configurations.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(eigenvectors(a, k)) > std::abs(eigenvectors(b, k));
        });
        out << "{\"leading\":[";
        const int kk = std::min<int>(top_k, static_cast<int>(order.size()));
        for (int t = 0; t < kk; ++t) {
            if (t) out << ",";
            const int i = order[static_cast<std::size_t>(t)];
            out << "{\"bits\":\"" << configurations.members()[static_cast<std::size_t>(i)].to_string()
                << "\",\"coefficient\":" << num(eigenvectors(i, k)) << "}";
        }
        out << "]}";
    }
    out << "]}";
    return out.str();
}

}  // namespace teqsci
