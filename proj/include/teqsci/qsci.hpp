#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "teqsci/integrals.hpp"
#include "teqsci/oracle.hpp"
#include "teqsci/selection.hpp"

namespace teqsci {

// Symmetric subspace Hamiltonian, stored as upper-triangle sparse rows.
class SubspaceMatrix {
  public:
    SubspaceMatrix() = default;
    explicit SubspaceMatrix(int dimension);

    int dimension() const { return static_cast<int>(rows_.size()); }
    void set(int i, int j, double value);  // i <= j
    double diagonal(int i) const { return diagonal_[i]; }
    const std::vector<double>& diagonal() const { return diagonal_; }

    void matvec(std::span<const double> x, std::span<double> y) const;
    Eigen::VectorXd matvec(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd dense() const;
    std::size_t nonzeros() const;

  private:
    std::vector<std::vector<std::pair<int, double>>> rows_;  // j >= i, j > i entries
    std::vector<double> diagonal_;
};

struct SolverOptions {
    int dense_threshold = 512;
    double residual_tol = 1e-8;
    int max_iterations = 200;
    int max_subspace = 0;  // 0: pick from n_roots
};

struct EigenSolution {
    std::vector<double> eigenvalues;  // ascending
    Eigen::MatrixXd eigenvectors;     // dimension x n_roots, orthonormal
    int iterations = 0;               // 0 for the dense path
    std::vector<double> residuals;
};

// H^QSCI: entry (i,j) = <x_i|H|x_j> over the configuration set, Slater-Condon
// rules in the determinant basis. All configurations must sit in the table's
// (N, ms2) sector.
SubspaceMatrix build_subspace_hamiltonian(const IntegralTable& table,
                                          const ConfigurationSet& configs);
SubspaceMatrix build_subspace_hamiltonian(const IntegralTable& table,
                                          std::span<const Determinant> configs);

// Lowest n_roots eigenpairs: dense below options.dense_threshold, Davidson
// (diagonal preconditioner, full reorthogonalization) above. Residuals
// ||Hv - lambda v|| are checked against options.residual_tol; non-convergence
// throws with the achieved residuals in the message.
EigenSolution solve(const SubspaceMatrix& matrix, int n_roots, const SolverOptions& options = {});

struct SubspaceResult {
    ConfigurationSet configurations;
    std::vector<double> eigenvalues;
    Eigen::MatrixXd eigenvectors;  // |configs| x n_roots, column per root
    int n_roots = 0;
    int n_electrons = 0;
    int ms2 = 0;

    std::string to_json(int top_k = 10) const;
};

SubspaceResult qsci_energies(const IntegralTable& table, const ConfigurationSet& configs,
                             int n_roots, const SolverOptions& options = {});

}  // namespace teqsci
