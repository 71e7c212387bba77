#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace teqsci {

struct DavidsonOptions {
    double residual_tol = 1e-8;
    int max_iterations = 200;
    int max_subspace = 0;  // 0: derived from n_roots
};

struct DavidsonResult {
    std::vector<double> eigenvalues;
    Eigen::MatrixXd eigenvectors;  // dim x n_roots
    std::vector<double> residuals;
    int iterations = 0;
    bool converged = false;
};

// Davidson for the lowest eigenpairs of a symmetric operator, with
// diagonal preconditioning and full (two-pass Gram-Schmidt)
// reorthogonalization of the search space.
DavidsonResult davidson(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& matvec,
                        const std::vector<double>& diagonal, int n_roots,
                        const DavidsonOptions& options = {});

}  // namespace teqsci
