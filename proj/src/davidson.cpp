#include "teqsci/davidson.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "teqsci/common.hpp"

namespace teqsci {

namespace {

// Two Gram-Schmidt passes against the columns of V, then normalize.
// Returns false when the vector is numerically inside span(V).
bool orthonormalize_against(Eigen::VectorXd& t, const Eigen::MatrixXd& v, int n_cols) {
    for (int pass = 0; pass < 2; ++pass) {
        for (int c = 0; c < n_cols; ++c) {
            t -= v.col(c).dot(t) * v.col(c);
        }
    }
    const double norm = t.norm();
    if (norm < 1e-10) return false;
    t /= norm;
    return true;
}

}  // namespace

DavidsonResult davidson(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& matvec,
                        const std::vector<double>& diagonal, int n_roots,
                        const DavidsonOptions& options) {
    const int dim = static_cast<int>(diagonal.size());
    require(n_roots >= 1 && n_roots <= dim, "n_roots out of range");

    const int n_guess = std::min(dim, std::max(2 * n_roots, n_roots + 4));
    const int max_sub =
        options.max_subspace > 0 ? std::min(options.max_subspace, dim)
                                 : std::min(dim, std::max(8 * n_roots, 48));

    // Guess: unit vectors on the lowest diagonal entries.
    std::vector<int> order(static_cast<std::size_t>(dim));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return diagonal[a] < diagonal[b]; });

    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(dim, max_sub);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dim, max_sub);
    int n_cols = 0;
    for (int g = 0; g < n_guess; ++g) {
        Eigen::VectorXd t = Eigen::VectorXd::Zero(dim);
        t[order[static_cast<std::size_t>(g)]] = 1.0;
        if (orthonormalize_against(t, v, n_cols)) {
            v.col(n_cols) = t;
            w.col(n_cols) = matvec(t);
            ++n_cols;
        }
    }

    DavidsonResult result;
    Eigen::MatrixXd ritz_vectors;
    Eigen::VectorXd ritz_values;

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        result.iterations = iter;

        const Eigen::MatrixXd g =
            v.leftCols(n_cols).transpose() * w.leftCols(n_cols);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
        ritz_values = es.eigenvalues().head(n_roots);
        ritz_vectors = v.leftCols(n_cols) * es.eigenvectors().leftCols(n_roots);
        const Eigen::MatrixXd hx = w.leftCols(n_cols) * es.eigenvectors().leftCols(n_roots);

        result.residuals.assign(static_cast<std::size_t>(n_roots), 0.0);
        bool all_converged = true;
        std::vector<Eigen::VectorXd> new_directions;
        for (int k = 0; k < n_roots; ++k) {
            Eigen::VectorXd r = hx.col(k) - ritz_values[k] * ritz_vectors.col(k);
            const double rnorm = r.norm();
            result.residuals[static_cast<std::size_t>(k)] = rnorm;
            if (rnorm < options.residual_tol) continue;
            all_converged = false;
            // Diagonal preconditioner with a clamp near zero denominators.
            for (int i = 0; i < dim; ++i) {
                double denom = diagonal[static_cast<std::size_t>(i)] - ritz_values[k];
                if (std::abs(denom) < 1e-8) denom = denom < 0 ? -1e-8 : 1e-8;
                r[i] /= denom;
            }
            new_directions.push_back(std::move(r));
        }

        if (all_converged) {
            result.converged = true;
            break;
        }

        if (n_cols + static_cast<int>(new_directions.size()) > max_sub) {
            // Thick restart from the current Ritz vectors (plus a few extra).
            const int n_keep = std::min(n_cols, std::min(max_sub - 1, n_roots + 2));
            const Eigen::MatrixXd keep =
                v.leftCols(n_cols) * es.eigenvectors().leftCols(n_keep);
            const Eigen::MatrixXd keep_w =
                w.leftCols(n_cols) * es.eigenvectors().leftCols(n_keep);
            v.leftCols(n_keep) = keep;
            w.leftCols(n_keep) = keep_w;
            n_cols = n_keep;
        }

        bool expanded = false;
        for (auto& t : new_directions) {
            if (n_cols >= max_sub) break;
            if (orthonormalize_against(t, v, n_cols)) {
                v.col(n_cols) = t;
                w.col(n_cols) = matvec(v.col(n_cols));
                ++n_cols;
                expanded = true;
            }
        }
        if (!expanded) {
            // Preconditioned residuals collapsed onto the subspace; treat the
            // current Ritz pairs as converged to working precision.
            result.converged =
                *std::max_element(result.residuals.begin(), result.residuals.end()) <
                std::max(options.residual_tol, 1e-7);
            break;
        }
    }

    result.eigenvalues.assign(ritz_values.data(), ritz_values.data() + n_roots);
    result.eigenvectors = ritz_vectors;
    return result;
}

}  // namespace teqsci
