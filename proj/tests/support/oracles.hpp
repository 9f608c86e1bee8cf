#pragma once

#include <array>
#include <vector>

namespace testsupport {

/// Eigenvalues of a dense symmetric matrix (row-major, n x n) from Eigen's
/// self-adjoint solver, descending.
std::vector<double> reference_eigenvalues(const std::vector<double>& a, std::size_t n);

/// Linear-kernel SVM dual solved by enumerating, for every multiplier, the
/// states {0, C, free} and solving the equality-constrained stationarity
/// system on each face. Exponential in n; meant for n <= 8.
struct DualOptimum {
    double objective = 0.0;
    std::vector<double> alphas;
};

DualOptimum brute_force_dual(const std::vector<std::vector<double>>& x, const std::vector<int>& y, double C);

/// Gaussian naive Bayes computed directly from the definition: sample
/// variances with the floor 1e-9 * max overall feature variance (at least
/// 1e-12), frequency priors, and normalised posteriors.
/// labels[i] is 0 or 1; returns P(class | query) for both classes.
std::array<double, 2> brute_force_nb_posterior(const std::vector<std::vector<double>>& x,
                                               const std::vector<int>& labels, const std::vector<double>& query);

}  // namespace testsupport
