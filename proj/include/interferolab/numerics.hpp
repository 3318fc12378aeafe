/*
 * Shared numerical kernels: SVD-based Moore–Penrose pseudoinverse, BFGS with
 * Armijo backtracking line search, and log-log least-squares power-law fits.
 */

#pragma once

#include "interferolab/types.hpp"

#include <functional>

namespace interferolab {

struct PseudoinverseResult {
    ComplexMatrix pinv;              // cols(a) x rows(a)
    Eigen::VectorXd singular_values; // descending, all of them
    Eigen::Index rank = 0;           // count of σ above rcond·σ_max
};

/// Moore–Penrose pseudoinverse via SVD; singular values below rcond·σ_max are
/// treated as zero. Total on finite inputs.
PseudoinverseResult pseudoinverse_full(const ComplexMatrix& a, double rcond = 1e-12);
ComplexMatrix pseudoinverse(const ComplexMatrix& a, double rcond = 1e-12);

/// Objective callback: returns f(x); when grad != nullptr also writes ∇f(x).
using Objective = std::function<double(const RealVector& x, RealVector* grad)>;

struct BfgsResult {
    RealVector x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;  // gradient max-norm fell below grad_tol
};

/// Quasi-Newton minimization with inverse-Hessian BFGS updates and a
/// backtracking Armijo line search. Monotone in f across accepted iterates;
/// returns the best point seen if the objective turns non-finite.
BfgsResult bfgs_minimize(const Objective& f, RealVector x0, int max_iters,
                         double grad_tol);

struct PowerLawFit {
    double amplitude = 0.0;        // C in y = C·m^{−k}
    double exponent = 0.0;         // k
    double stderr_exponent = 0.0;  // standard error of k from the OLS slope
};

/// Ordinary least squares on (log m, log y). All inputs must be positive and
/// at least 3 points are required.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

}  // namespace interferolab
