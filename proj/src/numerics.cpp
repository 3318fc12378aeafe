#include "interferolab/numerics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace interferolab {

PseudoinverseResult pseudoinverse_full(const ComplexMatrix& a, double rcond) {
    if (!(rcond > 0.0 && rcond < 1.0))
        throw DomainError("rcond must lie in (0, 1)");

    PseudoinverseResult result;
    if (a.size() == 0) {
        result.pinv = ComplexMatrix::Zero(a.cols(), a.rows());
        result.singular_values = Eigen::VectorXd();
        return result;
    }

    Eigen::BDCSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    result.singular_values = sigma;

    const double cutoff = sigma.size() > 0 ? rcond * sigma(0) : 0.0;
    Eigen::VectorXd inv_sigma = Eigen::VectorXd::Zero(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > cutoff && sigma(i) > 0.0) {
            inv_sigma(i) = 1.0 / sigma(i);
            ++result.rank;
        }
    }
    result.pinv = svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().adjoint();
    return result;
}

ComplexMatrix pseudoinverse(const ComplexMatrix& a, double rcond) {
    return pseudoinverse_full(a, rcond).pinv;
}

namespace {

bool finite(double x) { return std::isfinite(x); }

bool finite(const RealVector& v) { return v.allFinite(); }

}  // namespace

BfgsResult bfgs_minimize(const Objective& f, RealVector x0, int max_iters,
                         double grad_tol) {
    const Eigen::Index n = x0.size();
    constexpr double kArmijo = 1e-4;

    RealVector grad(n);
    double fx = f(x0, &grad);

    BfgsResult best;
    best.x = x0;
    best.value = fx;
    if (!finite(fx) || !finite(grad)) return best;  // converged=false, x0 back

    RealVector x = x0;
    RealMatrix hinv = RealMatrix::Identity(n, n);
    bool hinv_scaled = false;

    for (int iter = 0; iter < max_iters; ++iter) {
        if (grad.cwiseAbs().maxCoeff() < grad_tol) {
            best.converged = true;
            return best;
        }

        RealVector direction = -(hinv * grad);
        double slope = direction.dot(grad);
        if (!(slope < 0.0)) {
            // Curvature information went bad; restart from steepest descent.
            hinv.setIdentity();
            hinv_scaled = false;
            direction = -grad;
            slope = direction.dot(grad);
            if (!(slope < 0.0)) return best;  // gradient is zero or non-finite
        }

        // Backtracking Armijo line search with quadratic interpolation.
        double step = 1.0;
        double fx_new = std::numeric_limits<double>::infinity();
        RealVector x_new;
        bool accepted = false;
        for (int backtracks = 0; backtracks < 60; ++backtracks) {
            x_new = x + step * direction;
            fx_new = f(x_new, nullptr);
            if (finite(fx_new) && fx_new <= fx + kArmijo * step * slope) {
                accepted = true;
                break;
            }
            double next = step * 0.5;
            if (finite(fx_new)) {
                // Minimizer of the quadratic through f(x), slope, f(x+step·d).
                const double denom = fx_new - fx - step * slope;
                if (denom > 0) next = -slope * step * step / (2.0 * denom);
            }
            step = std::clamp(next, 0.1 * step, 0.5 * step);
        }
        if (accepted && step == 1.0) {
            // greedy expansion while the sufficient-decrease bound keeps improving
            for (double grow = 2.0; grow <= 8.0; grow *= 2.0) {
                const RealVector x_try = x + grow * direction;
                const double fx_try = f(x_try, nullptr);
                if (!finite(fx_try) || fx_try >= fx_new ||
                    fx_try > fx + kArmijo * grow * slope)
                    break;
                step = grow;
                x_new = x_try;
                fx_new = fx_try;
            }
        }
        best.iterations = iter + 1;
        if (!accepted) return best;  // no decrease along this direction

        RealVector grad_new(n);
        const double fx_check = f(x_new, &grad_new);
        if (!finite(fx_check) || !finite(grad_new)) return best;

        const RealVector s = x_new - x;
        const RealVector y = grad_new - grad;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (!hinv_scaled) {
                // Scale the initial metric to the observed curvature before
                // the first update.
                hinv = (sy / y.squaredNorm()) * RealMatrix::Identity(n, n);
                hinv_scaled = true;
            }
            // Inverse-Hessian BFGS update.
            const double rho = 1.0 / sy;
            const RealVector hy = hinv * y;
            const double yhy = y.dot(hy);
            hinv.noalias() += (rho * rho * yhy + rho) * (s * s.transpose());
            hinv.noalias() -= rho * (hy * s.transpose() + s * hy.transpose());
        }

        x = x_new;
        fx = fx_new;
        grad = grad_new;
        if (fx < best.value) {
            best.value = fx;
            best.x = x;
        }
    }
    best.converged = grad.cwiseAbs().maxCoeff() < grad_tol;
    return best;
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
    const std::size_t n = points.size();
    if (n < 3) throw DomainError("power-law fit needs at least 3 points");

    double sx = 0, sy = 0;
    for (const auto& [m, y] : points) {
        if (!(m > 0.0) || !(y > 0.0))
            throw DomainError("power-law fit requires positive coordinates");
        sx += std::log(m);
        sy += std::log(y);
    }
    const double xbar = sx / static_cast<double>(n);
    const double ybar = sy / static_cast<double>(n);

    double sxx = 0, sxy = 0;
    for (const auto& [m, y] : points) {
        const double dx = std::log(m) - xbar;
        sxx += dx * dx;
        sxy += dx * (std::log(y) - ybar);
    }
    if (sxx <= 0.0) throw DomainError("power-law fit needs distinct abscissae");

    const double slope = sxy / sxx;
    const double intercept = ybar - slope * xbar;

    double ss_res = 0;
    for (const auto& [m, y] : points) {
        const double r = std::log(y) - (intercept + slope * std::log(m));
        ss_res += r * r;
    }
    // Standard slope-variance formula; exact fits give stderr 0.
    const double var_slope =
        n > 2 ? ss_res / (static_cast<double>(n) - 2.0) / sxx : 0.0;

    PowerLawFit fit;
    fit.amplitude = std::exp(intercept);
    fit.exponent = -slope;
    fit.stderr_exponent = std::sqrt(std::max(0.0, var_slope));
    return fit;
}

}  // namespace interferolab
