#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "interferolab/numerics.hpp"
#include "interferolab/rng.hpp"

#include <cmath>
#include <limits>

using namespace interferolab;

namespace {

ComplexMatrix random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            m(i, j) = Complex(re, im);
        }
    return m;
}

void check_penrose(const ComplexMatrix& a, const ComplexMatrix& pinv) {
    const double scale_a = std::max(1.0, a.cwiseAbs().maxCoeff());
    const double scale_p = std::max(1.0, pinv.cwiseAbs().maxCoeff());
    CHECK((a * pinv * a - a).cwiseAbs().maxCoeff() < 1e-10 * scale_a);
    CHECK((pinv * a * pinv - pinv).cwiseAbs().maxCoeff() < 1e-10 * scale_p);
    const ComplexMatrix ap = a * pinv;
    const ComplexMatrix pa = pinv * a;
    CHECK((ap - ap.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pa - pa.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
}

}  // namespace

TEST_CASE("pseudoinverse: identity and rank-deficient diagonal") {
    const ComplexMatrix eye = ComplexMatrix::Identity(3, 3);
    CHECK((pseudoinverse(eye) - eye).cwiseAbs().maxCoeff() < 1e-14);

    ComplexMatrix diag = ComplexMatrix::Zero(2, 2);
    diag(0, 0) = 2.0;
    const ComplexMatrix pinv = pseudoinverse(diag);
    CHECK(std::abs(pinv(0, 0) - Complex(0.5, 0)) < 1e-15);
    CHECK(std::abs(pinv(1, 1)) == 0.0);
    CHECK(pseudoinverse_full(diag).rank == 1);
}

TEST_CASE("pseudoinverse satisfies the four Penrose conditions") {
    Rng rng = make_rng(90);
    // both orientations
    const ComplexMatrix tall = random_complex(20, 8, rng);
    check_penrose(tall, pseudoinverse(tall));
    const ComplexMatrix wide = random_complex(6, 17, rng);
    check_penrose(wide, pseudoinverse(wide));
    // exactly rank-deficient: duplicate columns
    ComplexMatrix deficient(10, 6);
    deficient.leftCols(3) = random_complex(10, 3, rng);
    deficient.rightCols(3) = deficient.leftCols(3);
    check_penrose(deficient, pseudoinverse(deficient));
    CHECK(pseudoinverse_full(deficient).rank == 3);
}

TEST_CASE("pseudoinverse is an involution on full-rank matrices") {
    Rng rng = make_rng(91);
    const ComplexMatrix a = random_complex(9, 5, rng);
    CHECK((pseudoinverse(pseudoinverse(a)) - a).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("pseudoinverse validates rcond") {
    CHECK_THROWS_AS(pseudoinverse(ComplexMatrix::Identity(2, 2), 0.0), DomainError);
    CHECK_THROWS_AS(pseudoinverse(ComplexMatrix::Identity(2, 2), 1.5), DomainError);
}

TEST_CASE("bfgs_minimize: exact on a quadratic within 10 iterations") {
    RealVector c(4);
    c << 1.0, -2.0, 3.0, 0.5;
    Objective quadratic = [&](const RealVector& x, RealVector* grad) {
        if (grad != nullptr) *grad = 2.0 * (x - c);
        return (x - c).squaredNorm();
    };
    const BfgsResult result = bfgs_minimize(quadratic, RealVector::Zero(4), 10, 1e-10);
    CHECK(result.converged);
    CHECK(result.iterations <= 10);
    CHECK((result.x - c).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("bfgs_minimize: Rosenbrock from the classic start") {
    Objective rosenbrock = [](const RealVector& x, RealVector* grad) {
        const double a = 1 - x(0);
        const double b = x(1) - x(0) * x(0);
        if (grad != nullptr) {
            (*grad)(0) = -2 * a - 400 * x(0) * b;
            (*grad)(1) = 200 * b;
        }
        return a * a + 100 * b * b;
    };
    RealVector x0(2);
    x0 << -1.2, 1.0;
    const BfgsResult result = bfgs_minimize(rosenbrock, x0, 200, 1e-10);
    CHECK(result.value < 1e-8);
    CHECK(result.iterations <= 200);
    CHECK(std::abs(result.x(0) - 1.0) < 1e-6);
    CHECK(std::abs(result.x(1) - 1.0) < 1e-6);
}

TEST_CASE("bfgs_minimize: stationary start returns immediately") {
    RealVector c(3);
    c << 0.25, -4.0, 2.0;
    Objective quadratic = [&](const RealVector& x, RealVector* grad) {
        if (grad != nullptr) *grad = 2.0 * (x - c);
        return (x - c).squaredNorm();
    };
    const BfgsResult result = bfgs_minimize(quadratic, c, 50, 1e-10);
    CHECK(result.converged);
    CHECK(result.iterations <= 1);
    CHECK((result.x - c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bfgs_minimize never returns a value above the start") {
    Rng rng = make_rng(92);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        RealVector center(5);
        for (int i = 0; i < 5; ++i) center(i) = gauss(rng);
        Objective bumpy = [&](const RealVector& x, RealVector* grad) {
            const RealVector d = x - center;
            const double f = d.squaredNorm() + std::sin(3 * d(0));
            if (grad != nullptr) {
                *grad = 2 * d;
                (*grad)(0) += 3 * std::cos(3 * d(0));
            }
            return f;
        };
        RealVector x0(5);
        for (int i = 0; i < 5; ++i) x0(i) = gauss(rng);
        const double f0 = bumpy(x0, nullptr);
        CHECK(bfgs_minimize(bumpy, x0, 30, 1e-9).value <= f0);
    }
}

TEST_CASE("bfgs_minimize survives non-finite regions by returning the best iterate") {
    Objective trap = [](const RealVector& x, RealVector* grad) {
        if (x(0) < -2.0) return std::numeric_limits<double>::quiet_NaN();
        if (grad != nullptr) (*grad)(0) = 2 * (x(0) + 1.9);
        return (x(0) + 1.9) * (x(0) + 1.9);
    };
    RealVector x0(1);
    x0 << 0.0;
    const BfgsResult result = bfgs_minimize(trap, x0, 50, 1e-10);
    CHECK(std::isfinite(result.value));
    CHECK(result.value <= trap(x0, nullptr));
}

TEST_CASE("fit_power_law recovers exact laws") {
    std::vector<std::pair<double, double>> inverse;
    std::vector<std::pair<double, double>> square;
    for (double m : {10.0, 20.0, 40.0, 80.0, 160.0}) {
        inverse.emplace_back(m, 3.0 / m);
        square.emplace_back(m, 5.0 / (m * m));
    }
    const PowerLawFit fit1 = fit_power_law(inverse);
    CHECK(std::abs(fit1.amplitude - 3.0) < 1e-10);
    CHECK(std::abs(fit1.exponent - 1.0) < 1e-10);
    CHECK(fit1.stderr_exponent < 1e-12);

    const PowerLawFit fit2 = fit_power_law(square);
    CHECK(std::abs(fit2.exponent - 2.0) < 1e-10);
}

TEST_CASE("fit_power_law is scale-equivariant in y") {
    std::vector<std::pair<double, double>> points = {
        {3.0, 0.9}, {9.0, 0.31}, {27.0, 0.12}, {81.0, 0.041}};
    std::vector<std::pair<double, double>> scaled;
    for (const auto& [m, y] : points) scaled.emplace_back(m, 7.5 * y);
    const PowerLawFit base = fit_power_law(points);
    const PowerLawFit big = fit_power_law(scaled);
    CHECK(std::abs(big.exponent - base.exponent) < 1e-12);
    CHECK(std::abs(big.amplitude - 7.5 * base.amplitude) < 1e-9 * big.amplitude);
    CHECK(std::abs(big.stderr_exponent - base.stderr_exponent) < 1e-12);
}

TEST_CASE("fit_power_law validates its input") {
    CHECK_THROWS_AS(fit_power_law({{1.0, 1.0}, {2.0, 0.5}}), DomainError);
    CHECK_THROWS_AS(fit_power_law({{1.0, 1.0}, {2.0, 0.5}, {3.0, -0.1}}), DomainError);
    CHECK_THROWS_AS(fit_power_law({{0.0, 1.0}, {2.0, 0.5}, {3.0, 0.1}}), DomainError);
}
