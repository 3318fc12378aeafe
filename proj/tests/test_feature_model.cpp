#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "interferolab/feature_model.hpp"
#include "interferolab/interferometer.hpp"

#include <cmath>
#include <numbers>

using namespace interferolab;

namespace {

constexpr double kPi = std::numbers::pi;

Architecture identity_arch(int n, int l) {
    Architecture arch;
    arch.modes = n;
    arch.phase_layers = l;
    for (int i = 0; i < l - 1; ++i) arch.basis.push_back(ComplexMatrix::Identity(n, n));
    return arch;
}

LinearModel zero_model(int n, int l) {
    LinearModel model;
    model.modes = n;
    model.phase_layers = l;
    model.weights = ComplexMatrix::Zero(static_cast<Eigen::Index>(feature_dim(n, l)),
                                        static_cast<Eigen::Index>(n) * n);
    return model;
}

}  // namespace

TEST_CASE("feature_dim matches the published thresholds") {
    CHECK(feature_dim(3, 4) == 81);
    CHECK(feature_dim(4, 5) == 1024);
    CHECK(feature_dim(2, 2) == 4);
    CHECK_THROWS_AS(feature_dim(0, 2), DomainError);
}

TEST_CASE("feature_vector: zero phases give the all-ones vector") {
    const ComplexVector f = feature_vector(PhaseConfig(RealMatrix::Zero(3, 2)));
    CHECK(f.size() == 8);
    for (Eigen::Index i = 0; i < f.size(); ++i) CHECK(std::abs(f(i) - Complex(1, 0)) == 0.0);
}

TEST_CASE("feature_vector: canonical ordering, layer-L index slowest") {
    RealMatrix values(2, 2);
    values << 0.0, kPi,  // layer 1
        0.0, 0.0;        // layer 2
    const ComplexVector f = feature_vector(PhaseConfig(values));
    // tuples (k0,k1) in order (1,1),(1,2),(2,1),(2,2) -> (1, -1, 1, -1)
    CHECK(std::abs(f(0) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(f(1) - Complex(-1, 0)) < 1e-15);
    CHECK(std::abs(f(2) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(f(3) - Complex(-1, 0)) < 1e-15);
}

TEST_CASE("feature_vector entries have unit modulus") {
    Rng rng = make_rng(21);
    const ComplexVector f = feature_vector(sample_uniform_phases(3, 4, rng));
    for (Eigen::Index i = 0; i < f.size(); ++i)
        CHECK(std::abs(std::abs(f(i)) - 1.0) < 1e-13);
}

TEST_CASE("feature map is multiplicative under phase addition") {
    Rng rng = make_rng(22);
    for (int trial = 0; trial < 10; ++trial) {
        const PhaseConfig a = sample_uniform_phases(2, 3, rng);
        const PhaseConfig b = sample_uniform_phases(2, 3, rng);
        PhaseConfig sum = a;
        sum.values += b.values;
        const ComplexVector lhs = feature_vector(sum);
        const ComplexVector rhs = feature_vector(a).cwiseProduct(feature_vector(b));
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("predict with all-zero weights is the zero matrix") {
    Rng rng = make_rng(23);
    const ComplexMatrix u = predict(zero_model(2, 2), sample_uniform_phases(2, 2, rng));
    CHECK(u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("true weights of the identity basis give a diagonal phase-sum model") {
    const Architecture arch = identity_arch(2, 2);
    const LinearModel model = true_weights_from_arch(arch);

    // Weight for (i,j) lives only at tuple (i,j) with value delta_ij.
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const Eigen::Index col = i * 2 + j;
            for (Eigen::Index f = 0; f < 4; ++f) {
                const Complex w = model.weights(f, col);
                if (f == col && i == j)
                    CHECK(std::abs(w - Complex(1, 0)) == 0.0);
                else
                    CHECK(std::abs(w) == 0.0);
            }
        }

    Rng rng = make_rng(24);
    const PhaseConfig phases = sample_uniform_phases(2, 2, rng);
    const ComplexMatrix u = predict(model, phases);
    for (int k = 0; k < 2; ++k) {
        const Complex expected = std::exp(Complex(0, phases.values(1, k) + phases.values(0, k)));
        CHECK(std::abs(u(k, k) - expected) < 1e-14);
    }
    CHECK(std::abs(u(0, 1)) == 0.0);
    CHECK(std::abs(u(1, 0)) == 0.0);
}

TEST_CASE("predict composed with true weights reproduces the forward model") {
    Rng rng = make_rng(25);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);
        const int l = 2 + static_cast<int>(rng() % 3);
        const Architecture arch = sample_random_arch(n, l, rng);
        const LinearModel model = true_weights_from_arch(arch);
        for (int probe = 0; probe < 10; ++probe) {
            const PhaseConfig phases = sample_uniform_phases(n, l, rng);
            const ComplexMatrix diff = predict(model, phases) - forward_unitary(arch, phases);
            CHECK(diff.cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("true weights are bounded by unitary entries") {
    Rng rng = make_rng(26);
    const LinearModel model = true_weights_from_arch(sample_random_arch(3, 4, rng));
    CHECK(model.weights.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("predict is linear in the weights") {
    Rng rng = make_rng(27);
    const LinearModel w1 = true_weights_from_arch(sample_random_arch(2, 3, rng));
    const LinearModel w2 = true_weights_from_arch(sample_random_arch(2, 3, rng));
    const Complex alpha(0.3, -1.2);
    const Complex beta(-0.7, 0.4);

    LinearModel mix = w1;
    mix.architecture_hash.clear();
    mix.weights = alpha * w1.weights + beta * w2.weights;

    const PhaseConfig phases = sample_uniform_phases(2, 3, rng);
    const ComplexMatrix expected =
        alpha * predict(w1, phases) + beta * predict(w2, phases);
    CHECK((predict(mix, phases) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("predict_gradient: zero weights, diagonal model, finite differences") {
    Rng rng = make_rng(28);

    // all-zero weights -> all-zero gradients
    const std::vector<ComplexMatrix> zero_grad =
        predict_gradient(zero_model(2, 2), sample_uniform_phases(2, 2, rng));
    for (const ComplexMatrix& g : zero_grad) CHECK(g.cwiseAbs().maxCoeff() == 0.0);

    // diagonal model: du11/dphi^(1)_1 = i*u11
    const LinearModel diag_model = true_weights_from_arch(identity_arch(2, 2));
    const PhaseConfig phases = sample_uniform_phases(2, 2, rng);
    const ComplexMatrix u = predict(diag_model, phases);
    const std::vector<ComplexMatrix> grad = predict_gradient(diag_model, phases);
    CHECK(std::abs(grad[0](0, 0) - Complex(0, 1) * u(0, 0)) < 1e-14);

    // random model vs central finite differences
    const int n = 3, l = 3;
    const LinearModel model = true_weights_from_arch(sample_random_arch(n, l, rng));
    const PhaseConfig base = sample_uniform_phases(n, l, rng);
    const std::vector<ComplexMatrix> analytic = predict_gradient(model, base);
    const double h = 1e-6;
    for (int layer = 0; layer < l; ++layer)
        for (int k = 0; k < n; ++k) {
            PhaseConfig up = base;
            PhaseConfig down = base;
            up.values(layer, k) += h;
            down.values(layer, k) -= h;
            const ComplexMatrix fd = (predict(model, up) - predict(model, down)) / (2 * h);
            const ComplexMatrix& an = analytic[static_cast<std::size_t>(layer) * n + k];
            const double scale = std::max(1e-12, fd.cwiseAbs().maxCoeff());
            CHECK((fd - an).cwiseAbs().maxCoeff() / scale < 1e-6);
        }
}

TEST_CASE("project_to_slice keeps the structural weights and the prediction of exact models") {
    Rng rng = make_rng(29);
    const Architecture arch = sample_random_arch(2, 3, rng);
    const LinearModel truth = true_weights_from_arch(arch);
    const LinearModel projected = project_to_slice(truth);
    CHECK((projected.weights - truth.weights).cwiseAbs().maxCoeff() == 0.0);

    // Perturb everywhere; projection must remove exactly the off-slice part.
    LinearModel noisy = truth;
    noisy.weights.array() += Complex(0.25, -0.125);
    const LinearModel cleaned = project_to_slice(noisy);
    const PhaseConfig phases = sample_uniform_phases(2, 3, rng);
    CHECK((predict(cleaned, phases) - predict(noisy, phases)).cwiseAbs().maxCoeff() > 1e-3);
    // slice positions keep the perturbed values
    for (Eigen::Index f = 0; f < truth.weights.rows(); ++f)
        for (Eigen::Index c = 0; c < truth.weights.cols(); ++c)
            if (std::abs(truth.weights(f, c)) > 0)
                CHECK(std::abs(cleaned.weights(f, c) - noisy.weights(f, c)) == 0.0);
}

TEST_CASE("predict rejects mismatched shapes") {
    Rng rng = make_rng(30);
    const LinearModel model = zero_model(2, 2);
    CHECK_THROWS_AS(predict(model, sample_uniform_phases(3, 2, rng)), ShapeError);
    CHECK_THROWS_AS(predict(model, sample_uniform_phases(2, 3, rng)), ShapeError);
}
