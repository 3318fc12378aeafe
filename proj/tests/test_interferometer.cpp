#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

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

// Chain-multiplication oracle written against plain loops, independent of the
// production matrix-product path.
ComplexMatrix naive_matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out = ComplexMatrix::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
            for (Eigen::Index k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
    return out;
}

ComplexMatrix phase_diag(const RealVector& phases, int n) {
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) d(k, k) = std::exp(Complex(0, phases(k)));
    return d;
}

ComplexMatrix chain_oracle(const Architecture& arch, const PhaseConfig& phases) {
    const int n = arch.modes;
    ComplexMatrix u = phase_diag(phases.values.row(0), n);
    for (int l = 1; l < arch.phase_layers; ++l) {
        u = naive_matmul(arch.basis[static_cast<std::size_t>(l - 1)], u);
        u = naive_matmul(phase_diag(phases.values.row(l), n), u);
    }
    return u;
}

}  // namespace

TEST_CASE("forward_unitary: identity architecture with zero phases is the identity") {
    const Architecture arch = identity_arch(2, 2);
    const PhaseConfig phases(RealMatrix::Zero(2, 2));
    const ComplexMatrix u = forward_unitary(arch, phases);
    CHECK((u - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward_unitary: diagonal phase product") {
    const Architecture arch = identity_arch(2, 2);
    RealMatrix values(2, 2);
    values << kPi / 2, 0.0,  // layer 1
        0.0, 0.0;            // layer 2
    const ComplexMatrix u = forward_unitary(arch, PhaseConfig(values));
    CHECK(std::abs(u(0, 0) - Complex(0, 1)) < 1e-15);
    CHECK(std::abs(u(1, 1) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(u(0, 1)) == 0.0);
    CHECK(std::abs(u(1, 0)) == 0.0);
}

TEST_CASE("forward_unitary matches the naive chain-multiplication oracle") {
    Rng rng = make_rng(123);
    const Architecture arch = sample_random_arch(3, 4, rng);
    const PhaseConfig phases = sample_uniform_phases(3, 4, rng);
    const ComplexMatrix diff = forward_unitary(arch, phases) - chain_oracle(arch, phases);
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("forward_unitary: L=2 triple-product oracle") {
    Rng rng = make_rng(5);
    const Architecture arch = sample_random_arch(4, 2, rng);
    const PhaseConfig phases = sample_uniform_phases(4, 2, rng);
    const ComplexMatrix expected = naive_matmul(
        phase_diag(phases.values.row(1), 4),
        naive_matmul(arch.basis[0], phase_diag(phases.values.row(0), 4)));
    CHECK((forward_unitary(arch, phases) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("forward_unitary outputs are unitary and 2pi-periodic") {
    Rng rng = make_rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);
        const int l = 2 + static_cast<int>(rng() % 4);
        const Architecture arch = sample_random_arch(n, l, rng);
        const PhaseConfig phases = sample_uniform_phases(n, l, rng);
        const ComplexMatrix u = forward_unitary(arch, phases);
        CHECK(unitarity_defect(u) < 1e-12);

        PhaseConfig shifted = phases;
        shifted.values(static_cast<int>(rng() % l), static_cast<int>(rng() % n)) += 2 * kPi;
        CHECK((forward_unitary(arch, shifted) - u).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("forward_unitary rejects mismatched shapes") {
    const Architecture arch = identity_arch(2, 2);
    CHECK_THROWS_AS(forward_unitary(arch, PhaseConfig(RealMatrix::Zero(3, 2))), ShapeError);
    CHECK_THROWS_AS(forward_unitary(arch, PhaseConfig(RealMatrix::Zero(2, 3))), ShapeError);
}

TEST_CASE("add_tomography_noise: eps=0 returns the input bitwise") {
    Rng rng = make_rng(1);
    const ComplexMatrix u = sample_haar_unitary(3, rng);
    const ComplexMatrix noisy = add_tomography_noise(u, 0.0, rng);
    CHECK((noisy.array() == u.array()).all());
}

TEST_CASE("add_tomography_noise: perturbation second moment is eps^2") {
    Rng rng = make_rng(2);
    const ComplexMatrix zero = ComplexMatrix::Zero(1000, 1000);
    const ComplexMatrix noisy = add_tomography_noise(zero, 0.1, rng);
    const double mean_sq = noisy.cwiseAbs2().sum() / static_cast<double>(noisy.size());
    CHECK(mean_sq > 0.0099);
    CHECK(mean_sq < 0.0101);
}

TEST_CASE("add_tomography_noise: fixed seed reproduces the output") {
    Rng rng_a = make_rng(42);
    Rng rng_b = make_rng(42);
    const ComplexMatrix u = ComplexMatrix::Identity(4, 4);
    const ComplexMatrix a = add_tomography_noise(u, 0.3, rng_a);
    const ComplexMatrix b = add_tomography_noise(u, 0.3, rng_b);
    CHECK((a.array() == b.array()).all());
}

TEST_CASE("add_tomography_noise rejects negative eps") {
    Rng rng = make_rng(3);
    CHECK_THROWS_AS(add_tomography_noise(ComplexMatrix::Identity(2, 2), -0.1, rng), DomainError);
}

TEST_CASE("sample_haar_unitary: 1x1 case is a unit-modulus scalar") {
    Rng rng = make_rng(4);
    const ComplexMatrix q = sample_haar_unitary(1, rng);
    CHECK(std::abs(std::abs(q(0, 0)) - 1.0) < 1e-14);
}

TEST_CASE("sample_haar_unitary: unitarity") {
    Rng rng = make_rng(5);
    for (int trial = 0; trial < 10; ++trial)
        CHECK(unitarity_defect(sample_haar_unitary(4, rng)) < 1e-12);
}

TEST_CASE("sample_haar_unitary: Haar first-moment |q11|^2 = 1/n") {
    Rng rng = make_rng(6);
    double total = 0.0;
    const int samples = 100000;
    for (int s = 0; s < samples; ++s) {
        const ComplexMatrix q = sample_haar_unitary(2, rng);
        total += std::norm(q(0, 0));
    }
    const double mean = total / samples;
    CHECK(mean > 0.495);
    CHECK(mean < 0.505);
}

TEST_CASE("sample_haar_unitary and sample_random_arch are pure in the seed") {
    Rng a = make_rng(9);
    Rng b = make_rng(9);
    CHECK((sample_haar_unitary(3, a).array() == sample_haar_unitary(3, b).array()).all());

    Rng c = make_rng(10);
    Rng d = make_rng(10);
    const Architecture arch_c = sample_random_arch(3, 4, c);
    const Architecture arch_d = sample_random_arch(3, 4, d);
    CHECK(arch_c.hash() == arch_d.hash());
    for (std::size_t i = 0; i < arch_c.basis.size(); ++i)
        CHECK((arch_c.basis[i].array() == arch_d.basis[i].array()).all());
}

TEST_CASE("sample_random_arch: basis count and unitarity") {
    Rng rng = make_rng(11);
    const Architecture arch = sample_random_arch(3, 4, rng);
    CHECK(arch.basis.size() == 3);
    for (const ComplexMatrix& u : arch.basis) CHECK(unitarity_defect(u) < 1e-12);

    const Architecture minimal = sample_random_arch(2, 2, rng);
    CHECK(minimal.basis.size() == 1);

    CHECK_THROWS_AS(sample_random_arch(2, 1, rng), DomainError);
}

TEST_CASE("sample_uniform_phases: range and mean") {
    Rng rng = make_rng(12);
    double total = 0.0;
    long count = 0;
    for (int draw = 0; draw < 2500; ++draw) {
        const PhaseConfig config = sample_uniform_phases(20, 20, rng);
        CHECK(config.values.minCoeff() >= 0.0);
        CHECK(config.values.maxCoeff() < 2 * kPi);
        total += config.values.sum();
        count += config.values.size();
    }
    const double mean = total / static_cast<double>(count);  // 10^6 draws
    CHECK(mean > kPi - 0.01);
    CHECK(mean < kPi + 0.01);

    Rng a = make_rng(13);
    Rng b = make_rng(13);
    CHECK((sample_uniform_phases(3, 4, a).values.array() ==
           sample_uniform_phases(3, 4, b).values.array())
              .all());
}

TEST_CASE("generate_training_set: noiseless samples equal the forward model") {
    Rng rng = make_rng(14);
    const Architecture arch = sample_random_arch(3, 3, rng);
    const TrainingSet training = generate_training_set(arch, 5, 0.0, rng);
    CHECK(training.size() == 5);
    CHECK(training.architecture_hash == arch.hash());
    for (const TrainingSample& s : training.samples)
        CHECK((s.matrix.array() == forward_unitary(arch, s.phases).array()).all());
}

TEST_CASE("generate_training_set: singleton and size errors") {
    Rng rng = make_rng(15);
    const Architecture arch = sample_random_arch(2, 2, rng);
    CHECK(generate_training_set(arch, 1, 0.0, rng).size() == 1);
    CHECK_THROWS_AS(generate_training_set(arch, 0, 0.0, rng), DomainError);
}

TEST_CASE("generate_training_set: noise variance statistic") {
    Rng rng = make_rng(16);
    const Architecture arch = sample_random_arch(3, 3, rng);
    const double eps = 0.05;
    const TrainingSet training = generate_training_set(arch, 100, eps, rng);
    double total = 0.0;
    long entries = 0;
    for (const TrainingSample& s : training.samples) {
        total += (s.matrix - forward_unitary(arch, s.phases)).cwiseAbs2().sum();
        entries += s.matrix.size();
    }
    const double mean_sq = total / static_cast<double>(entries);
    CHECK(mean_sq > 0.8 * eps * eps);
    CHECK(mean_sq < 1.2 * eps * eps);
}

TEST_CASE("architecture hash distinguishes architectures") {
    Rng rng = make_rng(17);
    const Architecture a = sample_random_arch(3, 4, rng);
    const Architecture b = sample_random_arch(3, 4, rng);
    CHECK(a.hash() != b.hash());
    CHECK(a.hash().size() == 16);
}
