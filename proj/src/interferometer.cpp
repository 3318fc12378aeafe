#include "interferolab/interferometer.hpp"

#include <cmath>
#include <numbers>

namespace interferolab {

ComplexVector phase_exponentials(const RealVector& phases) {
    ComplexVector out(phases.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k)
        out(k) = Complex(std::cos(phases(k)), std::sin(phases(k)));
    return out;
}

ComplexMatrix forward_unitary(const Architecture& arch, const PhaseConfig& phases) {
    if (phases.layers() != arch.phase_layers || phases.channels() != arch.modes)
        throw ShapeError("phase config shape does not match architecture");
    if (static_cast<int>(arch.basis.size()) != arch.phase_layers - 1)
        throw ShapeError("architecture basis count does not match layer count");

    // Layer 1 first: U = Φ_L U_{L−1} … U_1 Φ_1, built by left-multiplication.
    ComplexMatrix u = phase_exponentials(phases.values.row(0)).asDiagonal();
    for (int l = 1; l < arch.phase_layers; ++l) {
        u = arch.basis[static_cast<std::size_t>(l - 1)] * u;
        u = phase_exponentials(phases.values.row(l)).asDiagonal() * u;
    }
    return u;
}

ComplexMatrix add_tomography_noise(const ComplexMatrix& u, double eps, Rng& rng) {
    if (eps < 0) throw DomainError("noise level must be nonnegative");
    if (eps == 0.0) return u;

    std::normal_distribution<double> gauss(0.0, 1.0);
    const double scale = eps / std::numbers::sqrt2;
    ComplexMatrix noisy = u;
    // Row-major draw order fixes the rng stream layout.
    for (Eigen::Index i = 0; i < u.rows(); ++i)
        for (Eigen::Index j = 0; j < u.cols(); ++j) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            noisy(i, j) += scale * Complex(re, im);
        }
    return noisy;
}

ComplexMatrix sample_haar_unitary(int n, Rng& rng) {
    if (n < 1) throw DomainError("unitary dimension must be positive");

    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            a(i, j) = Complex(re, im);
        }

    Eigen::HouseholderQR<ComplexMatrix> qr(a);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix& r = qr.matrixQR();
    // Phase correction: without it QR is not Haar-distributed.
    for (int j = 0; j < n; ++j) {
        const Complex rjj = r(j, j);
        const double mag = std::abs(rjj);
        q.col(j) *= mag > 0 ? rjj / mag : Complex(1, 0);
    }
    return q;
}

Architecture sample_random_arch(int n, int l, Rng& rng) {
    if (n < 1) throw DomainError("mode count must be positive");
    if (l < 2) throw DomainError("need at least two phase layers (one mode mixer)");

    Architecture arch;
    arch.modes = n;
    arch.phase_layers = l;
    arch.basis.reserve(static_cast<std::size_t>(l - 1));
    for (int i = 0; i < l - 1; ++i) arch.basis.push_back(sample_haar_unitary(n, rng));
    return arch;
}

PhaseConfig sample_uniform_phases(int n, int l, Rng& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    RealMatrix values(l, n);
    for (Eigen::Index layer = 0; layer < l; ++layer)
        for (Eigen::Index k = 0; k < n; ++k) values(layer, k) = uniform(rng);
    return PhaseConfig(std::move(values));
}

TrainingSet generate_training_set(const Architecture& arch, int m, double eps, Rng& rng) {
    if (m < 1) throw DomainError("training set size must be positive");
    if (eps < 0) throw DomainError("noise level must be nonnegative");

    TrainingSet training;
    training.architecture_hash = arch.hash();
    training.noise_eps = eps;
    training.samples.reserve(static_cast<std::size_t>(m));
    for (int s = 0; s < m; ++s) {
        TrainingSample sample;
        sample.phases = sample_uniform_phases(arch.modes, arch.phase_layers, rng);
        sample.matrix = add_tomography_noise(forward_unitary(arch, sample.phases), eps, rng);
        training.samples.push_back(std::move(sample));
    }
    return training;
}

}  // namespace interferolab
