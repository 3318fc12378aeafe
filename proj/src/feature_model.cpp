#include "interferolab/feature_model.hpp"

#include "interferolab/interferometer.hpp"

#include <limits>

namespace interferolab {

namespace {

constexpr std::size_t kMaxDenseFeatures = std::size_t{1} << 28;

// digits(f) of flat index f in base N, most significant first; digit t is
// the channel index of layer L−t.
void flat_to_digits(std::size_t flat, int modes, int layers, int* digits) {
    for (int t = layers - 1; t >= 0; --t) {
        digits[t] = static_cast<int>(flat % static_cast<std::size_t>(modes));
        flat /= static_cast<std::size_t>(modes);
    }
}

}  // namespace

std::size_t feature_dim(int modes, int phase_layers) {
    if (modes < 1 || phase_layers < 1)
        throw DomainError("feature dimension needs positive modes and layers");
    std::size_t dim = 1;
    for (int l = 0; l < phase_layers; ++l) {
        if (dim > kMaxDenseFeatures / static_cast<std::size_t>(modes))
            throw DomainError("dense feature space too large for this build");
        dim *= static_cast<std::size_t>(modes);
    }
    return dim;
}

ComplexVector feature_vector(const PhaseConfig& phases) {
    phases.validate();
    const int layers = phases.layers();
    const int modes = phases.channels();
    const std::size_t dim = feature_dim(modes, layers);

    // Kronecker chain of per-layer phase exponentials, layer L slowest.
    ComplexVector features(1);
    features(0) = Complex(1, 0);
    for (int l = layers - 1; l >= 0; --l) {
        const ComplexVector layer_exp = phase_exponentials(phases.values.row(l));
        ComplexVector next(features.size() * modes);
        Eigen::Index idx = 0;
        for (Eigen::Index i = 0; i < features.size(); ++i)
            for (int k = 0; k < modes; ++k) next(idx++) = features(i) * layer_exp(k);
        features.swap(next);
    }
    if (static_cast<std::size_t>(features.size()) != dim)
        throw ShapeError("feature vector dimension mismatch");
    return features;
}

void LinearModel::validate() const {
    if (modes < 1 || phase_layers < 2)
        throw DomainError("model needs at least one mode and two phase layers");
    const std::size_t expected = feature_dim(modes, phase_layers);
    if (static_cast<std::size_t>(weights.rows()) != expected ||
        weights.cols() != static_cast<Eigen::Index>(modes) * modes)
        throw ShapeError("model weight tensor has wrong shape");
}

ComplexMatrix predict(const LinearModel& model, const PhaseConfig& phases) {
    model.validate();
    if (phases.layers() != model.phase_layers || phases.channels() != model.modes)
        throw ShapeError("phase config shape does not match model");

    const ComplexVector features = feature_vector(phases);
    // Bilinear scalar product per element: no conjugation on either factor.
    const ComplexVector flat = model.weights.transpose() * features;
    const int n = model.modes;
    ComplexMatrix u(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) u(i, j) = flat(i * n + j);
    return u;
}

void predict_with_gradient(const LinearModel& model, const PhaseConfig& phases,
                           ComplexMatrix& prediction,
                           std::vector<ComplexMatrix>& gradient) {
    model.validate();
    if (phases.layers() != model.phase_layers || phases.channels() != model.modes)
        throw ShapeError("phase config shape does not match model");

    const int n = model.modes;
    const int layers = model.phase_layers;
    const std::size_t dim = model.dim();
    const ComplexVector features = feature_vector(phases);

    prediction = ComplexMatrix::Zero(n, n);
    gradient.assign(static_cast<std::size_t>(layers) * n, ComplexMatrix::Zero(n, n));

    std::vector<int> digits(dim * static_cast<std::size_t>(layers));
    for (std::size_t f = 0; f < dim; ++f)
        flat_to_digits(f, n, layers, &digits[f * static_cast<std::size_t>(layers)]);

    const Complex i_unit(0, 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Eigen::Index col = static_cast<Eigen::Index>(i) * n + j;
            for (std::size_t f = 0; f < dim; ++f) {
                const Complex term =
                    model.weights(static_cast<Eigen::Index>(f), col) *
                    features(static_cast<Eigen::Index>(f));
                prediction(i, j) += term;
                const Complex dterm = i_unit * term;
                const int* d = &digits[f * static_cast<std::size_t>(layers)];
                // Tuple position t is the channel of layer L−t (row L−1−t).
                for (int t = 0; t < layers; ++t) {
                    const std::size_t slot =
                        static_cast<std::size_t>(layers - 1 - t) * n + d[t];
                    gradient[slot](i, j) += dterm;
                }
            }
        }
    }
}

std::vector<ComplexMatrix> predict_gradient(const LinearModel& model,
                                            const PhaseConfig& phases) {
    ComplexMatrix prediction;
    std::vector<ComplexMatrix> gradient;
    predict_with_gradient(model, phases, prediction, gradient);
    return gradient;
}

LinearModel true_weights_from_arch(const Architecture& arch) {
    arch.validate();
    const int n = arch.modes;
    const int layers = arch.phase_layers;
    const std::size_t dim = feature_dim(n, layers);

    LinearModel model;
    model.modes = n;
    model.phase_layers = layers;
    model.architecture_hash = arch.hash();
    model.weights = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim),
                                        static_cast<Eigen::Index>(n) * n);

    std::vector<int> digits(static_cast<std::size_t>(layers));
    for (std::size_t f = 0; f < dim; ++f) {
        flat_to_digits(f, n, layers, digits.data());
        // Path product u^{(L−1)}_{k₀k₁} … u^{(1)}_{k_{L−2}k_{L−1}}; the path
        // belongs to matrix element (k₀, k_{L−1}).
        Complex w(1, 0);
        for (int t = 0; t + 1 < layers; ++t)
            w *= arch.basis[static_cast<std::size_t>(layers - 2 - t)](digits[t], digits[t + 1]);
        const Eigen::Index col =
            static_cast<Eigen::Index>(digits[0]) * n + digits[layers - 1];
        model.weights(static_cast<Eigen::Index>(f), col) = w;
    }
    return model;
}

LinearModel project_to_slice(const LinearModel& model) {
    model.validate();
    const int n = model.modes;
    const int layers = model.phase_layers;
    const std::size_t dim = model.dim();

    LinearModel projected = model;
    std::vector<int> digits(static_cast<std::size_t>(layers));
    for (std::size_t f = 0; f < dim; ++f) {
        flat_to_digits(f, n, layers, digits.data());
        const Eigen::Index keep =
            static_cast<Eigen::Index>(digits[0]) * n + digits[layers - 1];
        for (Eigen::Index col = 0; col < projected.weights.cols(); ++col)
            if (col != keep) projected.weights(static_cast<Eigen::Index>(f), col) = Complex(0, 0);
    }
    return projected;
}

}  // namespace interferolab
