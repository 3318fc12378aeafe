#include "interferolab/layerwise_tuner.hpp"

#include "interferolab/interferometer.hpp"
#include "interferolab/numerics.hpp"
#include "interferolab/phase_programmer.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

namespace interferolab {

ComplexMatrix LocalLayerModel::predict(const RealVector& layer_phases) const {
    const int n = modes();
    if (layer_phases.size() != n)
        throw ShapeError("layer phase vector length does not match local model");
    ComplexMatrix u = ComplexMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k)
        u += Complex(std::cos(layer_phases(k)), std::sin(layer_phases(k))) * coeff[static_cast<std::size_t>(k)];
    return u;
}

DeviceOracle::DeviceOracle(Architecture arch, PhaseConfig initial_phases, double noise_eps)
    : arch_(std::move(arch)), current_(std::move(initial_phases)), noise_eps_(noise_eps) {
    arch_.validate();
    if (noise_eps_ < 0) throw DomainError("noise level must be nonnegative");
    if (current_.layers() != arch_.phase_layers || current_.channels() != arch_.modes)
        throw ShapeError("initial phases do not match device architecture");
}

ComplexMatrix DeviceOracle::tomography_query(const PhaseConfig& phases, Rng& rng) {
    if (phases.layers() != arch_.phase_layers || phases.channels() != arch_.modes)
        throw ShapeError("queried phases do not match device architecture");
    ++queries_;
    return add_tomography_noise(forward_unitary(arch_, phases), noise_eps_, rng);
}

ComplexMatrix DeviceOracle::exact_unitary(const PhaseConfig& phases) const {
    return forward_unitary(arch_, phases);
}

void DeviceOracle::set_phases(PhaseConfig phases) {
    if (phases.layers() != arch_.phase_layers || phases.channels() != arch_.modes)
        throw ShapeError("phases do not match device architecture");
    current_ = std::move(phases);
}

void DeviceOracle::commit_layer(int layer, const RealVector& layer_phases) {
    if (layer < 0 || layer >= arch_.phase_layers)
        throw DomainError("layer index out of range");
    if (layer_phases.size() != arch_.modes)
        throw ShapeError("layer phase vector length does not match device");
    current_.values.row(layer) = layer_phases.transpose();
}

LocalLayerModel fit_local_model(DeviceOracle& device, const PhaseConfig& current,
                                int layer, int m_samples, Rng& rng) {
    const int n = device.modes();
    if (layer < 0 || layer >= device.phase_layers())
        throw DomainError("layer index out of range");
    if (current.layers() != device.phase_layers() || current.channels() != n)
        throw ShapeError("current phases do not match device architecture");
    if (m_samples < n)
        throw UnderdeterminedError("local model needs at least N tomography samples");

    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    ComplexMatrix design(m_samples, n);
    ComplexMatrix rhs(m_samples, static_cast<Eigen::Index>(n) * n);
    PhaseConfig probe = current;
    for (int s = 0; s < m_samples; ++s) {
        for (int k = 0; k < n; ++k) probe.values(layer, k) = uniform(rng);
        design.row(s) = phase_exponentials(probe.values.row(layer)).transpose();
        const ComplexMatrix measured = device.tomography_query(probe, rng);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                rhs(s, static_cast<Eigen::Index>(i) * n + j) = measured(i, j);
    }

    // One pseudoinverse shared by all N² matrix elements.
    const ComplexMatrix coeff_flat = pseudoinverse(design) * rhs;  // n x n²
    LocalLayerModel local;
    local.layer = layer;
    local.coeff.assign(static_cast<std::size_t>(n), ComplexMatrix(n, n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                local.coeff[static_cast<std::size_t>(k)](i, j) =
                    coeff_flat(k, static_cast<Eigen::Index>(i) * n + j);
    return local;
}

double local_layer_loss(const LocalLayerModel& local, const RealVector& layer_phases,
                        const ComplexMatrix& target, RealVector* grad) {
    const int n = local.modes();
    if (target.rows() != n || target.cols() != n)
        throw ShapeError("target shape does not match local model");
    const ComplexMatrix residual = local.predict(layer_phases) - target;
    if (grad != nullptr) {
        grad->resize(n);
        for (int k = 0; k < n; ++k) {
            const Complex phase(std::cos(layer_phases(k)), std::sin(layer_phases(k)));
            // ∂loss/∂φ_k = 2·Σ_ij Re[ conj(residual_ij) · i·c_{ikj}·e^{iφ_k} ]
            (*grad)(k) = 2.0 * (residual.conjugate()
                                    .cwiseProduct(Complex(0, 1) * phase *
                                                  local.coeff[static_cast<std::size_t>(k)])
                                    .sum())
                                   .real();
        }
    }
    return residual.squaredNorm();
}

RealVector als_step(const LocalLayerModel& local, const RealVector& layer_phases,
                    const ComplexMatrix& target, int bfgs_iters) {
    const int n = local.modes();
    if (layer_phases.size() != n)
        throw ShapeError("layer phase vector length does not match local model");
    if (target.rows() != n || target.cols() != n)
        throw ShapeError("target shape does not match local model");
    if (bfgs_iters < 1) throw DomainError("need at least one optimizer iteration");

    Objective objective = [&](const RealVector& x, RealVector* grad) -> double {
        return local_layer_loss(local, x, target, grad);
    };

    RealVector probe_grad(n);
    const double start_value = objective(layer_phases, &probe_grad);
    if (!std::isfinite(start_value) || !probe_grad.allFinite()) {
        std::cerr << "als_step: non-finite objective at start, keeping phases\n";
        return layer_phases;
    }

    const BfgsResult result = bfgs_minimize(objective, layer_phases, bfgs_iters, 1e-12);
    return result.value <= start_value ? result.x : layer_phases;
}

TuneTrace tune(DeviceOracle& device, const ComplexMatrix& target, const TuneConfig& config) {
    const int n = device.modes();
    const int layers = device.phase_layers();
    if (target.rows() != n || target.cols() != n)
        throw ShapeError("target matrix shape does not match device");
    if (config.passes < 1) throw DomainError("need at least one pass");

    const int m = config.m_samples_per_layer > 0
                      ? config.m_samples_per_layer
                      : (device.noise_eps() == 0.0 ? n + 1 : 10 * n);

    Rng rng = make_rng(config.seed);
    PhaseConfig initial =
        config.initial_phases ? *config.initial_phases : sample_uniform_phases(n, layers, rng);
    device.set_phases(std::move(initial));

    TuneTrace trace;
    trace.initial_loss = frobenius_loss(device.exact_unitary(device.current_phases()), target);
    trace.records.reserve(static_cast<std::size_t>(config.passes) * layers);

    for (int pass = 1; pass <= config.passes; ++pass) {
        for (int layer = 0; layer < layers; ++layer) {
            const LocalLayerModel local =
                fit_local_model(device, device.current_phases(), layer, m, rng);
            const RealVector updated = als_step(
                local, device.current_phases().values.row(layer).transpose(), target,
                config.bfgs_iters);
            device.commit_layer(layer, updated);

            TraceRecord record;
            record.pass = pass;
            record.layer = layer + 1;
            record.iteration = (pass - 1) * layers + layer + 1;
            record.loss = frobenius_loss(device.exact_unitary(device.current_phases()), target);
            trace.records.push_back(record);
        }
    }

    trace.final_phases = device.current_phases();
    trace.final_loss = trace.records.back().loss;
    return trace;
}

}  // namespace interferolab
