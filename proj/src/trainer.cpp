#include "interferolab/trainer.hpp"

#include "interferolab/numerics.hpp"
#include "interferolab/rng.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>

namespace interferolab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// M x N² matrix of measured matrices, one row per sample, elements row-major.
ComplexMatrix stack_measurements(const TrainingSet& training) {
    const int n = training.modes();
    ComplexMatrix rhs(training.size(), static_cast<Eigen::Index>(n) * n);
    for (int m = 0; m < training.size(); ++m)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                rhs(m, static_cast<Eigen::Index>(i) * n + j) = training.samples[m].matrix(i, j);
    return rhs;
}

void check_design(const DesignMatrix& design, const TrainingSet& training) {
    if (design.samples() != training.size())
        throw ShapeError("design matrix row count does not match training set");
    if (design.modes != training.modes() || design.phase_layers != training.layers())
        throw ShapeError("design matrix dimensions do not match training set");
}

LinearModel make_model(const DesignMatrix& design, const TrainingSet& training,
                       ComplexMatrix weights) {
    LinearModel model;
    model.modes = design.modes;
    model.phase_layers = design.phase_layers;
    model.architecture_hash = training.architecture_hash;
    model.weights = std::move(weights);
    return model;
}

}  // namespace

DesignMatrix build_design_matrix(const TrainingSet& training) {
    training.validate();
    const int n = training.modes();
    const int l = training.layers();
    const std::size_t dim = feature_dim(n, l);

    DesignMatrix design;
    design.modes = n;
    design.phase_layers = l;
    design.rows.resize(training.size(), static_cast<Eigen::Index>(dim));
    for (int m = 0; m < training.size(); ++m)
        design.rows.row(m) = feature_vector(training.samples[m].phases).transpose();
    return design;
}

TrainResult solve_pinv(const DesignMatrix& design, const TrainingSet& training,
                       const PinvOptions& options) {
    check_design(design, training);
    const auto start = Clock::now();
    const int n = design.modes;
    const ComplexMatrix rhs = stack_measurements(training);

    TrainResult result;
    result.report.m_samples = design.samples();

    if (!options.reduced_slice) {
        // One shared pseudoinverse applied to all N² right-hand sides.
        PseudoinverseResult pinv = pseudoinverse_full(design.rows, options.rcond);
        ComplexMatrix weights = pinv.pinv * rhs;

        result.report.feature_dim = design.dim();
        result.report.rank_estimate = pinv.rank;
        if (pinv.rank > 0)
            result.report.condition_estimate =
                pinv.singular_values(0) / pinv.singular_values(pinv.rank - 1);
        result.model = make_model(design, training, std::move(weights));
    } else {
        // Per-element systems over the N^{L−2} structural features: these are
        // exactly the design columns whose index tuple starts at i and ends
        // at j, so each element solves a column slice of the shared matrix.
        const std::size_t dim = static_cast<std::size_t>(design.dim());
        const std::size_t stride_first = dim / static_cast<std::size_t>(n);

        ComplexMatrix weights = ComplexMatrix::Zero(design.dim(), static_cast<Eigen::Index>(n) * n);
        Eigen::Index min_rank = std::numeric_limits<Eigen::Index>::max();
        double max_condition = 0.0;
        Eigen::Index slice_dim = 0;

        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                std::vector<Eigen::Index> slice;
                for (std::size_t f = static_cast<std::size_t>(i) * stride_first;
                     f < static_cast<std::size_t>(i + 1) * stride_first; ++f)
                    if (f % static_cast<std::size_t>(n) == static_cast<std::size_t>(j))
                        slice.push_back(static_cast<Eigen::Index>(f));
                slice_dim = static_cast<Eigen::Index>(slice.size());

                ComplexMatrix sub(design.samples(), slice_dim);
                for (Eigen::Index c = 0; c < slice_dim; ++c)
                    sub.col(c) = design.rows.col(slice[static_cast<std::size_t>(c)]);

                PseudoinverseResult pinv = pseudoinverse_full(sub, options.rcond);
                min_rank = std::min(min_rank, pinv.rank);
                if (pinv.rank > 0)
                    max_condition = std::max(
                        max_condition,
                        pinv.singular_values(0) / pinv.singular_values(pinv.rank - 1));

                const ComplexVector w = pinv.pinv * rhs.col(static_cast<Eigen::Index>(i) * n + j);
                for (Eigen::Index c = 0; c < slice_dim; ++c)
                    weights(slice[static_cast<std::size_t>(c)],
                            static_cast<Eigen::Index>(i) * n + j) = w(c);
            }
        }
        result.report.feature_dim = slice_dim;
        result.report.rank_estimate = min_rank;
        result.report.condition_estimate = max_condition;
        result.model = make_model(design, training, std::move(weights));
    }

    const ComplexMatrix residual = design.rows * result.model.weights - rhs;
    result.report.residual_rms =
        std::sqrt(residual.squaredNorm() / static_cast<double>(residual.size()));
    result.report.wall_time_s = seconds_since(start);
    return result;
}

TrainResult solve_iterative(const DesignMatrix& design, const TrainingSet& training,
                            const IterativeConfig& config) {
    check_design(design, training);
    if (config.epochs < 1) throw DomainError("iterative solver needs epochs >= 1");

    const auto start = Clock::now();
    const Eigen::Index m_samples = design.samples();
    const int n = design.modes;
    const ComplexMatrix rhs = stack_measurements(training);

    const double lr = config.learning_rate > 0
                          ? config.learning_rate
                          : 0.1 / static_cast<double>(m_samples);
    if (!(lr > 0)) throw DomainError("learning rate must be positive");
    const Eigen::Index batch =
        config.batch_size > 0
            ? std::min<Eigen::Index>(config.batch_size, m_samples)
            : std::min<Eigen::Index>(m_samples, 64);

    ComplexMatrix weights;
    if (config.init) {
        config.init->validate();
        if (config.init->weights.rows() != design.dim() ||
            config.init->weights.cols() != static_cast<Eigen::Index>(n) * n)
            throw ShapeError("warm-start model shape does not match design matrix");
        weights = config.init->weights;
    } else {
        weights = ComplexMatrix::Zero(design.dim(), static_cast<Eigen::Index>(n) * n);
    }

    auto full_loss = [&](const ComplexMatrix& w) {
        return (design.rows * w - rhs).squaredNorm() / static_cast<double>(m_samples);
    };

    SolverReport report;
    report.m_samples = m_samples;
    report.feature_dim = design.dim();

    const double initial_loss = full_loss(weights);
    double loss = initial_loss;

    Rng rng = make_rng(config.seed);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m_samples));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (Eigen::Index begin = 0; begin < m_samples; begin += batch) {
            const Eigen::Index count = std::min(batch, m_samples - begin);
            ComplexMatrix theta_batch(count, design.dim());
            ComplexMatrix rhs_batch(count, rhs.cols());
            for (Eigen::Index r = 0; r < count; ++r) {
                theta_batch.row(r) = design.rows.row(order[static_cast<std::size_t>(begin + r)]);
                rhs_batch.row(r) = rhs.row(order[static_cast<std::size_t>(begin + r)]);
            }
            const ComplexMatrix residual = theta_batch * weights - rhs_batch;
            weights.noalias() -= lr * (theta_batch.adjoint() * residual);
        }
        loss = full_loss(weights);
        if (!std::isfinite(loss) || loss > 1e6 * std::max(initial_loss, 1e-300)) {
            report.residual_rms = std::sqrt(
                std::max(0.0, loss) * static_cast<double>(m_samples) /
                static_cast<double>(m_samples * rhs.cols()));
            report.wall_time_s = seconds_since(start);
            throw DivergedError(report);
        }
    }

    report.residual_rms =
        std::sqrt(loss / static_cast<double>(rhs.cols()));
    report.wall_time_s = seconds_since(start);

    TrainResult result;
    result.model = make_model(design, training, std::move(weights));
    result.report = report;
    return result;
}

double training_loss(const LinearModel& model, const TrainingSet& training) {
    training.validate();
    model.validate();
    if (model.modes != training.modes() || model.phase_layers != training.layers())
        throw ShapeError("model and training set dimensions do not match");
    if (!model.architecture_hash.empty() && !training.architecture_hash.empty() &&
        model.architecture_hash != training.architecture_hash)
        throw StaleModelError("model was trained for a different architecture");

    double total = 0.0;
    for (const TrainingSample& sample : training.samples)
        total += (predict(model, sample.phases) - sample.matrix).squaredNorm();
    return total / static_cast<double>(training.size());
}

}  // namespace interferolab
