/*
 * All-layers training: builds the object–feature design matrix and solves the
 * least-squares problem for every matrix element at once, either analytically
 * through one pseudoinversion or iteratively by (stochastic) gradient descent.
 */

#pragma once

#include "interferolab/feature_model.hpp"
#include "interferolab/types.hpp"

#include <cstdint>
#include <optional>

namespace interferolab {

/// M × N^L matrix whose rows are the feature vectors of the training phase
/// settings.
struct DesignMatrix {
    ComplexMatrix rows;
    int modes = 0;
    int phase_layers = 0;

    Eigen::Index samples() const { return rows.rows(); }
    Eigen::Index dim() const { return rows.cols(); }
};

struct SolverReport {
    Eigen::Index m_samples = 0;
    Eigen::Index feature_dim = 0;
    Eigen::Index rank_estimate = 0;      // 0 when the solver does not estimate rank
    double residual_rms = 0.0;           // RMS of |ΘW − U| over all entries
    double condition_estimate = 0.0;     // σ_max/σ_min over retained singular values
    double wall_time_s = 0.0;

    bool rank_deficient() const { return rank_estimate < feature_dim; }
};

/// Iterative training diverged (loss exceeded 10⁶ × initial).
struct DivergedError : std::runtime_error {
    SolverReport report;
    explicit DivergedError(SolverReport r)
        : std::runtime_error("iterative solver diverged"), report(std::move(r)) {}
};

DesignMatrix build_design_matrix(const TrainingSet& training);

struct TrainResult {
    LinearModel model;
    SolverReport report;
};

struct PinvOptions {
    double rcond = 1e-12;
    // Solve the reduced per-element system over the N^{L−2} structural
    // features instead of the full shared N^L system. Off by default: the
    // full system is the canonical formulation (its sample-size threshold is
    // N^L) and is what one shared pseudoinverse assumes.
    bool reduced_slice = false;
};

/// Analytic least-squares solution: the pseudoinverse of the design matrix is
/// materialized once and applied to all N² right-hand sides. Rank-deficient
/// systems (M < N^L) return the minimum-norm solution, flagged in the report.
TrainResult solve_pinv(const DesignMatrix& design, const TrainingSet& training,
                       const PinvOptions& options = {});

struct IterativeConfig {
    double learning_rate = 0.0;  // <= 0 → default 0.1/M
    int batch_size = 0;          // <= 0 → default min(M, 64)
    int epochs = 200;
    std::uint64_t seed = 0;
    std::optional<LinearModel> init;  // warm start; zero weights otherwise
};

/// Mini-batch gradient descent on the training loss over the complex weights.
/// The update per batch B is W ← W − lr · Θ_B†(Θ_B W − U_B); with
/// batch_size = M this is full-batch gradient descent.
TrainResult solve_iterative(const DesignMatrix& design, const TrainingSet& training,
                            const IterativeConfig& config = {});

/// Mean over samples of the squared residual Frobenius norm between model
/// prediction and measured matrix.
double training_loss(const LinearModel& model, const TrainingSet& training);

}  // namespace interferolab
