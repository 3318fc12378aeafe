/*
 * Programming stage: given a trained model and a target transformation, find
 * phase shifts minimizing the model-vs-target Frobenius distance with
 * multi-restart BFGS on the analytic gradient.
 */

#pragma once

#include "interferolab/feature_model.hpp"
#include "interferolab/types.hpp"

#include <cstdint>

namespace interferolab {

/// Squared Frobenius distance ‖a − b‖²_F (unnormalized, the optimization
/// objective).
double frobenius_distance_sq(const ComplexMatrix& a, const ComplexMatrix& b);

/// (1/N)·‖a − b‖²_F, the reporting metric for model quality and tuning.
double frobenius_loss(const ComplexMatrix& a, const ComplexMatrix& b);

struct ProgramConfig {
    int max_iters = 500;
    int restarts = 5;
    double tol = 1e-10;  // gradient max-norm convergence tolerance
    std::uint64_t seed = 0;
};

struct ProgrammingResult {
    PhaseConfig phases;
    double final_loss = 0.0;  // ‖predict(model, φ*) − target‖²_F
    int iterations_used = 0;
    int restarts_used = 0;
    bool converged = false;
};

/// Best result over independent BFGS runs from uniform-random initial phases.
/// Restarts with non-finite objective values are abandoned; the remaining
/// ones still compete.
ProgrammingResult program_phases(const LinearModel& model, const ComplexMatrix& target,
                                 const ProgramConfig& config = {});

}  // namespace interferolab
