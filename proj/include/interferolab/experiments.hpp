/*
 * Scripted reproduction of the learning and tuning experiments: sample-size
 * thresholds and scaling laws of the all-layers regression, noise response,
 * and ALS tuning convergence. Trials run on a deterministic worker pool with
 * per-trial derived seeds; outputs are CSV plus a metadata sidecar.
 */

#pragma once

#include "interferolab/layerwise_tuner.hpp"
#include "interferolab/numerics.hpp"
#include "interferolab/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace interferolab {

struct ExperimentConfig {
    std::string id;  // fig4 | fig5 | fig6 | fig7 | fig8
    int modes = 3;
    int layers = 4;
    std::vector<int> sample_grid;       // training-set sizes M (fig4/fig5)
    std::vector<double> noise_levels;   // ε values
    std::vector<int> mode_grid;         // fig6 sweeps N with L = N+1
    int trials = 100;                   // interferometer samples per point / tuning runs
    int test_configs = 20;              // held-out phase settings per trial
    int passes = 1000;                  // ALS passes through the layers (fig7/fig8)
    int m_per_layer = 0;                // <= 0 → N+1 noiseless, 10N noisy
    int bfgs_iters = 5;
    std::uint64_t master_seed = 1;
    std::string out_dir;                // empty → no files written
    bool paper_scale = false;

    void validate() const;
};

/// Defaults replicating each experiment. Desk scale shrinks the trial counts
/// (1000 → 100, 50 → 10) and the fig8 pass count; paper_scale restores the
/// published protocol.
ExperimentConfig default_config(const std::string& id, bool paper_scale = false);

struct CurveData {
    std::vector<double> sweep_values;
    std::vector<double> mean_loss;
    std::vector<double> stderr_loss;
    std::vector<int> trial_counts;
};

struct LearningCurves {
    std::vector<double> noise_levels;
    std::vector<CurveData> per_noise;  // sweep variable: training-set size M
};

struct Fig5Result {
    LearningCurves curves;
    std::vector<PowerLawFit> fits;  // one per noise level, loss = C·M^{−k}
};

struct Fig6Result {
    std::vector<int> mode_grid;
    std::vector<int> sample_sizes;     // M = 2·N^L per mode count
    std::vector<CurveData> per_mode;   // sweep variable: ε
};

/// √mean_loss(2ε)/√mean_loss(ε) from a fig6 curve; the linearity diagnostic.
double linearity_ratio(const CurveData& curve, double eps);

struct TuneCurve {
    std::vector<int> pass;        // aligned per-iteration records
    std::vector<int> layer;
    std::vector<int> iteration;
    std::vector<double> mean_loss;
    std::vector<double> final_losses;    // one per run
    std::vector<double> initial_losses;  // one per run
};

struct Fig7Result {
    TuneCurve curve;
};

struct Fig8Result {
    std::vector<double> noise_levels;
    std::vector<TuneCurve> per_noise;
};

LearningCurves run_fig4(const ExperimentConfig& config);
Fig5Result run_fig5(const ExperimentConfig& config);
Fig6Result run_fig6(const ExperimentConfig& config);
Fig7Result run_fig7(const ExperimentConfig& config);
Fig8Result run_fig8(const ExperimentConfig& config);

/// One learning trial: fresh architecture and training set, pseudoinverse
/// fit, mean held-out Frobenius loss over test_configs random phase settings.
double learning_trial_loss(int modes, int layers, int m, double eps, int test_configs,
                           std::uint64_t seed);

/// One tuning run against a realizable target; returns the full trace.
TuneTrace tuning_trial(int modes, int layers, int m_per_layer, double eps, int passes,
                       int bfgs_iters, std::uint64_t seed);

}  // namespace interferolab
