/*
 * Alternating least squares tuning against a (simulated) physical device.
 * One layer at a time: tomography at random settings of that layer's phases,
 * a local linear model over the N phase exponentials, then a few BFGS updates
 * toward the target before committing the layer and moving on.
 */

#pragma once

#include "interferolab/rng.hpp"
#include "interferolab/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace interferolab {

/// Single-layer view of the device: u_ij(φ) = Σ_k c_{ikj} e^{iφ_k}, where φ
/// ranges over the tuned layer only. coeff[k](i,j) stores c_{ikj}.
struct LocalLayerModel {
    int layer = 0;  // 0-based tuned layer
    std::vector<ComplexMatrix> coeff;

    int modes() const { return static_cast<int>(coeff.size()); }
    ComplexMatrix predict(const RealVector& layer_phases) const;
};

/// Stand-in for the physical interferometer: hides an architecture and its
/// current phase state, answers tomography queries (optionally noisy) and
/// counts them. Single-owner mutable state; not for concurrent sharing.
class DeviceOracle {
public:
    DeviceOracle(Architecture arch, PhaseConfig initial_phases, double noise_eps);

    int modes() const { return arch_.modes; }
    int phase_layers() const { return arch_.phase_layers; }
    double noise_eps() const { return noise_eps_; }
    std::uint64_t query_count() const { return queries_; }
    const PhaseConfig& current_phases() const { return current_; }

    /// Simulated tomography at the requested phases: exact transformation
    /// plus noise at the device's eps. Increments the query counter.
    ComplexMatrix tomography_query(const PhaseConfig& phases, Rng& rng);

    /// Noiseless evaluation channel for traces and tests; not counted as a
    /// tomography query.
    ComplexMatrix exact_unitary(const PhaseConfig& phases) const;

    void set_phases(PhaseConfig phases);
    void commit_layer(int layer, const RealVector& layer_phases);

private:
    Architecture arch_;
    PhaseConfig current_;
    double noise_eps_;
    std::uint64_t queries_ = 0;
};

/// Trains the single-layer model from m_samples tomography queries with
/// uniform-random settings of layer `layer` (other layers frozen at
/// `current`). One shared pseudoinverse solves all N² matrix elements.
/// Requires m_samples >= N.
LocalLayerModel fit_local_model(DeviceOracle& device, const PhaseConfig& current,
                                int layer, int m_samples, Rng& rng);

/// Local objective ‖U_local(φ) − target‖²_F; when grad is non-null also
/// writes its analytic phase gradient.
double local_layer_loss(const LocalLayerModel& local, const RealVector& layer_phases,
                        const ComplexMatrix& target, RealVector* grad = nullptr);

/// At most bfgs_iters BFGS updates on ‖U_local(φ) − target‖²_F starting from
/// the incumbent layer phases. Never returns phases with higher local-model
/// loss than the start; a non-finite gradient returns the start unchanged.
RealVector als_step(const LocalLayerModel& local, const RealVector& layer_phases,
                    const ComplexMatrix& target, int bfgs_iters);

struct TraceRecord {
    int pass = 0;       // 1-based pass through the layers
    int layer = 0;      // 1-based layer updated
    int iteration = 0;  // 1-based running count = (pass−1)·L + layer
    double loss = 0.0;  // noiseless device-vs-target Frobenius loss after the commit
};

struct TuneConfig {
    int passes = 1000;
    int m_samples_per_layer = 0;  // <= 0 → N+1 noiseless, 10N noisy
    int bfgs_iters = 5;
    std::uint64_t seed = 0;
    std::optional<PhaseConfig> initial_phases;  // uniform random by default
};

struct TuneTrace {
    std::vector<TraceRecord> records;  // passes × L entries
    PhaseConfig final_phases;
    double final_loss = 0.0;
    double initial_loss = 0.0;  // device-vs-target loss before any update
};

/// Full ALS loop: cycles through the layers, re-fitting a local model and
/// committing a BFGS phase update per visit. The trace records the noiseless
/// device loss after every commit, including for noisy tomography runs.
TuneTrace tune(DeviceOracle& device, const ComplexMatrix& target, const TuneConfig& config);

}  // namespace interferolab
