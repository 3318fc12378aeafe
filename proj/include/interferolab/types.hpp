/*
 * Core domain types for layered linear-optical interferometers: the
 * architecture (mode count, phase-layer count, fixed mode-mixing basis
 * matrices), phase-shift configurations, and tomography training sets.
 */

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace interferolab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A model was trained against a different architecture than the one it is
/// being evaluated or applied with.
struct StaleModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnderdeterminedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or mismatching file content (schemas, feature ordering tags).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// max |U†U − I| over all entries; 0 for an exactly unitary matrix.
double unitarity_defect(const ComplexMatrix& u);

/// true iff every entry of the matrix is finite.
bool all_finite(const ComplexMatrix& m);
bool all_finite(const RealMatrix& m);

/// Phase shifts of every layer, in radians, stored unreduced (not wrapped
/// mod 2π). Row l (0-based) holds layer l+1; layer 1 is applied first,
/// i.e. it is the rightmost diagonal factor of the interferometer product.
struct PhaseConfig {
    RealMatrix values;  // layers x channels

    PhaseConfig() = default;
    explicit PhaseConfig(RealMatrix v) : values(std::move(v)) {}

    int layers() const { return static_cast<int>(values.rows()); }
    int channels() const { return static_cast<int>(values.cols()); }

    void validate() const;
};

/// Fixed description of a layered interferometer: N optical modes, L phase
/// layers and the L−1 mode-mixing basis matrices sitting between them.
/// basis[0] mixes the modes between phase layers 1 and 2, and so on.
struct Architecture {
    int modes = 0;
    int phase_layers = 0;
    std::vector<ComplexMatrix> basis;

    void validate() const;

    /// Content hash (16 hex chars) over dimensions and basis entries; used
    /// to bind training sets and trained models to their architecture.
    std::string hash() const;
};

struct TrainingSample {
    PhaseConfig phases;
    ComplexMatrix matrix;
};

/// Simulated tomography dataset: M pairs of (phase setting, measured matrix).
struct TrainingSet {
    std::string architecture_hash;
    double noise_eps = 0.0;
    std::vector<TrainingSample> samples;

    int modes() const {
        return samples.empty() ? 0 : static_cast<int>(samples.front().matrix.rows());
    }
    int layers() const {
        return samples.empty() ? 0 : samples.front().phases.layers();
    }
    int size() const { return static_cast<int>(samples.size()); }

    void validate() const;
};

}  // namespace interferolab
