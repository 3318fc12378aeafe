/*
 * Feature-linearized interferometer model. Each matrix element is a scalar
 * product of a weight vector with a feature vector of phase-exponential
 * products, one feature per index path through the layers. The canonical
 * feature ordering ("lex-v1") is lexicographic over index tuples
 * (k₀,…,k_{L−1}) with k₀ — the layer-L index — varying slowest.
 */

#pragma once

#include "interferolab/types.hpp"

#include <cstddef>
#include <vector>

namespace interferolab {

inline constexpr const char* kFeatureOrdering = "lex-v1";

/// N^L, the full feature-space dimension. Throws DomainError when the dense
/// representation would overflow practical sizes.
std::size_t feature_dim(int modes, int phase_layers);

/// Feature vector of a phase configuration: entry at tuple (k₀,…,k_{L−1})
/// is ∏_t e^{iφ^(L−t)_{k_t}}, i.e. the Kronecker chain of per-layer phase
/// exponentials with layer L slowest. Every entry has unit modulus.
ComplexVector feature_vector(const PhaseConfig& phases);

/// Learned linear model of a full interferometer: one complex weight vector
/// of length N^L per matrix element. Column i·N+j of `weights` belongs to
/// element (i,j).
struct LinearModel {
    int modes = 0;
    int phase_layers = 0;
    std::string architecture_hash;
    ComplexMatrix weights;  // feature_dim x modes²

    std::size_t dim() const { return feature_dim(modes, phase_layers); }
    void validate() const;
};

/// Model prediction: element (i,j) is the (bilinear) scalar product of its
/// weight vector with the feature vector.
ComplexMatrix predict(const LinearModel& model, const PhaseConfig& phases);

/// Analytic phase derivatives of predict. Entry layer·N + channel of the
/// result holds ∂U/∂φ^(layer+1)_channel as an N×N matrix.
std::vector<ComplexMatrix> predict_gradient(const LinearModel& model,
                                            const PhaseConfig& phases);

/// predict and predict_gradient in one pass over the weight tensor.
void predict_with_gradient(const LinearModel& model, const PhaseConfig& phases,
                           ComplexMatrix& prediction,
                           std::vector<ComplexMatrix>& gradient);

/// Ground-truth weight tensor of an architecture: the weight of element
/// (i,j) at tuple (k₀,…,k_{L−1}) is the product of basis-matrix entries
/// along the path when k₀ = i and k_{L−1} = j, and zero elsewhere.
LinearModel true_weights_from_arch(const Architecture& arch);

/// Zeroes every weight outside the structural sparsity slice (tuples whose
/// endpoints disagree with the matrix element they belong to).
LinearModel project_to_slice(const LinearModel& model);

}  // namespace interferolab
