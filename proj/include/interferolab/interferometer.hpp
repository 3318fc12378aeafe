/*
 * Exact forward model of a layered interferometer, tomography noise
 * injection, and Haar-random sampling of architectures and phases.
 */

#pragma once

#include "interferolab/rng.hpp"
#include "interferolab/types.hpp"

namespace interferolab {

/// Entrywise e^{iφ} of a real phase vector.
ComplexVector phase_exponentials(const RealVector& phases);

/// Exact transformation Φ_L U_{L−1} … U_1 Φ_1 of the interferometer at the
/// given phase shifts. Unitary up to floating point.
ComplexMatrix forward_unitary(const Architecture& arch, const PhaseConfig& phases);

/// Adds i.i.d. complex Gaussian tomography noise with E|perturbation|² = eps²
/// to every entry (eps/√2 standard deviation per quadrature). eps = 0 returns
/// the input unchanged.
ComplexMatrix add_tomography_noise(const ComplexMatrix& u, double eps, Rng& rng);

/// Haar-uniform random unitary via QR of a complex Gaussian matrix with the
/// R-diagonal phase correction (columns of Q scaled by r_jj/|r_jj|).
ComplexMatrix sample_haar_unitary(int n, Rng& rng);

/// Random architecture with l−1 independent Haar-random basis matrices.
/// Requires l >= 2 (at least one mode mixer).
Architecture sample_random_arch(int n, int l, Rng& rng);

/// L×N phases i.i.d. uniform on [0, 2π).
PhaseConfig sample_uniform_phases(int n, int l, Rng& rng);

/// m tomography samples of the architecture at uniform-random phases, with
/// noise level eps applied to every measured matrix.
TrainingSet generate_training_set(const Architecture& arch, int m, double eps, Rng& rng);

}  // namespace interferolab
