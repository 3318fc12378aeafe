#include "interferolab/phase_programmer.hpp"

#include "interferolab/interferometer.hpp"
#include "interferolab/numerics.hpp"
#include "interferolab/parallel.hpp"
#include "interferolab/rng.hpp"

#include <cmath>
#include <limits>

namespace interferolab {

double frobenius_distance_sq(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError("matrices must have equal shape");
    return (a - b).squaredNorm();
}

double frobenius_loss(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() < 1) throw ShapeError("matrices must be nonempty");
    return frobenius_distance_sq(a, b) / static_cast<double>(a.rows());
}

namespace {

PhaseConfig unflatten(const RealVector& x, int layers, int modes) {
    RealMatrix values(layers, modes);
    for (int l = 0; l < layers; ++l)
        for (int k = 0; k < modes; ++k) values(l, k) = x(static_cast<Eigen::Index>(l) * modes + k);
    return PhaseConfig(std::move(values));
}

RealVector flatten(const PhaseConfig& phases) {
    RealVector x(static_cast<Eigen::Index>(phases.layers()) * phases.channels());
    for (int l = 0; l < phases.layers(); ++l)
        for (int k = 0; k < phases.channels(); ++k)
            x(static_cast<Eigen::Index>(l) * phases.channels() + k) = phases.values(l, k);
    return x;
}

struct RestartOutcome {
    BfgsResult bfgs;
    bool usable = false;
};

}  // namespace

ProgrammingResult program_phases(const LinearModel& model, const ComplexMatrix& target,
                                 const ProgramConfig& config) {
    model.validate();
    if (target.rows() != model.modes || target.cols() != model.modes)
        throw ShapeError("target matrix shape does not match model");
    if (config.restarts < 1) throw DomainError("need at least one restart");
    if (config.max_iters < 1) throw DomainError("need at least one iteration");

    const int n = model.modes;
    const int layers = model.phase_layers;

    Objective objective = [&](const RealVector& x, RealVector* grad) -> double {
        const PhaseConfig phases = unflatten(x, layers, n);
        if (grad == nullptr)
            return frobenius_distance_sq(predict(model, phases), target);

        ComplexMatrix prediction;
        std::vector<ComplexMatrix> dU;
        predict_with_gradient(model, phases, prediction, dU);
        const ComplexMatrix residual = prediction - target;

        grad->resize(x.size());
        for (Eigen::Index v = 0; v < x.size(); ++v) {
            // d‖P−T‖²/dφ = 2·Σ_ij Re[ conj(residual_ij) · ∂P_ij/∂φ ]
            (*grad)(v) =
                2.0 * residual.conjugate().cwiseProduct(dU[static_cast<std::size_t>(v)]).sum().real();
        }
        return residual.squaredNorm();
    };

    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(config.restarts));
    parallel_for(outcomes.size(), [&](std::size_t r) {
        Rng rng = make_rng(derive_seed(config.seed, r));
        const RealVector x0 = flatten(sample_uniform_phases(n, layers, rng));
        const double f0 = objective(x0, nullptr);
        if (!std::isfinite(f0)) return;  // abort this restart, others continue
        outcomes[r].bfgs = bfgs_minimize(objective, x0, config.max_iters, config.tol);
        outcomes[r].usable = std::isfinite(outcomes[r].bfgs.value);
    });

    ProgrammingResult result;
    result.final_loss = std::numeric_limits<double>::infinity();
    std::size_t best = outcomes.size();
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
        if (!outcomes[r].usable) continue;
        ++result.restarts_used;
        if (outcomes[r].bfgs.value < result.final_loss) {
            result.final_loss = outcomes[r].bfgs.value;
            best = r;
        }
    }
    if (best == outcomes.size())
        throw DomainError("all restarts produced non-finite losses");

    const BfgsResult& winner = outcomes[best].bfgs;
    result.phases = unflatten(winner.x, layers, n);
    result.iterations_used = winner.iterations;
    result.converged = winner.converged;
    return result;
}

}  // namespace interferolab
