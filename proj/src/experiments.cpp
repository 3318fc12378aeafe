#include "interferolab/experiments.hpp"

#include "interferolab/interferometer.hpp"
#include "interferolab/parallel.hpp"
#include "interferolab/phase_programmer.hpp"
#include "interferolab/serialization.hpp"
#include "interferolab/trainer.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#ifndef INTERFEROLAB_VERSION
#define INTERFEROLAB_VERSION "unversioned"
#endif

namespace interferolab {

namespace {

using nlohmann::json;

std::string format_eps(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", eps);
    return buf;
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
};

MeanStderr aggregate(const std::vector<double>& values) {
    MeanStderr out;
    const double count = static_cast<double>(values.size());
    for (double v : values) out.mean += v;
    out.mean /= count;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.stderr_of_mean = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
    }
    return out;
}

void write_curve_csv(const std::string& path, const CurveData& curve) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << "sweep_value,mean_loss,stderr_loss,trials\n";
    for (std::size_t i = 0; i < curve.sweep_values.size(); ++i)
        out << format_double(curve.sweep_values[i]) << ',' << format_double(curve.mean_loss[i])
            << ',' << format_double(curve.stderr_loss[i]) << ',' << curve.trial_counts[i]
            << '\n';
    if (!out) throw FormatError("write failed: " + path);
}

void write_tune_csv(const std::string& path, const TuneCurve& curve) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << "pass,layer,iteration,mean_loss\n";
    for (std::size_t i = 0; i < curve.iteration.size(); ++i)
        out << curve.pass[i] << ',' << curve.layer[i] << ',' << curve.iteration[i] << ','
            << format_double(curve.mean_loss[i]) << '\n';
    if (!out) throw FormatError("write failed: " + path);
}

json config_echo(const ExperimentConfig& config) {
    json j;
    j["experiment"] = config.id;
    j["modes"] = config.modes;
    j["layers"] = config.layers;
    j["sample_grid"] = config.sample_grid;
    j["noise_levels"] = config.noise_levels;
    j["mode_grid"] = config.mode_grid;
    j["trials"] = config.trials;
    j["test_configs"] = config.test_configs;
    j["passes"] = config.passes;
    j["m_per_layer"] = config.m_per_layer;
    j["bfgs_iters"] = config.bfgs_iters;
    j["master_seed"] = config.master_seed;
    j["paper_scale"] = config.paper_scale;
    j["version"] = INTERFEROLAB_VERSION;
    return j;
}

void write_meta(const ExperimentConfig& config, json extra = json::object()) {
    if (config.out_dir.empty()) return;
    json meta = config_echo(config);
    for (auto& [key, value] : extra.items()) meta[key] = value;
    save_json_file((std::filesystem::path(config.out_dir) / (config.id + "_meta.json")).string(),
                   meta);
}

void ensure_out_dir(const ExperimentConfig& config) {
    if (!config.out_dir.empty()) std::filesystem::create_directories(config.out_dir);
}

// Held-out learning losses for every (noise level, sample size, trial),
// evaluated on the worker pool with slot-stable seeds and aggregation.
LearningCurves sweep_learning_curves(const ExperimentConfig& config) {
    const std::size_t n_eps = config.noise_levels.size();
    const std::size_t n_m = config.sample_grid.size();
    const std::size_t trials = static_cast<std::size_t>(config.trials);

    std::vector<std::vector<double>> losses(n_eps * n_m,
                                            std::vector<double>(trials, 0.0));
    parallel_for(n_eps * n_m * trials, [&](std::size_t task) {
        const std::size_t point = task / trials;
        const std::size_t trial = task % trials;
        const std::size_t eps_idx = point / n_m;
        const std::size_t m_idx = point % n_m;
        const std::uint64_t seed = derive_seed(derive_seed(config.master_seed, point), trial);
        losses[point][trial] = learning_trial_loss(
            config.modes, config.layers, config.sample_grid[m_idx],
            config.noise_levels[eps_idx], config.test_configs, seed);
    });

    LearningCurves curves;
    curves.noise_levels = config.noise_levels;
    curves.per_noise.resize(n_eps);
    for (std::size_t e = 0; e < n_eps; ++e) {
        CurveData& curve = curves.per_noise[e];
        for (std::size_t m_idx = 0; m_idx < n_m; ++m_idx) {
            const MeanStderr stats = aggregate(losses[e * n_m + m_idx]);
            curve.sweep_values.push_back(static_cast<double>(config.sample_grid[m_idx]));
            curve.mean_loss.push_back(stats.mean);
            curve.stderr_loss.push_back(stats.stderr_of_mean);
            curve.trial_counts.push_back(config.trials);
        }
    }
    return curves;
}

TuneCurve aggregate_tuning_runs(int modes, int layers, int m_per_layer, double eps,
                                const ExperimentConfig& config, std::uint64_t salt) {
    const std::size_t runs = static_cast<std::size_t>(config.trials);
    std::vector<TuneTrace> traces(runs);
    parallel_for(runs, [&](std::size_t run) {
        const std::uint64_t seed =
            derive_seed(derive_seed(config.master_seed, salt), run);
        traces[run] = tuning_trial(modes, layers, m_per_layer, eps, config.passes,
                                   config.bfgs_iters, seed);
    });

    TuneCurve curve;
    const std::size_t steps = traces.front().records.size();
    curve.pass.resize(steps);
    curve.layer.resize(steps);
    curve.iteration.resize(steps);
    curve.mean_loss.assign(steps, 0.0);
    for (std::size_t i = 0; i < steps; ++i) {
        curve.pass[i] = traces.front().records[i].pass;
        curve.layer[i] = traces.front().records[i].layer;
        curve.iteration[i] = traces.front().records[i].iteration;
    }
    for (const TuneTrace& trace : traces) {
        for (std::size_t i = 0; i < steps; ++i) curve.mean_loss[i] += trace.records[i].loss;
        curve.final_losses.push_back(trace.final_loss);
        curve.initial_losses.push_back(trace.initial_loss);
    }
    for (double& v : curve.mean_loss) v /= static_cast<double>(runs);
    return curve;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (modes < 1 || layers < 2) throw DomainError("experiment needs modes >= 1, layers >= 2");
    if (trials < 1) throw DomainError("experiment needs at least one trial");
    if (test_configs < 1) throw DomainError("experiment needs at least one test config");
    if (passes < 1) throw DomainError("experiment needs at least one pass");
    for (double eps : noise_levels)
        if (eps < 0) throw DomainError("noise levels must be nonnegative");
    for (int m : sample_grid)
        if (m < 1) throw DomainError("sample grid entries must be positive");
}

ExperimentConfig default_config(const std::string& id, bool paper_scale) {
    ExperimentConfig config;
    config.id = id;
    config.paper_scale = paper_scale;

    if (id == "fig4") {
        // Threshold sweep across M_min = N^L.
        if (paper_scale) {
            config.modes = 4;
            config.layers = 5;
            config.sample_grid = {256, 512, 768, 1000, 1023, 1024, 1100, 1536, 2048};
            config.trials = 1000;
        } else {
            config.modes = 3;
            config.layers = 4;
            config.sample_grid = {40, 60, 80, 81, 100, 162, 324};
            config.trials = 100;
        }
        config.noise_levels = {0.0, 0.01, 0.05, 0.1};
    } else if (id == "fig5") {
        // Asymptotic decay above the threshold; fit loss = C·M^{−k}.
        config.modes = 3;
        config.layers = 4;
        config.sample_grid = {162, 324, 648, 1296, 2592};
        config.noise_levels = {0.01, 0.05, 0.1};
        config.trials = paper_scale ? 1000 : 100;
    } else if (id == "fig6") {
        // Noise response of full-layer (L = N+1) devices at M = 2·N^L.
        config.mode_grid = paper_scale ? std::vector<int>{2, 3, 4} : std::vector<int>{2, 3};
        config.noise_levels = {0.0, 0.0125, 0.025, 0.05, 0.1, 0.2};
        config.trials = paper_scale ? 1000 : 100;
    } else if (id == "fig7") {
        // Noiseless ALS tuning, full-layer device, m = N+1 per layer.
        config.modes = 4;
        config.layers = 5;
        config.noise_levels = {0.0};
        config.passes = 1000;
        config.trials = paper_scale ? 50 : 10;
    } else if (id == "fig8") {
        // Noisy ALS tuning at m = 10N per layer.
        config.modes = 5;
        config.layers = 6;
        config.noise_levels = {0.01, 0.05, 0.1};
        config.passes = paper_scale ? 1000 : 200;
        config.trials = paper_scale ? 50 : 10;
    } else {
        throw DomainError("unknown experiment id: " + id);
    }
    return config;
}

double learning_trial_loss(int modes, int layers, int m, double eps, int test_configs,
                           std::uint64_t seed) {
    Rng rng = make_rng(seed);
    const Architecture arch = sample_random_arch(modes, layers, rng);
    const TrainingSet training = generate_training_set(arch, m, eps, rng);
    const TrainResult fit = solve_pinv(build_design_matrix(training), training);

    double total = 0.0;
    for (int t = 0; t < test_configs; ++t) {
        const PhaseConfig probe = sample_uniform_phases(modes, layers, rng);
        total += frobenius_loss(predict(fit.model, probe), forward_unitary(arch, probe));
    }
    return total / static_cast<double>(test_configs);
}

TuneTrace tuning_trial(int modes, int layers, int m_per_layer, double eps, int passes,
                       int bfgs_iters, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    const Architecture arch = sample_random_arch(modes, layers, rng);
    // Realizable target: the device's own transformation at random phases.
    const ComplexMatrix target =
        forward_unitary(arch, sample_uniform_phases(modes, layers, rng));
    PhaseConfig initial = sample_uniform_phases(modes, layers, rng);

    DeviceOracle device(arch, initial, eps);
    TuneConfig tune_config;
    tune_config.passes = passes;
    tune_config.m_samples_per_layer = m_per_layer;
    tune_config.bfgs_iters = bfgs_iters;
    tune_config.seed = derive_seed(seed, 0x7A11);
    tune_config.initial_phases = std::move(initial);
    return tune(device, target, tune_config);
}

LearningCurves run_fig4(const ExperimentConfig& config) {
    config.validate();
    ensure_out_dir(config);
    LearningCurves curves = sweep_learning_curves(config);
    if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        for (std::size_t e = 0; e < curves.noise_levels.size(); ++e)
            write_curve_csv(
                (dir / ("fig4_eps" + format_eps(curves.noise_levels[e]) + ".csv")).string(),
                curves.per_noise[e]);
        write_meta(config);
    }
    return curves;
}

Fig5Result run_fig5(const ExperimentConfig& config) {
    config.validate();
    const std::size_t min_m =
        feature_dim(config.modes, config.layers);
    for (int m : config.sample_grid)
        if (static_cast<std::size_t>(m) < min_m)
            throw DomainError("fig5 sweep must stay at or above the threshold N^L");

    ensure_out_dir(config);
    Fig5Result result;
    result.curves = sweep_learning_curves(config);
    for (const CurveData& curve : result.curves.per_noise) {
        std::vector<std::pair<double, double>> points;
        for (std::size_t i = 0; i < curve.sweep_values.size(); ++i)
            points.emplace_back(curve.sweep_values[i], curve.mean_loss[i]);
        result.fits.push_back(fit_power_law(points));
    }

    if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        json fits = json::array();
        for (std::size_t e = 0; e < result.fits.size(); ++e) {
            write_curve_csv(
                (dir / ("fig5_eps" + format_eps(config.noise_levels[e]) + ".csv")).string(),
                result.curves.per_noise[e]);
            fits.push_back({{"eps", config.noise_levels[e]},
                            {"amplitude", result.fits[e].amplitude},
                            {"exponent", result.fits[e].exponent},
                            {"stderr_exponent", result.fits[e].stderr_exponent}});
        }
        write_meta(config, json{{"power_law_fits", fits}});
    }
    return result;
}

Fig6Result run_fig6(const ExperimentConfig& config) {
    config.validate();
    if (config.mode_grid.empty()) throw DomainError("fig6 needs a mode grid");
    ensure_out_dir(config);

    Fig6Result result;
    result.mode_grid = config.mode_grid;
    const std::size_t n_eps = config.noise_levels.size();

    for (std::size_t mode_idx = 0; mode_idx < config.mode_grid.size(); ++mode_idx) {
        const int n = config.mode_grid[mode_idx];
        const int l = n + 1;  // full-layer device
        const int m = static_cast<int>(2 * feature_dim(n, l));
        result.sample_sizes.push_back(m);

        // The published protocol averages 10× more interferometers for the
        // smallest device.
        const std::size_t trials = static_cast<std::size_t>(
            config.paper_scale && n == 2 ? 10 * config.trials : config.trials);

        std::vector<std::vector<double>> losses(n_eps, std::vector<double>(trials, 0.0));
        parallel_for(n_eps * trials, [&](std::size_t task) {
            const std::size_t eps_idx = task / trials;
            const std::size_t trial = task % trials;
            const std::uint64_t point_tag = mode_idx * n_eps + eps_idx;
            const std::uint64_t seed =
                derive_seed(derive_seed(config.master_seed, point_tag), trial);
            losses[eps_idx][trial] = learning_trial_loss(
                n, l, m, config.noise_levels[eps_idx], config.test_configs, seed);
        });

        CurveData curve;
        for (std::size_t e = 0; e < n_eps; ++e) {
            const MeanStderr stats = aggregate(losses[e]);
            curve.sweep_values.push_back(config.noise_levels[e]);
            curve.mean_loss.push_back(stats.mean);
            curve.stderr_loss.push_back(stats.stderr_of_mean);
            curve.trial_counts.push_back(static_cast<int>(trials));
        }
        result.per_mode.push_back(std::move(curve));
    }

    if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        json diag = json::array();
        for (std::size_t i = 0; i < result.per_mode.size(); ++i) {
            write_curve_csv(
                (dir / ("fig6_modes" + std::to_string(result.mode_grid[i]) + ".csv")).string(),
                result.per_mode[i]);
            json entry;
            entry["modes"] = result.mode_grid[i];
            entry["samples"] = result.sample_sizes[i];
            for (double eps : config.noise_levels) {
                if (eps <= 0) continue;
                bool has_double = false;
                for (double other : config.noise_levels)
                    if (std::abs(other - 2 * eps) < 1e-12) has_double = true;
                if (has_double)
                    entry["sqrt_ratio_eps" + format_eps(eps)] =
                        linearity_ratio(result.per_mode[i], eps);
            }
            diag.push_back(std::move(entry));
        }
        write_meta(config, json{{"linearity_diagnostics", diag}});
    }
    return result;
}

double linearity_ratio(const CurveData& curve, double eps) {
    double at_eps = -1.0;
    double at_double = -1.0;
    for (std::size_t i = 0; i < curve.sweep_values.size(); ++i) {
        if (std::abs(curve.sweep_values[i] - eps) < 1e-12) at_eps = curve.mean_loss[i];
        if (std::abs(curve.sweep_values[i] - 2 * eps) < 1e-12) at_double = curve.mean_loss[i];
    }
    if (at_eps < 0 || at_double < 0)
        throw DomainError("curve does not contain both eps and 2*eps");
    if (at_eps <= 0) throw DomainError("loss at eps is zero; ratio undefined");
    return std::sqrt(at_double) / std::sqrt(at_eps);
}

Fig7Result run_fig7(const ExperimentConfig& config) {
    config.validate();
    ensure_out_dir(config);

    Fig7Result result;
    result.curve = aggregate_tuning_runs(config.modes, config.layers, config.m_per_layer,
                                         0.0, config, /*salt=*/0);
    if (!config.out_dir.empty()) {
        write_tune_csv((std::filesystem::path(config.out_dir) / "fig7.csv").string(),
                       result.curve);
        write_meta(config);
    }
    return result;
}

Fig8Result run_fig8(const ExperimentConfig& config) {
    config.validate();
    for (double eps : config.noise_levels)
        if (eps <= 0) throw DomainError("fig8 requires positive noise levels");
    ensure_out_dir(config);

    Fig8Result result;
    result.noise_levels = config.noise_levels;
    for (std::size_t e = 0; e < config.noise_levels.size(); ++e)
        result.per_noise.push_back(aggregate_tuning_runs(config.modes, config.layers,
                                                         config.m_per_layer,
                                                         config.noise_levels[e], config,
                                                         /*salt=*/e));
    if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        for (std::size_t e = 0; e < result.per_noise.size(); ++e)
            write_tune_csv(
                (dir / ("fig8_eps" + format_eps(config.noise_levels[e]) + ".csv")).string(),
                result.per_noise[e]);
        write_meta(config);
    }
    return result;
}

}  // namespace interferolab
