/*
 * Command-line front end: dataset generation, model training and evaluation,
 * phase programming, ALS tuning, the scripted experiments, and power-law
 * fitting of swept curves.
 *
 * Exit codes: 0 success, 1 usage error, 2 runtime error.
 */

#include "interferolab/experiments.hpp"
#include "interferolab/interferometer.hpp"
#include "interferolab/parallel.hpp"
#include "interferolab/phase_programmer.hpp"
#include "interferolab/serialization.hpp"
#include "interferolab/trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace interferolab;
using nlohmann::json;

// Optional JSON config file; explicit command-line flags win over its keys.
json load_config_or_empty(const std::string& path) {
    if (path.empty()) return json::object();
    return load_json_file(path);
}

template <typename T>
void apply_config(const json& config, const std::string& key, T& value,
                  const CLI::Option* option) {
    if (option != nullptr && option->count() > 0) return;  // flag given explicitly
    if (config.contains(key)) value = config.at(key).get<T>();
}

struct CommonArgs {
    std::uint64_t seed = 1;
    std::string out;
    std::string config_path;
};

std::shared_ptr<CommonArgs> add_common(CLI::App* cmd) {
    auto common = std::make_shared<CommonArgs>();
    cmd->add_option("--seed", common->seed, "Master seed");
    cmd->add_option("--out", common->out, "Output path");
    cmd->add_option("--config", common->config_path, "JSON config file");
    return common;
}

int cmd_gen_arch(const CommonArgs& common, int modes, int layers,
                 const CLI::Option* modes_opt, const CLI::Option* layers_opt) {
    const json config = load_config_or_empty(common.config_path);
    apply_config(config, "modes", modes, modes_opt);
    apply_config(config, "layers", layers, layers_opt);

    Rng rng = make_rng(common.seed);
    const Architecture arch = sample_random_arch(modes, layers, rng);
    const std::string out = common.out.empty() ? "architecture.json" : common.out;
    save_json_file(out, architecture_to_json(arch));
    std::cout << "wrote " << out << " (hash " << arch.hash() << ")\n";
    return 0;
}

int cmd_gen_dataset(const CommonArgs& common, const std::string& arch_path, int samples,
                    double eps, const CLI::Option* samples_opt, const CLI::Option* eps_opt) {
    const json config = load_config_or_empty(common.config_path);
    apply_config(config, "samples", samples, samples_opt);
    apply_config(config, "eps", eps, eps_opt);
    const Architecture arch = architecture_from_json(load_json_file(arch_path));

    Rng rng = make_rng(common.seed);
    const TrainingSet training = generate_training_set(arch, samples, eps, rng);
    const std::string out = common.out.empty() ? "dataset.json" : common.out;
    save_json_file(out, training_set_to_json(training));
    std::cout << "wrote " << out << " (" << samples << " samples, eps " << eps << ")\n";
    return 0;
}

int cmd_train(const CommonArgs& common, const std::string& dataset_path,
              const std::string& solver, double learning_rate, int batch_size,
              int epochs) {
    const TrainingSet training = training_set_from_json(load_json_file(dataset_path));
    const DesignMatrix design = build_design_matrix(training);

    TrainResult result;
    if (solver == "pinv") {
        result = solve_pinv(design, training);
    } else if (solver == "iterative") {
        IterativeConfig config;
        config.learning_rate = learning_rate;
        config.batch_size = batch_size;
        config.epochs = epochs;
        config.seed = common.seed;
        result = solve_iterative(design, training, config);
    } else {
        std::cerr << "unknown solver '" << solver << "' (expected pinv|iterative)\n";
        return 1;
    }

    if (result.report.rank_deficient())
        std::cerr << "warning: rank-deficient system (rank " << result.report.rank_estimate
                  << " < " << result.report.feature_dim
                  << "); returning the minimum-norm solution\n";

    const std::string out = common.out.empty() ? "model.json" : common.out;
    save_json_file(out, model_to_json(result.model));
    save_json_file(out + ".report.json", report_to_json(result.report));
    std::cout << "wrote " << out << " (residual rms " << result.report.residual_rms << ")\n";
    return 0;
}

int cmd_evaluate(const CommonArgs& common, const std::string& model_path,
                 const std::string& arch_path, int test_configs) {
    const LinearModel model = model_from_json(load_json_file(model_path));
    const Architecture arch = architecture_from_json(load_json_file(arch_path));
    if (!model.architecture_hash.empty() && model.architecture_hash != arch.hash())
        throw StaleModelError("model hash " + model.architecture_hash +
                              " does not match architecture hash " + arch.hash());

    Rng rng = make_rng(common.seed);
    double total = 0.0;
    for (int t = 0; t < test_configs; ++t) {
        const PhaseConfig probe = sample_uniform_phases(arch.modes, arch.phase_layers, rng);
        total += frobenius_loss(predict(model, probe), forward_unitary(arch, probe));
    }
    const double mean = total / test_configs;
    std::cout << "mean held-out Frobenius loss over " << test_configs
              << " configs: " << format_double(mean) << "\n";
    if (!common.out.empty())
        save_json_file(common.out, json{{"test_configs", test_configs},
                                        {"mean_frobenius_loss", mean},
                                        {"seed", common.seed}});
    return 0;
}

int cmd_program(const CommonArgs& common, const std::string& model_path,
                const std::string& target_path, int restarts, int max_iters, double tol) {
    const LinearModel model = model_from_json(load_json_file(model_path));
    const json target_json = load_json_file(target_path);
    const ComplexMatrix target = matrix_from_json(
        target_json.contains("matrix") ? target_json.at("matrix") : target_json);

    ProgramConfig config;
    config.restarts = restarts;
    config.max_iters = max_iters;
    config.tol = tol;
    config.seed = common.seed;
    const ProgrammingResult result = program_phases(model, target, config);

    const std::string out = common.out.empty() ? "programming.json" : common.out;
    save_json_file(out, programming_result_to_json(result));
    std::cout << "final loss " << format_double(result.final_loss) << " ("
              << (result.converged ? "converged" : "not converged") << ", "
              << result.iterations_used << " iterations, " << result.restarts_used
              << " restarts)\n";
    return 0;
}

int cmd_tune_als(const CommonArgs& common, const std::string& arch_path,
                 const std::string& target_path, int passes, int m_per_layer,
                 int bfgs_iters, double eps, const std::string& phases_out) {
    const Architecture arch = architecture_from_json(load_json_file(arch_path));
    const json target_json = load_json_file(target_path);
    const ComplexMatrix target = matrix_from_json(
        target_json.contains("matrix") ? target_json.at("matrix") : target_json);

    Rng rng = make_rng(common.seed);
    DeviceOracle device(arch, sample_uniform_phases(arch.modes, arch.phase_layers, rng), eps);

    TuneConfig config;
    config.passes = passes;
    config.m_samples_per_layer = m_per_layer;
    config.bfgs_iters = bfgs_iters;
    config.seed = derive_seed(common.seed, 1);
    const TuneTrace trace = tune(device, target, config);

    const std::string out = common.out.empty() ? "trace.csv" : common.out;
    write_trace_csv(out, trace);
    if (!phases_out.empty()) save_json_file(phases_out, phases_to_json(trace.final_phases));
    std::cout << "final loss " << format_double(trace.final_loss) << " after "
              << trace.records.size() << " layer updates (" << device.query_count()
              << " tomography queries)\n";
    return 0;
}

int cmd_experiment(const CommonArgs& common, const std::string& id, bool paper_scale,
                   int trials, int passes, const CLI::Option* trials_opt,
                   const CLI::Option* passes_opt) {
    ExperimentConfig config = default_config(id, paper_scale);
    config.master_seed = common.seed;
    config.out_dir = common.out.empty() ? "." : common.out;

    const json file_config = load_config_or_empty(common.config_path);
    apply_config(file_config, "modes", config.modes, nullptr);
    apply_config(file_config, "layers", config.layers, nullptr);
    apply_config(file_config, "sample_grid", config.sample_grid, nullptr);
    apply_config(file_config, "noise_levels", config.noise_levels, nullptr);
    apply_config(file_config, "mode_grid", config.mode_grid, nullptr);
    apply_config(file_config, "trials", config.trials, nullptr);
    apply_config(file_config, "test_configs", config.test_configs, nullptr);
    apply_config(file_config, "passes", config.passes, nullptr);
    apply_config(file_config, "m_per_layer", config.m_per_layer, nullptr);
    apply_config(file_config, "bfgs_iters", config.bfgs_iters, nullptr);
    if (trials_opt->count() > 0) config.trials = trials;
    if (passes_opt->count() > 0) config.passes = passes;

    if (id == "fig4") {
        run_fig4(config);
    } else if (id == "fig5") {
        const Fig5Result result = run_fig5(config);
        for (std::size_t e = 0; e < result.fits.size(); ++e)
            std::cout << "eps " << config.noise_levels[e] << ": k = "
                      << result.fits[e].exponent << " +/- "
                      << result.fits[e].stderr_exponent << "\n";
    } else if (id == "fig6") {
        run_fig6(config);
    } else if (id == "fig7") {
        run_fig7(config);
    } else if (id == "fig8") {
        run_fig8(config);
    } else {
        std::cerr << "unknown experiment id '" << id << "'\n";
        return 1;
    }
    std::cout << "experiment " << id << " written to " << config.out_dir << "\n";
    return 0;
}

int cmd_fit_powerlaw(const CommonArgs& common, const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw FormatError("cannot open: " + csv_path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::pair<double, double>> points;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string sweep, loss;
        if (!std::getline(row, sweep, ',') || !std::getline(row, loss, ','))
            throw FormatError("bad CSV row: " + line);
        points.emplace_back(std::stod(sweep), std::stod(loss));
    }
    const PowerLawFit fit = fit_power_law(points);
    std::cout << "loss = " << format_double(fit.amplitude) << " * m^-"
              << format_double(fit.exponent) << " (stderr k "
              << format_double(fit.stderr_exponent) << ")\n";
    if (!common.out.empty())
        save_json_file(common.out, json{{"amplitude", fit.amplitude},
                                        {"exponent", fit.exponent},
                                        {"stderr_exponent", fit.stderr_exponent}});
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"interferolab: learning and programming layered linear-optical interferometers"};
    app.require_subcommand(1);
    int exit_code = 0;

    // gen-arch
    auto* gen_arch = app.add_subcommand("gen-arch", "Sample a random architecture");
    auto ga_common = add_common(gen_arch);
    auto ga_modes = std::make_shared<int>(3);
    auto ga_layers = std::make_shared<int>(4);
    CLI::Option* ga_modes_opt = gen_arch->add_option("--modes", *ga_modes, "Mode count N");
    CLI::Option* ga_layers_opt =
        gen_arch->add_option("--layers", *ga_layers, "Phase layer count L");
    gen_arch->callback([=, &exit_code] {
        exit_code = cmd_gen_arch(*ga_common, *ga_modes, *ga_layers, ga_modes_opt, ga_layers_opt);
    });

    // gen-dataset
    auto* gen_dataset = app.add_subcommand("gen-dataset", "Simulate a tomography training set");
    auto gd_common = add_common(gen_dataset);
    auto gd_arch = std::make_shared<std::string>();
    auto gd_samples = std::make_shared<int>(100);
    auto gd_eps = std::make_shared<double>(0.0);
    gen_dataset->add_option("--arch", *gd_arch, "Architecture file")->required();
    CLI::Option* gd_samples_opt =
        gen_dataset->add_option("--samples", *gd_samples, "Training-set size M");
    CLI::Option* gd_eps_opt = gen_dataset->add_option("--eps", *gd_eps, "Tomography noise level");
    gen_dataset->callback([=, &exit_code] {
        exit_code = cmd_gen_dataset(*gd_common, *gd_arch, *gd_samples, *gd_eps, gd_samples_opt,
                                    gd_eps_opt);
    });

    // train
    auto* train = app.add_subcommand("train", "Train a linear model from a dataset");
    auto tr_common = add_common(train);
    auto tr_dataset = std::make_shared<std::string>();
    auto tr_solver = std::make_shared<std::string>("pinv");
    auto tr_lr = std::make_shared<double>(0.0);
    auto tr_batch = std::make_shared<int>(0);
    auto tr_epochs = std::make_shared<int>(200);
    train->add_option("--dataset", *tr_dataset, "Training-set file")->required();
    train->add_option("--solver", *tr_solver, "pinv|iterative");
    train->add_option("--learning-rate", *tr_lr, "Iterative solver step size (0 = 0.1/M)");
    train->add_option("--batch-size", *tr_batch, "Iterative solver batch (0 = min(M,64))");
    train->add_option("--epochs", *tr_epochs, "Iterative solver epochs");
    train->callback([=, &exit_code] {
        exit_code = cmd_train(*tr_common, *tr_dataset, *tr_solver, *tr_lr, *tr_batch, *tr_epochs);
    });

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Held-out loss of a model vs an architecture");
    auto ev_common = add_common(evaluate);
    auto ev_model = std::make_shared<std::string>();
    auto ev_arch = std::make_shared<std::string>();
    auto ev_tests = std::make_shared<int>(20);
    evaluate->add_option("--model", *ev_model, "Model file")->required();
    evaluate->add_option("--arch", *ev_arch, "Architecture file")->required();
    evaluate->add_option("--test-configs", *ev_tests, "Held-out phase settings");
    evaluate->callback([=, &exit_code] {
        exit_code = cmd_evaluate(*ev_common, *ev_model, *ev_arch, *ev_tests);
    });

    // program
    auto* program = app.add_subcommand("program", "Find phases realizing a target on a model");
    auto pr_common = add_common(program);
    auto pr_model = std::make_shared<std::string>();
    auto pr_target = std::make_shared<std::string>();
    auto pr_restarts = std::make_shared<int>(5);
    auto pr_iters = std::make_shared<int>(500);
    auto pr_tol = std::make_shared<double>(1e-10);
    program->add_option("--model", *pr_model, "Model file")->required();
    program->add_option("--target", *pr_target, "Target matrix file")->required();
    program->add_option("--restarts", *pr_restarts, "Independent BFGS restarts");
    program->add_option("--max-iters", *pr_iters, "BFGS iteration cap per restart");
    program->add_option("--tol", *pr_tol, "Gradient max-norm tolerance");
    program->callback([=, &exit_code] {
        exit_code = cmd_program(*pr_common, *pr_model, *pr_target, *pr_restarts, *pr_iters, *pr_tol);
    });

    // tune-als
    auto* tune_cmd = app.add_subcommand("tune-als", "Layer-wise ALS tuning on a simulated device");
    auto tu_common = add_common(tune_cmd);
    auto tu_arch = std::make_shared<std::string>();
    auto tu_target = std::make_shared<std::string>();
    auto tu_passes = std::make_shared<int>(1000);
    auto tu_m = std::make_shared<int>(0);
    auto tu_bfgs = std::make_shared<int>(5);
    auto tu_eps = std::make_shared<double>(0.0);
    auto tu_phases_out = std::make_shared<std::string>();
    tune_cmd->add_option("--arch", *tu_arch, "Architecture file (the hidden device)")->required();
    tune_cmd->add_option("--target", *tu_target, "Target matrix file")->required();
    tune_cmd->add_option("--passes", *tu_passes, "Passes through the layers");
    tune_cmd->add_option("--samples", *tu_m, "Tomography samples per layer (0 = auto)");
    tune_cmd->add_option("--bfgs-iters", *tu_bfgs, "BFGS updates per layer visit");
    tune_cmd->add_option("--eps", *tu_eps, "Tomography noise level");
    tune_cmd->add_option("--phases-out", *tu_phases_out, "Write final phases JSON here");
    tune_cmd->callback([=, &exit_code] {
        exit_code = cmd_tune_als(*tu_common, *tu_arch, *tu_target, *tu_passes, *tu_m, *tu_bfgs,
                                 *tu_eps, *tu_phases_out);
    });

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Run a scripted experiment (fig4..fig8)");
    auto ex_common = add_common(experiment);
    auto ex_id = std::make_shared<std::string>();
    auto ex_paper = std::make_shared<bool>(false);
    auto ex_trials = std::make_shared<int>(0);
    auto ex_passes = std::make_shared<int>(0);
    experiment->add_option("id", *ex_id, "fig4|fig5|fig6|fig7|fig8")->required();
    experiment->add_flag("--paper-scale", *ex_paper, "Published trial counts and protocol");
    CLI::Option* ex_trials_opt = experiment->add_option("--trials", *ex_trials, "Override trials");
    CLI::Option* ex_passes_opt = experiment->add_option("--passes", *ex_passes, "Override passes");
    experiment->callback([=, &exit_code] {
        exit_code = cmd_experiment(*ex_common, *ex_id, *ex_paper, *ex_trials, *ex_passes,
                                   ex_trials_opt, ex_passes_opt);
    });

    // fit-powerlaw
    auto* fit = app.add_subcommand("fit-powerlaw", "Fit C·m^-k to a swept-curve CSV");
    auto fp_common = add_common(fit);
    auto fp_csv = std::make_shared<std::string>();
    fit->add_option("--in", *fp_csv, "Input CSV (sweep_value,mean_loss,...)")->required();
    fit->callback([=, &exit_code] { exit_code = cmd_fit_powerlaw(*fp_common, *fp_csv); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}

int main(int argc, char** argv) { return run_cli(argc, argv); }
