#include "interferolab/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace interferolab {

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw FormatError("matrix must be a nonempty array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw FormatError("matrix rows have inconsistent lengths");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const json& entry = row[static_cast<std::size_t>(c)];
            if (!entry.is_array() || entry.size() != 2)
                throw FormatError("complex entries must be [re, im] pairs");
            m(i, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
        }
    }
    return m;
}

json phases_to_json(const PhaseConfig& phases) {
    json layers = json::array();
    for (int l = 0; l < phases.layers(); ++l) {
        json row = json::array();
        for (int k = 0; k < phases.channels(); ++k) row.push_back(phases.values(l, k));
        layers.push_back(std::move(row));
    }
    return layers;
}

PhaseConfig phases_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw FormatError("phases must be a nonempty array of per-layer arrays");
    const int layers = static_cast<int>(j.size());
    const int channels = static_cast<int>(j.front().size());
    RealMatrix values(layers, channels);
    for (int l = 0; l < layers; ++l) {
        const json& row = j[static_cast<std::size_t>(l)];
        if (static_cast<int>(row.size()) != channels)
            throw FormatError("phase layers have inconsistent lengths");
        for (int k = 0; k < channels; ++k) values(l, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    PhaseConfig config(std::move(values));
    config.validate();
    return config;
}

json architecture_to_json(const Architecture& arch) {
    json j;
    j["modes"] = arch.modes;
    j["phase_layers"] = arch.phase_layers;
    json basis = json::array();
    for (const ComplexMatrix& u : arch.basis) basis.push_back(matrix_to_json(u));
    j["basis"] = std::move(basis);
    return j;
}

Architecture architecture_from_json(const json& j) {
    Architecture arch;
    try {
        arch.modes = j.at("modes").get<int>();
        arch.phase_layers = j.at("phase_layers").get<int>();
        for (const json& u : j.at("basis")) arch.basis.push_back(matrix_from_json(u));
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad architecture file: ") + e.what());
    }
    arch.validate();
    return arch;
}

json training_set_to_json(const TrainingSet& training) {
    json j;
    j["architecture_hash"] = training.architecture_hash;
    j["noise_eps"] = training.noise_eps;
    json samples = json::array();
    for (const TrainingSample& s : training.samples) {
        json sample;
        sample["phases"] = phases_to_json(s.phases);
        sample["matrix"] = matrix_to_json(s.matrix);
        samples.push_back(std::move(sample));
    }
    j["samples"] = std::move(samples);
    return j;
}

TrainingSet training_set_from_json(const json& j) {
    TrainingSet training;
    try {
        training.architecture_hash = j.at("architecture_hash").get<std::string>();
        training.noise_eps = j.at("noise_eps").get<double>();
        for (const json& s : j.at("samples")) {
            TrainingSample sample;
            sample.phases = phases_from_json(s.at("phases"));
            sample.matrix = matrix_from_json(s.at("matrix"));
            training.samples.push_back(std::move(sample));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad training-set file: ") + e.what());
    }
    training.validate();
    return training;
}

json model_to_json(const LinearModel& model) {
    json j;
    j["modes"] = model.modes;
    j["phase_layers"] = model.phase_layers;
    j["feature_ordering"] = kFeatureOrdering;
    j["architecture_hash"] = model.architecture_hash;
    json weights = json::array();
    for (Eigen::Index c = 0; c < model.weights.cols(); ++c) {
        json column = json::array();
        for (Eigen::Index f = 0; f < model.weights.rows(); ++f)
            column.push_back({model.weights(f, c).real(), model.weights(f, c).imag()});
        weights.push_back(std::move(column));
    }
    j["weights"] = std::move(weights);
    return j;
}

LinearModel model_from_json(const json& j) {
    LinearModel model;
    try {
        model.modes = j.at("modes").get<int>();
        model.phase_layers = j.at("phase_layers").get<int>();
        const std::string ordering = j.at("feature_ordering").get<std::string>();
        if (ordering != kFeatureOrdering)
            throw FormatError("model uses feature ordering '" + ordering +
                              "', this build understands '" + kFeatureOrdering + "'");
        model.architecture_hash = j.at("architecture_hash").get<std::string>();

        const json& weights = j.at("weights");
        const std::size_t dim = feature_dim(model.modes, model.phase_layers);
        const std::size_t cols = static_cast<std::size_t>(model.modes) * model.modes;
        if (weights.size() != cols)
            throw FormatError("model weight count does not match modes²");
        model.weights.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(cols));
        for (std::size_t c = 0; c < cols; ++c) {
            const json& column = weights[c];
            if (column.size() != dim)
                throw FormatError("weight vector length does not match feature dimension");
            for (std::size_t f = 0; f < dim; ++f) {
                const json& entry = column[f];
                if (!entry.is_array() || entry.size() != 2)
                    throw FormatError("complex entries must be [re, im] pairs");
                model.weights(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(c)) =
                    Complex(entry[0].get<double>(), entry[1].get<double>());
            }
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad model file: ") + e.what());
    }
    model.validate();
    return model;
}

json report_to_json(const SolverReport& report) {
    json j;
    j["m_samples"] = report.m_samples;
    j["feature_dim"] = report.feature_dim;
    j["rank_estimate"] = report.rank_estimate;
    j["rank_deficient"] = report.rank_deficient();
    j["residual_rms"] = report.residual_rms;
    j["condition_estimate"] = report.condition_estimate;
    j["wall_time_s"] = report.wall_time_s;
    return j;
}

json programming_result_to_json(const ProgrammingResult& result) {
    json j;
    j["phases"] = phases_to_json(result.phases);
    j["final_loss"] = result.final_loss;
    j["converged"] = result.converged;
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw FormatError("write failed: " + path);
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("cannot parse " + path + ": " + e.what());
    }
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_trace_csv(const std::string& path, const TuneTrace& trace) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << "pass,layer,iteration,loss\n";
    for (const TraceRecord& r : trace.records)
        out << r.pass << ',' << r.layer << ',' << r.iteration << ','
            << format_double(r.loss) << '\n';
    if (!out) throw FormatError("write failed: " + path);
}

}  // namespace interferolab
