/*
 * File schemas. Complex numbers are always serialized as [re, im] pairs;
 * matrices as arrays of rows. Model files carry the canonical feature
 * ordering tag and are rejected on mismatch.
 */

#pragma once

#include "interferolab/feature_model.hpp"
#include "interferolab/layerwise_tuner.hpp"
#include "interferolab/phase_programmer.hpp"
#include "interferolab/trainer.hpp"
#include "interferolab/types.hpp"

#include <json.hpp>

#include <string>

namespace interferolab {

nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json phases_to_json(const PhaseConfig& phases);
PhaseConfig phases_from_json(const nlohmann::json& j);

nlohmann::json architecture_to_json(const Architecture& arch);
Architecture architecture_from_json(const nlohmann::json& j);

nlohmann::json training_set_to_json(const TrainingSet& training);
TrainingSet training_set_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const LinearModel& model);
LinearModel model_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const SolverReport& report);

/// Exactly { "phases", "final_loss", "converged" }.
nlohmann::json programming_result_to_json(const ProgrammingResult& result);

void save_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json_file(const std::string& path);

/// Canonical number formatting for CSV output (%.17g, round-trip exact).
std::string format_double(double value);

void write_trace_csv(const std::string& path, const TuneTrace& trace);

}  // namespace interferolab
