#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "aggregate.hpp"
#include "metrics.hpp"
#include "schema.hpp"

namespace parsemble {

// model_id -> document id -> normalized prediction, precomputed once; the
// search re-aggregates but never re-extracts.
using PredictionTable = std::map<std::string, std::map<std::string, ParsedResume>>;

struct CalibrationResult {
  WeightVector best_weights;
  std::vector<std::pair<WeightVector, double>> grid;  // input order, validation RS each
  std::chrono::milliseconds runtime{0};
};

// All weight vectors in {1,2,3}^k over the given model ids, enumerated in a
// fixed order (last model varies fastest).
std::vector<WeightVector> default_weight_grid(const std::vector<std::string>& model_ids);

// Evaluates every grid point by aggregating the validation documents with the
// deterministic consensus fallback and scoring mean RS against the golds.
// Grid points that are positive multiples of one another form a scale class
// and are evaluated once. Ties on RS break toward the smallest total weight,
// then the lexicographically smallest weight tuple in model_id order.
CalibrationResult grid_search_weights(
    const std::vector<std::pair<ResumeDocument, ParsedResume>>& validation,
    const PredictionTable& predictions, const std::vector<WeightVector>& grid,
    const RSWeights& rs_weights, int parallelism = 1,
    const SkillOntology& ontology = SkillOntology::builtin());

// Mean RS over the pairs for each requested skills weight, with the other RS
// weights rescaled proportionally so each configuration totals 1.
std::vector<std::pair<double, double>> rs_weight_sweep(
    const std::vector<std::pair<ParsedResume, ParsedResume>>& pairs,
    const std::vector<double>& skill_weight_values);

nlohmann::ordered_json calibration_result_to_json(const CalibrationResult& result);

// Human-readable grid trace sorted by RS descending.
std::string render_grid_table(const CalibrationResult& result);

}  // namespace parsemble
