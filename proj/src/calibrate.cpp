#include "calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "errors.hpp"
#include "thread_pool.hpp"

namespace parsemble {

using nlohmann::ordered_json;

std::vector<WeightVector> default_weight_grid(const std::vector<std::string>& model_ids) {
  if (model_ids.empty()) throw ConfigError("default grid requires at least one model id");
  std::vector<std::string> ids = model_ids;
  std::sort(ids.begin(), ids.end());
  std::vector<WeightVector> grid;
  std::vector<int> odometer(ids.size(), 1);
  for (;;) {
    WeightVector v;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      v.weights[ids[i]] = static_cast<double>(odometer[i]);
    }
    grid.push_back(std::move(v));
    std::size_t pos = ids.size();
    while (pos > 0) {
      --pos;
      if (++odometer[pos] <= 3) break;
      odometer[pos] = 1;
      if (pos == 0) return grid;
    }
  }
}

namespace {

// Scale-class key: the weight tuple normalized to unit sum, fixed precision.
std::string scale_class_key(const WeightVector& v) {
  double total = v.total();
  std::string key;
  char buf[32];
  for (const auto& [model, w] : v.weights) {
    std::snprintf(buf, sizeof(buf), "%.12f", w / total);
    key += model;
    key += '=';
    key += buf;
    key += ';';
  }
  return key;
}

std::vector<double> weight_tuple(const WeightVector& v) {
  std::vector<double> t;
  t.reserve(v.weights.size());
  for (const auto& [_, w] : v.weights) t.push_back(w);  // std::map: model_id order
  return t;
}

}  // namespace

CalibrationResult grid_search_weights(
    const std::vector<std::pair<ResumeDocument, ParsedResume>>& validation,
    const PredictionTable& predictions, const std::vector<WeightVector>& grid,
    const RSWeights& rs_weights, int parallelism, const SkillOntology& ontology) {
  if (grid.empty()) throw ConfigError("grid must be non-empty");
  if (validation.empty()) throw ConfigError("validation set must be non-empty");
  if (predictions.empty()) throw ConfigError("prediction table must be non-empty");
  rs_weights.check();

  // Every grid point must weight exactly the models in the table, and every
  // (model, document) prediction must exist before the search starts.
  for (const auto& v : grid) {
    v.check();
    if (v.weights.size() != predictions.size()) {
      throw ConfigError("grid point does not cover the prediction table's model set");
    }
    for (const auto& [model, _] : v.weights) {
      if (predictions.find(model) == predictions.end()) {
        throw ConfigError("grid point weights unknown model '" + model + "'");
      }
    }
  }
  for (const auto& [model, by_doc] : predictions) {
    for (const auto& [doc, gold] : validation) {
      (void)gold;
      if (by_doc.find(doc.id) == by_doc.end()) {
        throw ConfigError("missing prediction for model '" + model + "' on document '" +
                          doc.id + "'");
      }
    }
  }

  const auto started = std::chrono::steady_clock::now();

  // Deduplicate scale classes; aggregation winners are invariant under
  // positive scaling, so class members share one RS value.
  std::vector<std::size_t> class_of(grid.size());
  std::vector<std::size_t> representatives;
  {
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const std::string key = scale_class_key(grid[i]);
      auto it = seen.find(key);
      if (it == seen.end()) {
        seen[key] = representatives.size();
        class_of[i] = representatives.size();
        representatives.push_back(i);
      } else {
        class_of[i] = it->second;
      }
    }
  }

  std::vector<double> class_rs(representatives.size(), 0.0);
  parallel_for(representatives.size(), parallelism, [&](std::size_t c) {
    const WeightVector& weights = grid[representatives[c]];
    double total = 0.0;
    for (const auto& [doc, gold] : validation) {
      std::vector<ModelPrediction> panel;
      panel.reserve(predictions.size());
      for (const auto& [model, by_doc] : predictions) {
        ModelPrediction p;
        p.model_id = model;
        p.prediction = by_doc.at(doc.id);
        panel.push_back(std::move(p));
      }
      AggregateResult fused = aggregate(panel, weights, nullptr, &doc, ontology);
      total += recruitment_similarity(fused.resume, gold, rs_weights);
    }
    class_rs[c] = total / static_cast<double>(validation.size());
  });

  CalibrationResult result;
  result.grid.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    result.grid.emplace_back(grid[i], class_rs[class_of[i]]);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.grid.size(); ++i) {
    const auto& [vi, rsi] = result.grid[i];
    const auto& [vb, rsb] = result.grid[best];
    if (rsi > rsb) {
      best = i;
    } else if (rsi == rsb) {
      if (vi.total() < vb.total() ||
          (vi.total() == vb.total() && weight_tuple(vi) < weight_tuple(vb))) {
        best = i;
      }
    }
  }
  result.best_weights = result.grid[best].first;
  result.runtime = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  return result;
}

std::vector<std::pair<double, double>> rs_weight_sweep(
    const std::vector<std::pair<ParsedResume, ParsedResume>>& pairs,
    const std::vector<double>& skill_weight_values) {
  if (pairs.empty()) throw ConfigError("rs_weight_sweep requires at least one pair");
  std::vector<std::pair<double, double>> out;
  out.reserve(skill_weight_values.size());
  for (double s : skill_weight_values) {
    RSWeights w = RSWeights::with_skills_weight(s);  // rejects s >= 1
    double total = 0.0;
    for (const auto& [pred, gold] : pairs) total += recruitment_similarity(pred, gold, w);
    out.emplace_back(s, total / static_cast<double>(pairs.size()));
  }
  return out;
}

ordered_json calibration_result_to_json(const CalibrationResult& result) {
  ordered_json o;
  o["best_weights"] = result.best_weights.to_json();
  ordered_json grid = ordered_json::array();
  for (const auto& [v, rs] : result.grid) {
    ordered_json point;
    point["weights"] = v.to_json();
    point["rs"] = rs;
    grid.push_back(std::move(point));
  }
  o["grid"] = std::move(grid);
  o["runtime_ms"] = result.runtime.count();
  return o;
}

std::string render_grid_table(const CalibrationResult& result) {
  std::vector<std::size_t> order(result.grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.grid[a].second > result.grid[b].second;
  });
  std::ostringstream out;
  out << "weights -> validation RS (best first)\n";
  for (std::size_t i : order) {
    const auto& [v, rs] = result.grid[i];
    out << "  ";
    bool first = true;
    for (const auto& [model, w] : v.weights) {
      if (!first) out << ", ";
      first = false;
      out << model << "=" << w;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", rs);
    out << "  ->  " << buf;
    if (v.weights == result.best_weights.weights) out << "  (best)";
    out << "\n";
  }
  return out.str();
}

}  // namespace parsemble
