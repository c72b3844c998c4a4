#include "pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "http_backend.hpp"

namespace parsemble {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> BackendSetup::model_ids() const {
  std::vector<std::string> ids;
  ids.reserve(backends.size());
  for (const auto& b : backends) ids.push_back(b->model_id());
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

MockProfile mock_profile_from_json(const json& j) {
  if (!j.contains("model_id") || !j.at("model_id").is_string()) {
    throw ConfigError("mock backend config requires a string 'model_id'");
  }
  double default_rate = 0.0;
  if (j.contains("default_error_rate")) default_rate = j.at("default_error_rate").get<double>();
  CorruptionKind default_kind = CorruptionKind::kWrongValue;
  if (j.contains("default_corruption_kind")) {
    default_kind = corruption_kind_from_string(j.at("default_corruption_kind").get<std::string>());
  }
  std::uint64_t seed = 0;
  if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();

  MockProfile p =
      MockProfile::uniform(j.at("model_id").get<std::string>(), default_rate, default_kind, seed);
  if (j.contains("per_field_error_rate")) {
    const json& rates = j.at("per_field_error_rate");
    if (!rates.is_object()) throw ConfigError("'per_field_error_rate' must be an object");
    for (auto it = rates.begin(); it != rates.end(); ++it) {
      if (p.per_field_error_rate.find(it.key()) == p.per_field_error_rate.end()) {
        throw ConfigError("unknown field '" + it.key() + "' in per_field_error_rate");
      }
      p.per_field_error_rate[it.key()] = it.value().get<double>();
    }
  }
  if (j.contains("corruption_kind")) {
    const json& kinds = j.at("corruption_kind");
    if (!kinds.is_object()) throw ConfigError("'corruption_kind' must be an object");
    for (auto it = kinds.begin(); it != kinds.end(); ++it) {
      if (p.corruption_kind.find(it.key()) == p.corruption_kind.end()) {
        throw ConfigError("unknown field '" + it.key() + "' in corruption_kind");
      }
      p.corruption_kind[it.key()] = corruption_kind_from_string(it.value().get<std::string>());
    }
  }
  p.check();
  return p;
}

}  // namespace

BackendSetup build_backends(const json& config, const Corpus* gold_source,
                            const SkillOntology& ontology) {
  (void)ontology;
  if (!config.is_object() || !config.contains("backends") ||
      !config.at("backends").is_array() || config.at("backends").empty()) {
    throw ConfigError("backend config requires a non-empty 'backends' array");
  }

  MockExtractor::GoldLookup golds;
  auto ensure_golds = [&]() {
    if (golds) return;
    if (gold_source == nullptr) {
      throw ConfigError("mock backends require a corpus with gold resumes");
    }
    auto map = std::make_shared<std::map<std::string, ParsedResume>>();
    for (const auto& e : gold_source->entries) (*map)[e.document.id] = e.gold;
    golds = map;
  };

  BackendSetup setup;
  for (const auto& b : config.at("backends")) {
    if (!b.is_object() || !b.contains("type") || !b.at("type").is_string()) {
      throw ConfigError("each backend config requires a string 'type'");
    }
    const std::string type = b.at("type").get<std::string>();
    if (type == "mock") {
      ensure_golds();
      setup.backends.push_back(std::make_shared<MockExtractor>(mock_profile_from_json(b), golds));
    } else if (type == "endpoint") {
      setup.backends.push_back(std::make_shared<HttpExtractor>(EndpointConfig::from_json(b)));
    } else {
      throw ConfigError("unknown backend type '" + type + "'");
    }
  }
  {
    auto ids = setup.model_ids();
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw ConfigError("duplicate model_id in backend config");
    }
  }

  if (config.contains("consensus") && !config.at("consensus").is_null()) {
    const json& c = config.at("consensus");
    if (!c.is_object() || !c.contains("type") || !c.at("type").is_string()) {
      throw ConfigError("'consensus' requires a string 'type'");
    }
    const std::string type = c.at("type").get<std::string>();
    if (type == "endpoint") {
      setup.delegate = std::make_shared<HttpConsensusDelegate>(EndpointConfig::from_json(c));
    } else if (type != "fallback") {
      throw ConfigError("unknown consensus type '" + type + "' (use 'endpoint' or 'fallback')");
    }
  }
  return setup;
}

BackendSetup load_backends(const std::string& config_path, const Corpus* gold_source,
                           const SkillOntology& ontology) {
  std::ifstream in(config_path);
  if (!in) throw IoError("cannot open backend config: " + config_path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("malformed backend config " + config_path + ": " + e.what(), e.byte);
  }
  return build_backends(j, gold_source, ontology);
}

namespace {

PredictionTable build_prediction_table(const std::vector<DocumentPanel>& panels,
                                       const std::vector<std::string>& model_ids) {
  PredictionTable table;
  for (const auto& id : model_ids) table[id] = {};
  for (const auto& panel : panels) {
    for (const auto& p : panel.predictions) {
      table[p.model_id][panel.document_id] = p.prediction;
    }
  }
  return table;
}

}  // namespace

ParseOutput run_parse(const Corpus& corpus, const BackendSetup& setup,
                      const ParseOptions& options, const SkillOntology& ontology) {
  if (corpus.entries.empty()) throw ConfigError("corpus is empty");
  if (setup.backends.empty()) throw ConfigError("no backends configured");

  WeightVector weights = options.weights;
  if (!options.calibrate) {
    weights.check();
    // Fail fast, before any extraction.
    for (const auto& b : setup.backends) {
      if (weights.weights.find(b->model_id()) == weights.weights.end()) {
        throw ConfigError("backend '" + b->model_id() + "' has no configured weight");
      }
    }
  }

  std::vector<ResumeDocument> documents;
  documents.reserve(corpus.entries.size());
  for (const auto& e : corpus.entries) documents.push_back(e.document);

  std::vector<DocumentPanel> panels = run_panel(documents, setup.backends, options.parallelism);
  for (auto& panel : panels) {
    for (auto& p : panel.predictions) {
      p.prediction = normalize_fields(p.prediction, ontology);
    }
  }

  if (options.calibrate) {
    std::vector<std::pair<ResumeDocument, ParsedResume>> validation;
    validation.reserve(corpus.entries.size());
    for (const auto& e : corpus.entries) validation.emplace_back(e.document, e.gold);
    CalibrationResult cal = grid_search_weights(
        validation, build_prediction_table(panels, setup.model_ids()),
        default_weight_grid(setup.model_ids()), options.rs_weights, options.parallelism,
        ontology);
    weights = cal.best_weights;
  }

  ParseOutput out;
  out.n_documents = corpus.entries.size();
  out.used_weights = weights;

  std::ostringstream predictions, audit;
  for (const auto& panel : panels) {
    ordered_json line;
    line["id"] = panel.document_id;
    if (panel.predictions.empty()) {
      ordered_json failures = ordered_json::array();
      for (const auto& f : panel.failures) {
        failures.push_back({{"model_id", f.model_id}, {"error", f.error}});
      }
      line["failures"] = std::move(failures);
      line["error"] = "all backends failed";
      predictions << line.dump() << "\n";
      continue;
    }
    const CorpusEntry* entry = corpus.find(panel.document_id);
    AggregateResult fused = aggregate(panel.predictions, weights, setup.delegate.get(),
                                      entry != nullptr ? &entry->document : nullptr, ontology);
    line["prediction"] = resume_to_json(fused.resume);
    if (!panel.failures.empty()) {
      ordered_json failures = ordered_json::array();
      for (const auto& f : panel.failures) {
        failures.push_back({{"model_id", f.model_id}, {"error", f.error}});
      }
      line["failures"] = std::move(failures);
    }
    predictions << line.dump() << "\n";
    ++out.n_success;

    if (options.audit) {
      ordered_json audit_line;
      audit_line["id"] = panel.document_id;
      ordered_json votes = ordered_json::array();
      for (const auto& v : fused.votes) votes.push_back(v.to_json());
      audit_line["votes"] = std::move(votes);
      audit << audit_line.dump() << "\n";
    }
  }
  out.predictions_jsonl = predictions.str();
  out.audit_jsonl = audit.str();
  return out;
}

std::map<std::string, ParsedResume> parse_predictions_jsonl(const std::string& content,
                                                            const SkillOntology& ontology) {
  std::map<std::string, ParsedResume> out;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("predictions line " + std::to_string(line_no) + ": " + e.what(), e.byte);
    }
    if (!j.contains("id") || !j.at("id").is_string()) {
      throw ParseError("predictions line " + std::to_string(line_no) + ": missing 'id'");
    }
    const std::string id = j.at("id").get<std::string>();
    if (!j.contains("prediction")) continue;  // failed document
    if (out.count(id)) {
      throw ParseError("predictions line " + std::to_string(line_no) + ": duplicate id '" + id +
                       "'");
    }
    out[id] = normalize_fields(resume_from_json(j.at("prediction")), ontology);
  }
  return out;
}

MetricReport evaluate_predictions(const std::map<std::string, ParsedResume>& predictions,
                                  const Corpus& gold, const RSWeights& rs_weights) {
  std::vector<std::string> missing_predictions, missing_golds;
  std::set<std::string> gold_ids;
  for (const auto& e : gold.entries) {
    gold_ids.insert(e.document.id);
    if (predictions.find(e.document.id) == predictions.end()) {
      missing_predictions.push_back(e.document.id);
    }
  }
  for (const auto& [id, _] : predictions) {
    if (!gold_ids.count(id)) missing_golds.push_back(id);
  }
  if (!missing_predictions.empty() || !missing_golds.empty()) {
    std::string msg = "prediction/gold id mismatch;";
    if (!missing_predictions.empty()) {
      msg += " missing predictions for:";
      for (const auto& id : missing_predictions) msg += " " + id;
      msg += ";";
    }
    if (!missing_golds.empty()) {
      msg += " predictions without gold:";
      for (const auto& id : missing_golds) msg += " " + id;
    }
    throw ConfigError(msg);
  }

  std::vector<std::pair<ParsedResume, ParsedResume>> pairs;
  pairs.reserve(gold.entries.size());
  for (const auto& e : gold.entries) {
    pairs.emplace_back(predictions.at(e.document.id), e.gold);
  }
  return evaluate_corpus(pairs, rs_weights);
}

CalibrationResult run_calibration(const Corpus& validation, const BackendSetup& setup,
                                  const CalibrateOptions& options,
                                  const SkillOntology& ontology) {
  if (validation.entries.empty()) throw ConfigError("validation corpus is empty");

  std::vector<ResumeDocument> documents;
  std::vector<std::pair<ResumeDocument, ParsedResume>> pairs;
  for (const auto& e : validation.entries) {
    documents.push_back(e.document);
    pairs.emplace_back(e.document, e.gold);
  }
  std::vector<DocumentPanel> panels = run_panel(documents, setup.backends, options.parallelism);
  for (auto& panel : panels) {
    for (auto& p : panel.predictions) p.prediction = normalize_fields(p.prediction, ontology);
  }
  std::vector<WeightVector> grid =
      options.grid.empty() ? default_weight_grid(setup.model_ids()) : options.grid;
  return grid_search_weights(pairs, build_prediction_table(panels, setup.model_ids()), grid,
                             options.rs_weights, options.parallelism, ontology);
}

}  // namespace parsemble
