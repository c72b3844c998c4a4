#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "aggregate.hpp"
#include "calibrate.hpp"
#include "corpus.hpp"
#include "extractors.hpp"
#include "metrics.hpp"
#include "normalize.hpp"

namespace parsemble {

// A configured extraction panel: backends plus an optional consensus delegate.
struct BackendSetup {
  std::vector<std::shared_ptr<ExtractorBackend>> backends;
  std::shared_ptr<ConsensusDelegate> delegate;  // null -> deterministic fallback

  std::vector<std::string> model_ids() const;
};

// Builds backends from a config document:
//   {"backends": [{"type": "mock"|"endpoint", ...}, ...],
//    "consensus": {"type": "endpoint", ...}}          (optional)
// Mock backends need a gold source corpus.
BackendSetup build_backends(const nlohmann::json& config, const Corpus* gold_source,
                            const SkillOntology& ontology);
BackendSetup load_backends(const std::string& config_path, const Corpus* gold_source,
                           const SkillOntology& ontology);

struct ParseOptions {
  WeightVector weights;
  bool calibrate = false;  // derive weights with the default grid on this corpus
  int parallelism = 1;
  bool audit = false;
  RSWeights rs_weights = RSWeights::defaults();  // calibration objective
};

struct ParseOutput {
  std::string predictions_jsonl;  // one {"id", "prediction", ["failures"]} per document
  std::string audit_jsonl;        // one {"id", "votes"} per document when audit was requested
  std::size_t n_documents = 0;
  std::size_t n_success = 0;      // documents with an aggregated prediction
  WeightVector used_weights;
};

// Full offline pipeline: extract with every backend, normalize, aggregate.
// Weight coverage of the backend set is checked before any extraction runs.
ParseOutput run_parse(const Corpus& corpus, const BackendSetup& setup,
                      const ParseOptions& options, const SkillOntology& ontology);

// Predictions JSONL (run_parse output format) -> id -> normalized resume.
std::map<std::string, ParsedResume> parse_predictions_jsonl(const std::string& content,
                                                            const SkillOntology& ontology);

// Pairs predictions with corpus golds by id and evaluates. Throws ConfigError
// listing missing ids when the two sides do not align exactly.
MetricReport evaluate_predictions(const std::map<std::string, ParsedResume>& predictions,
                                  const Corpus& gold, const RSWeights& rs_weights);

struct CalibrateOptions {
  std::vector<WeightVector> grid;  // empty -> default {1,2,3}^k grid
  RSWeights rs_weights = RSWeights::defaults();
  int parallelism = 1;
};

// Runs the panel on the corpus once, then grid-searches voting weights.
CalibrationResult run_calibration(const Corpus& validation, const BackendSetup& setup,
                                  const CalibrateOptions& options,
                                  const SkillOntology& ontology);

}  // namespace parsemble
