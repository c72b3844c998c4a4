#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "schema.hpp"

namespace parsemble {

// One backend's structured output for one document.
struct ModelPrediction {
  std::string model_id;
  ParsedResume prediction;
  std::chrono::milliseconds latency{0};
  std::string raw_response;  // pre-repair backend output, kept for audit
};

class ExtractorBackend {
 public:
  virtual ~ExtractorBackend() = default;
  virtual const std::string& model_id() const = 0;
  // Throws BackendError on failure; otherwise the prediction contains every
  // schema field (placeholder-filled).
  virtual ModelPrediction extract(const ResumeDocument& document) const = 0;
};

enum class CorruptionKind { kDrop, kTypo, kMergeBullets, kWrongValue };

CorruptionKind corruption_kind_from_string(const std::string& s);
std::string corruption_kind_to_string(CorruptionKind k);

// Error model for the deterministic mock backend: one Bernoulli draw per
// field per document, with a configured corruption applied on failure.
struct MockProfile {
  std::string model_id;
  std::map<std::string, double> per_field_error_rate;       // field -> [0,1]
  std::map<std::string, CorruptionKind> corruption_kind;    // field -> kind
  std::uint64_t seed = 0;

  void check() const;  // all 7 fields present, probabilities in range
  double rate(Field f) const;
  CorruptionKind kind(Field f) const;

  // Uniform rate/kind across all fields.
  static MockProfile uniform(std::string model_id, double rate, CorruptionKind kind,
                             std::uint64_t seed);
};

// Deterministic stand-in for a fine-tuned model: corrupts the document's gold
// resume according to its profile. Output is a pure function of
// (seed, model_id, document.id, gold), so panel runs are reproducible under
// any parallelism degree.
class MockExtractor : public ExtractorBackend {
 public:
  using GoldLookup = std::shared_ptr<const std::map<std::string, ParsedResume>>;

  MockExtractor(MockProfile profile, GoldLookup golds);

  const std::string& model_id() const override { return profile_.model_id; }
  const MockProfile& profile() const { return profile_; }
  ModelPrediction extract(const ResumeDocument& document) const override;

 private:
  MockProfile profile_;
  GoldLookup golds_;
};

struct PanelFailure {
  std::string model_id;
  std::string error;
};

struct DocumentPanel {
  std::string document_id;
  std::vector<ModelPrediction> predictions;  // ordered by model_id
  std::vector<PanelFailure> failures;        // ordered by model_id
};

// Runs every backend on every document, in parallel when parallelism > 1.
// Failed extractions become failure records; the run itself always completes.
std::vector<DocumentPanel> run_panel(const std::vector<ResumeDocument>& documents,
                                     const std::vector<std::shared_ptr<ExtractorBackend>>& backends,
                                     int parallelism = 1);

}  // namespace parsemble
