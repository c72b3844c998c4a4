#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "extractors.hpp"
#include "normalize.hpp"
#include "schema.hpp"

namespace parsemble {

// Per-model voting weights. All weights must be strictly positive.
struct WeightVector {
  std::map<std::string, double> weights;  // model_id -> weight

  void check() const;
  double total() const;
  static WeightVector from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

struct VoteCandidate {
  std::string value;  // scalar text, or canonical JSON for list-valued fields
  std::string model_id;
  double weight = 0;
};

// Audit record for one field of one document.
struct FieldVote {
  std::string field;
  std::vector<VoteCandidate> candidates;  // in model_id order
  std::string strategy_used;              // majority | threshold | consensus | passthrough
  std::string winner;
  std::map<std::string, double> tally;    // value -> cumulative weight
  bool fallback = false;                  // consensus resolved by the deterministic fallback
  std::vector<std::string> notes;

  nlohmann::ordered_json to_json() const;
};

struct VoteOutcome {
  std::string winner;
  std::map<std::string, double> tally;
};

// Selects the candidate value with the largest cumulative weight. Ties break
// to the value with the highest single supporting weight, then to the
// lexicographically smallest value. "N/A" participates like any value but
// loses every tie against a non-placeholder.
VoteOutcome weighted_majority_vote(const std::vector<std::pair<std::string, double>>& candidates);

// Keeps skills whose cumulative supporting weight strictly exceeds the
// threshold. A skill counts at most once per list. Output is ordered by
// descending cumulative weight; ties keep first-appearance order across the
// lists (callers pass lists in model_id order).
std::vector<std::string> weighted_threshold_vote(
    const std::vector<std::pair<std::vector<std::string>, double>>& skill_lists,
    double threshold);

struct ConsensusCandidate {
  std::string model_id;
  double weight = 0;
  std::string value_json;  // canonical serialization of the nested list
};

struct ConsensusRequest {
  std::string field;  // "experience" or "education"
  std::string document_text;
  std::vector<ConsensusCandidate> candidates;  // >= 2 distinct values
};

// Fuses conflicting nested candidates. Implementations may call out to an
// LLM endpoint; they must return the fused list as JSON text or throw.
class ConsensusDelegate {
 public:
  virtual ~ConsensusDelegate() = default;
  virtual std::string resolve(const ConsensusRequest& request) = 0;
};

struct ConsensusResult {
  std::string value_json;
  bool fallback = false;
  std::vector<std::string> notes;
};

// Resolves a nested-field conflict. With a delegate, its response is repaired,
// normalized, and validated; any failure falls back. Without one, the
// deterministic fallback applies: a weighted majority over the distinct
// candidate serializations (ties: highest single supporting weight, then
// lexicographically smallest supporting model_id; an empty list is a
// placeholder and loses ties). Under a dominant top weight this always
// returns the heaviest model's candidate.
ConsensusResult consensus(const ConsensusRequest& request, ConsensusDelegate* delegate,
                          const SkillOntology& ontology);

struct AggregateResult {
  ParsedResume resume;
  std::vector<FieldVote> votes;  // exactly 7, in canonical field order
};

// Fuses normalized per-model predictions: majority vote for scalars,
// threshold vote at half the panel weight for skills, consensus for nested
// fields when candidates conflict. Throws ConfigError when a prediction's
// model_id has no weight.
AggregateResult aggregate(const std::vector<ModelPrediction>& predictions,
                          const WeightVector& weights, ConsensusDelegate* delegate = nullptr,
                          const ResumeDocument* document = nullptr,
                          const SkillOntology& ontology = SkillOntology::builtin());

}  // namespace parsemble
