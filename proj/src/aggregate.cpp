#include "aggregate.hpp"

#include <algorithm>
#include <set>

#include "errors.hpp"

namespace parsemble {

using nlohmann::json;
using nlohmann::ordered_json;

void WeightVector::check() const {
  if (weights.empty()) throw ConfigError("weight vector must have at least one entry");
  for (const auto& [model, w] : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ConfigError("weight for model '" + model + "' must be a positive finite number");
    }
  }
}

double WeightVector::total() const {
  double t = 0.0;
  for (const auto& [_, w] : weights) t += w;
  return t;
}

WeightVector WeightVector::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("weights must be a JSON object of model_id -> weight");
  WeightVector v;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number()) {
      throw ConfigError("weight for model '" + it.key() + "' must be a number");
    }
    v.weights[it.key()] = it.value().get<double>();
  }
  v.check();
  return v;
}

ordered_json WeightVector::to_json() const {
  ordered_json o;
  for (const auto& [model, w] : weights) o[model] = w;
  return o;
}

ordered_json FieldVote::to_json() const {
  ordered_json o;
  o["field"] = field;
  o["strategy"] = strategy_used;
  o["winner"] = winner;
  o["fallback"] = fallback;
  ordered_json cands = ordered_json::array();
  for (const auto& c : candidates) {
    ordered_json e;
    e["model_id"] = c.model_id;
    e["weight"] = c.weight;
    e["value"] = c.value;
    cands.push_back(std::move(e));
  }
  o["candidates"] = std::move(cands);
  o["tally"] = tally;
  o["notes"] = notes;
  return o;
}

VoteOutcome weighted_majority_vote(
    const std::vector<std::pair<std::string, double>>& candidates) {
  if (candidates.empty()) throw ConfigError("weighted_majority_vote: no candidates");
  struct Info {
    double cumulative = 0;
    double max_single = 0;
  };
  std::map<std::string, Info> info;
  for (const auto& [value, weight] : candidates) {
    if (!(weight > 0.0)) throw ConfigError("weighted_majority_vote: weights must be > 0");
    auto& i = info[value];
    i.cumulative += weight;
    i.max_single = std::max(i.max_single, weight);
  }

  double best_cumulative = 0;
  for (const auto& [_, i] : info) best_cumulative = std::max(best_cumulative, i.cumulative);

  std::vector<std::string> tied;
  for (const auto& [value, i] : info) {
    if (i.cumulative == best_cumulative) tied.push_back(value);
  }
  // "N/A" loses every tie against a real value.
  if (tied.size() > 1) {
    auto na = std::find(tied.begin(), tied.end(), kMissing);
    if (na != tied.end()) tied.erase(na);
  }
  if (tied.size() > 1) {
    double best_single = 0;
    for (const auto& v : tied) best_single = std::max(best_single, info[v].max_single);
    std::vector<std::string> next;
    for (const auto& v : tied) {
      if (info[v].max_single == best_single) next.push_back(v);
    }
    tied = std::move(next);
  }
  VoteOutcome out;
  out.winner = *std::min_element(tied.begin(), tied.end());
  for (const auto& [value, i] : info) out.tally[value] = i.cumulative;
  return out;
}

std::vector<std::string> weighted_threshold_vote(
    const std::vector<std::pair<std::vector<std::string>, double>>& skill_lists,
    double threshold) {
  struct Support {
    double cumulative = 0;
    std::size_t first_list = 0;
    std::size_t first_pos = 0;
  };
  std::map<std::string, Support> support;
  for (std::size_t li = 0; li < skill_lists.size(); ++li) {
    const auto& [skills, weight] = skill_lists[li];
    if (!(weight > 0.0)) throw ConfigError("weighted_threshold_vote: weights must be > 0");
    std::set<std::string> seen;  // a skill counts once per list
    for (std::size_t pos = 0; pos < skills.size(); ++pos) {
      const std::string& skill = skills[pos];
      if (!seen.insert(skill).second) continue;
      auto it = support.find(skill);
      if (it == support.end()) {
        support[skill] = {weight, li, pos};
      } else {
        it->second.cumulative += weight;
      }
    }
  }

  struct Item {
    std::string skill;
    Support s;
  };
  std::vector<Item> kept;
  for (auto& [skill, s] : support) {
    if (s.cumulative > threshold) kept.push_back({skill, s});
  }
  std::sort(kept.begin(), kept.end(), [](const Item& a, const Item& b) {
    if (a.s.cumulative != b.s.cumulative) return a.s.cumulative > b.s.cumulative;
    if (a.s.first_list != b.s.first_list) return a.s.first_list < b.s.first_list;
    return a.s.first_pos < b.s.first_pos;
  });
  std::vector<std::string> out;
  out.reserve(kept.size());
  for (auto& item : kept) out.push_back(std::move(item.skill));
  return out;
}

namespace {

constexpr const char* kEmptyList = "[]";

// Weighted majority over distinct candidate serializations. With a dominant
// top weight (e.g. {3,2,1}) this always selects the heaviest model's
// candidate; otherwise agreeing models can outvote it.
ConsensusResult deterministic_consensus(const ConsensusRequest& request) {
  struct Group {
    double cumulative = 0;
    double max_single = 0;
    std::string min_model;
  };
  std::map<std::string, Group> groups;
  for (const auto& c : request.candidates) {
    auto& g = groups[c.value_json];
    g.cumulative += c.weight;
    g.max_single = std::max(g.max_single, c.weight);
    if (g.min_model.empty() || c.model_id < g.min_model) g.min_model = c.model_id;
  }

  double best = 0;
  for (const auto& [_, g] : groups) best = std::max(best, g.cumulative);
  std::vector<const std::pair<const std::string, Group>*> tied;
  for (const auto& kv : groups) {
    if (kv.second.cumulative == best) tied.push_back(&kv);
  }
  if (tied.size() > 1) {
    // An empty list is the nested placeholder; it loses ties like "N/A".
    std::vector<const std::pair<const std::string, Group>*> real;
    for (auto* kv : tied) {
      if (kv->first != kEmptyList) real.push_back(kv);
    }
    if (!real.empty()) tied = std::move(real);
  }
  if (tied.size() > 1) {
    double best_single = 0;
    for (auto* kv : tied) best_single = std::max(best_single, kv->second.max_single);
    std::vector<const std::pair<const std::string, Group>*> next;
    for (auto* kv : tied) {
      if (kv->second.max_single == best_single) next.push_back(kv);
    }
    tied = std::move(next);
  }
  const std::pair<const std::string, Group>* winner = tied.front();
  for (auto* kv : tied) {
    if (kv->second.min_model < winner->second.min_model) winner = kv;
  }
  ConsensusResult out;
  out.value_json = winner->first;
  out.fallback = true;
  return out;
}

// Parses, normalizes, and validates a delegate response for the given field;
// returns the canonical serialization. Throws on anything invalid.
std::string sanitize_delegate_value(const std::string& field, const std::string& value_json,
                                    const SkillOntology& ontology) {
  ParsedResume carrier;
  if (field == "experience") {
    carrier.experience = experience_list_from_json_text(value_json);
  } else {
    carrier.education = education_list_from_json_text(value_json);
  }
  ParsedResume normalized = normalize_fields(carrier, ontology);
  auto violations = validate(normalized);
  if (!violations.empty()) {
    throw SchemaError(violations.front().field,
                      "delegate response failed validation: " + violations.front().message);
  }
  return field == "experience" ? serialize_experience_list(normalized.experience)
                               : serialize_education_list(normalized.education);
}

}  // namespace

ConsensusResult consensus(const ConsensusRequest& request, ConsensusDelegate* delegate,
                          const SkillOntology& ontology) {
  {
    std::set<std::string> distinct;
    for (const auto& c : request.candidates) distinct.insert(c.value_json);
    if (distinct.size() < 2) {
      throw ConfigError("consensus requires at least two distinct candidates");
    }
  }
  if (delegate != nullptr) {
    try {
      std::string response = delegate->resolve(request);
      ConsensusResult out;
      out.value_json = sanitize_delegate_value(request.field, response, ontology);
      out.fallback = false;
      return out;
    } catch (const std::exception& e) {
      ConsensusResult out = deterministic_consensus(request);
      out.notes.push_back("consensus delegate failed (" + std::string(e.what()) +
                          "); deterministic fallback applied");
      return out;
    }
  }
  return deterministic_consensus(request);
}

AggregateResult aggregate(const std::vector<ModelPrediction>& predictions,
                          const WeightVector& weights, ConsensusDelegate* delegate,
                          const ResumeDocument* document, const SkillOntology& ontology) {
  if (predictions.empty()) throw ConfigError("aggregate requires at least one prediction");
  weights.check();

  std::vector<const ModelPrediction*> panel;
  panel.reserve(predictions.size());
  for (const auto& p : predictions) panel.push_back(&p);
  std::sort(panel.begin(), panel.end(), [](const ModelPrediction* a, const ModelPrediction* b) {
    return a->model_id < b->model_id;
  });
  for (std::size_t i = 0; i < panel.size(); ++i) {
    if (weights.weights.find(panel[i]->model_id) == weights.weights.end()) {
      throw ConfigError("prediction from model '" + panel[i]->model_id +
                        "' has no configured weight");
    }
    if (i > 0 && panel[i]->model_id == panel[i - 1]->model_id) {
      throw ConfigError("duplicate prediction for model '" + panel[i]->model_id + "'");
    }
  }

  double panel_weight = 0;
  for (const auto* p : panel) panel_weight += weights.weights.at(p->model_id);

  AggregateResult out;
  for (Field f : kAllFields) {
    FieldVote fv;
    fv.field = field_name(f);

    if (is_scalar_field(f)) {
      std::vector<std::pair<std::string, double>> candidates;
      for (const auto* p : panel) {
        const double w = weights.weights.at(p->model_id);
        candidates.emplace_back(p->prediction.scalar(f), w);
        fv.candidates.push_back({p->prediction.scalar(f), p->model_id, w});
      }
      VoteOutcome vote = weighted_majority_vote(candidates);
      fv.strategy_used = "majority";
      fv.winner = vote.winner;
      fv.tally = std::move(vote.tally);
      out.resume.scalar(f) = fv.winner;
    } else if (f == Field::kSkills) {
      std::vector<std::pair<std::vector<std::string>, double>> lists;
      for (const auto* p : panel) {
        const double w = weights.weights.at(p->model_id);
        lists.emplace_back(p->prediction.skills, w);
        const std::string value = serialize_skill_list(p->prediction.skills);
        fv.candidates.push_back({value, p->model_id, w});
        fv.tally[value] += w;
      }
      out.resume.skills = weighted_threshold_vote(lists, panel_weight / 2.0);
      fv.strategy_used = "threshold";
      fv.winner = serialize_skill_list(out.resume.skills);
    } else {
      std::vector<ConsensusCandidate> candidates;
      for (const auto* p : panel) {
        const double w = weights.weights.at(p->model_id);
        const std::string value = f == Field::kExperience
                                      ? serialize_experience_list(p->prediction.experience)
                                      : serialize_education_list(p->prediction.education);
        candidates.push_back({p->model_id, w, value});
        fv.candidates.push_back({value, p->model_id, w});
        fv.tally[value] += w;
      }
      std::set<std::string> distinct;
      for (const auto& c : candidates) distinct.insert(c.value_json);
      if (distinct.size() == 1) {
        fv.strategy_used = "passthrough";
        fv.winner = candidates.front().value_json;
      } else {
        ConsensusRequest request;
        request.field = fv.field;
        request.document_text = document != nullptr ? document->raw_text : "";
        request.candidates = std::move(candidates);
        ConsensusResult res = consensus(request, delegate, ontology);
        fv.strategy_used = "consensus";
        fv.fallback = res.fallback;
        fv.winner = res.value_json;
        fv.notes = std::move(res.notes);
      }
      if (f == Field::kExperience) {
        out.resume.experience = experience_list_from_json_text(fv.winner);
      } else {
        out.resume.education = education_list_from_json_text(fv.winner);
      }
    }
    out.votes.push_back(std::move(fv));
  }
  return out;
}

}  // namespace parsemble
