#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "schema.hpp"

namespace parsemble {

// Per-field weights for the recruitment similarity composite. The default
// puts 0.35 on skills, 0.15 each on email and phone, and splits the
// remaining 0.35 evenly across name, department, experience, and education.
struct RSWeights {
  std::map<std::string, double> weights;  // field name -> weight, all 7 present

  static RSWeights defaults();
  // Sets the skills weight and rescales the other six proportionally so the
  // total stays 1. skills_weight must be in [0, 1).
  static RSWeights with_skills_weight(double skills_weight);
  static RSWeights from_json(const nlohmann::json& j);

  // All weights >= 0, every field present, total == 1 within 1e-12.
  void check() const;
  double weight(Field f) const;
};

// Text similarity primitives. Tokenization is lowercase + whitespace split.
double token_f1(std::string_view pred_text, std::string_view gold_text);
double bleu(std::string_view pred_text, std::string_view gold_text);
double rouge_l(std::string_view pred_text, std::string_view gold_text);
double levenshtein_similarity(std::string_view a, std::string_view b);

// Jaccard similarity of the two canonical skill sets; both empty -> 1.
double skill_jaccard(const std::vector<std::string>& pred, const std::vector<std::string>& gold);

// Canonical linearization used for nested-field text metrics: one entry per
// block, scalar subfields joined with " | ", bullets as separate "- " lines.
std::string linearize_experience(const std::vector<ExperienceEntry>& entries);
std::string linearize_education(const std::vector<EducationEntry>& entries);

// Flattens any field of a resume to comparable text (scalars verbatim,
// skills space-joined, nested fields linearized).
std::string field_text(const ParsedResume& r, Field f);

// Fraction of the 7 fields matching exactly: scalars by text equality,
// skills by set equality, nested fields by canonical-serialization equality.
double exact_match(const ParsedResume& pred, const ParsedResume& gold);

// Per-field similarity used inside RS: Levenshtein for scalars, Jaccard for
// skills, ROUGE-L on the linearization for nested fields.
double field_similarity(const ParsedResume& pred, const ParsedResume& gold, Field f);

double recruitment_similarity(const ParsedResume& pred, const ParsedResume& gold,
                              const RSWeights& rs_weights);

struct FieldScores {
  double em = 0;
  double f1 = 0;
  double bleu = 0;
  double rouge_l = 0;
  double similarity = 0;  // the RS component for this field
};

struct MetricReport {
  double em = 0;        // field-level exact match, averaged over documents
  double f1 = 0;        // mean over documents of the 7-field mean token F1
  double bleu = 0;      // same averaging, BLEU-4
  double rouge_l = 0;   // same averaging, ROUGE-L F-measure
  double rs = 0;        // mean recruitment similarity
  std::map<std::string, FieldScores> per_field;
  std::map<std::string, double> nested_rouge;  // experience/education ROUGE-L
  std::size_t n_documents = 0;
};

// Averages all metrics over the corpus. Both sides of every pair must be
// normalized. Throws ConfigError on an empty pair list or invalid weights.
MetricReport evaluate_corpus(const std::vector<std::pair<ParsedResume, ParsedResume>>& pairs,
                             const RSWeights& rs_weights);

nlohmann::ordered_json report_to_json(const MetricReport& report);
MetricReport report_from_json(const nlohmann::json& j);

// Aligned plain-text table: one row per metric, one column per labeled run.
std::string render_report_table(
    const std::vector<std::pair<std::string, MetricReport>>& runs);

}  // namespace parsemble
