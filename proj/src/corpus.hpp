#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "normalize.hpp"
#include "schema.hpp"

namespace parsemble {

struct CorpusEntry {
  ResumeDocument document;
  ParsedResume gold;
  std::string profession;  // stratification tag; may be empty for imports
};

// Per-entry generation provenance, written to the metadata sidecar.
struct GenerationRecord {
  std::string id;
  std::string profession;
  std::string layout;
  nlohmann::ordered_json noise;
};

struct Corpus {
  std::vector<CorpusEntry> entries;
  std::vector<GenerationRecord> metadata;  // present only for synthetic corpora

  const CorpusEntry* find(const std::string& id) const;
};

struct SplitSpec {
  double train_fraction = 0.8;
  double validation_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 42;
  bool stratify_by_profession = true;
};

struct SplitResult {
  Corpus train;
  Corpus validation;
  Corpus test;
};

// Noise knobs for the synthetic generator. All randomness derives from the
// per-entry stream, itself a pure function of (seed, entry index).
struct GenOptions {
  double date_format_variation = 1.0;  // P(render a date in a non-ISO accepted format)
  double skill_synonym_rate = 0.35;    // P(render a skill as an ontology variant)
  double field_omission_rate = 0.05;   // P(omit phone / department entirely)
  double edge_case_rate = 0.08;        // P(empty section, single-entry history, long skills)

  static GenOptions from_json(const nlohmann::json& j);
};

struct ProfessionTemplate {
  std::string profession;
  std::string department;
  std::vector<std::string> titles;
  std::vector<std::string> skills;  // canonical forms
  std::vector<std::string> fields_of_study;
};

const std::vector<ProfessionTemplate>& default_professions();  // 24 professions

// JSONL import: one object per line with keys "id", "raw_text", "gold" and an
// optional "profession". Golds are normalized with the given ontology and
// validated. Errors name the offending line; duplicate ids are rejected.
Corpus load_corpus(const std::string& path,
                   const SkillOntology& ontology = SkillOntology::builtin());

// Writes the JSONL corpus; when metadata_path is non-empty and the corpus
// carries generation metadata, writes the sidecar JSON there too.
void save_corpus(const Corpus& corpus, const std::string& path,
                 const std::string& metadata_path = {});

std::string corpus_to_jsonl(const Corpus& corpus);
nlohmann::ordered_json metadata_to_json(const Corpus& corpus);

// Deterministic split. Global sizes follow the floor rule with the remainder
// assigned to train; with stratification each profession deviates from the
// global fractions by at most one document while global sizes stay exact.
// Each split preserves the original corpus order.
SplitResult split_corpus(const Corpus& corpus, const SplitSpec& spec);

// Deterministic synthetic resume corpus; entry i depends only on (seed, i).
Corpus generate_synthetic(std::size_t n, std::uint64_t seed,
                          const std::vector<ProfessionTemplate>& pool = default_professions(),
                          const GenOptions& options = {});

}  // namespace parsemble
