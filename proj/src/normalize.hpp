#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "schema.hpp"

namespace parsemble {

// Variant -> canonical skill mapping. The map must be idempotent: no canonical
// form may itself be a key mapping to a different canonical form.
struct SkillOntology {
  std::unordered_map<std::string, std::string> canonical_map;
  bool case_insensitive = true;

  static SkillOntology from_json(const nlohmann::json& j);
  static SkillOntology load(const std::string& path);

  // Built-in table of common technology synonyms; also shipped as an
  // editable JSON file under data/.
  static const SkillOntology& builtin();

  nlohmann::ordered_json to_json() const;
  std::string lookup_key(std::string_view canonical_form) const;
};

// Canonicalizes a raw date string. Accepts "YYYY-MM-DD", "YYYY-MM", "YYYY",
// "Mon YYYY", "Month YYYY", "MM/YYYY", "MM-YYYY" and "present"/"current"
// (case-insensitive). Missing month/day default to 01. Unrecognized or
// impossible dates yield "N/A" and a warning. Never throws.
std::string normalize_date(std::string_view raw, std::vector<std::string>* warnings = nullptr);

// Trims, collapses internal whitespace, and folds through the ontology.
// Unmapped skills pass through with their original casing.
std::string canonicalize_skill(std::string_view raw, const SkillOntology& ontology);

// Applies the full normalization pass: scalar trimming and placeholder fill,
// date canonicalization in nested entries, skill folding and first-occurrence
// deduplication, empty-bullet removal. Idempotent; output passes validate.
ParsedResume normalize_fields(const ParsedResume& prediction, const SkillOntology& ontology,
                              std::vector<std::string>* warnings = nullptr);

}  // namespace parsemble
