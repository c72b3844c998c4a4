#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace parsemble {

// Placeholder for missing scalar values.
inline constexpr const char* kMissing = "N/A";
inline constexpr const char* kPresent = "present";

// The seven resume fields, in canonical serialization order.
enum class Field {
  kName,
  kEmail,
  kPhone,
  kDepartment,
  kSkills,
  kExperience,
  kEducation,
};

inline constexpr std::array<Field, 7> kAllFields = {
    Field::kName,  Field::kEmail,      Field::kPhone,     Field::kDepartment,
    Field::kSkills, Field::kExperience, Field::kEducation,
};

std::string_view field_name(Field f);
bool is_scalar_field(Field f);
bool is_nested_field(Field f);

struct ExperienceEntry {
  std::string title = kMissing;
  std::string company = kMissing;
  std::string location = kMissing;
  std::string start_date = kMissing;   // YYYY-MM-DD, "N/A", or "present"
  std::string end_date = kMissing;
  std::vector<std::string> bullets;

  bool operator==(const ExperienceEntry&) const = default;
};

struct EducationEntry {
  std::string degree = kMissing;
  std::string institution = kMissing;
  std::string field_of_study = kMissing;
  std::string start_date = kMissing;
  std::string end_date = kMissing;

  bool operator==(const EducationEntry&) const = default;
};

struct ParsedResume {
  std::string name = kMissing;
  std::string email = kMissing;
  std::string phone = kMissing;
  std::string department = kMissing;
  std::vector<std::string> skills;
  std::vector<ExperienceEntry> experience;
  std::vector<EducationEntry> education;

  bool operator==(const ParsedResume&) const = default;

  const std::string& scalar(Field f) const;
  std::string& scalar(Field f);
};

// An unstructured input document.
struct ResumeDocument {
  std::string id;
  std::string raw_text;
};

struct Violation {
  std::string field;   // e.g. "experience[0].start_date"
  std::string rule;    // e.g. "date_pattern"
  std::string message;
};

// Parses resume JSON text. Absent fields become placeholders ("N/A" for
// scalars, empty lists otherwise). Unknown keys are skipped; when `warnings`
// is given, each skipped key is recorded there. Throws ParseError on
// malformed JSON (byte offset in the message) and SchemaError when a present
// field has the wrong JSON type.
ParsedResume parse_resume_json(std::string_view text, std::vector<std::string>* warnings = nullptr);

// Same, starting from an already-parsed JSON value.
ParsedResume resume_from_json(const nlohmann::json& j, std::vector<std::string>* warnings = nullptr);

// Canonical JSON: fixed key order (name, email, phone, department, skills,
// experience, education), compact, UTF-8. Byte-identical for equal inputs.
std::string serialize_resume(const ParsedResume& resume);
nlohmann::ordered_json resume_to_json(const ParsedResume& resume);

nlohmann::ordered_json experience_to_json(const ExperienceEntry& e);
nlohmann::ordered_json education_to_json(const EducationEntry& e);
ExperienceEntry experience_from_json(const nlohmann::json& j, const std::string& path,
                                     std::vector<std::string>* warnings = nullptr);
EducationEntry education_from_json(const nlohmann::json& j, const std::string& path,
                                   std::vector<std::string>* warnings = nullptr);

// Canonical serialization of the two nested fields and the skill list,
// used wherever list-valued candidates are compared byte-for-byte.
std::string serialize_experience_list(const std::vector<ExperienceEntry>& entries);
std::string serialize_education_list(const std::vector<EducationEntry>& entries);
std::string serialize_skill_list(const std::vector<std::string>& skills);

std::vector<ExperienceEntry> experience_list_from_json_text(std::string_view text);
std::vector<EducationEntry> education_list_from_json_text(std::string_view text);

// Checks the type invariants; empty result means the resume is valid.
std::vector<Violation> validate(const ParsedResume& resume);

// True for "YYYY-MM-DD" (pattern check), "N/A", or "present".
bool is_canonical_date(std::string_view s);

}  // namespace parsemble
