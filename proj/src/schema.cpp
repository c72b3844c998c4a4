#include "schema.hpp"

#include <cctype>

#include "errors.hpp"

namespace parsemble {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view field_name(Field f) {
  switch (f) {
    case Field::kName: return "name";
    case Field::kEmail: return "email";
    case Field::kPhone: return "phone";
    case Field::kDepartment: return "department";
    case Field::kSkills: return "skills";
    case Field::kExperience: return "experience";
    case Field::kEducation: return "education";
  }
  return "";
}

bool is_scalar_field(Field f) {
  return f == Field::kName || f == Field::kEmail || f == Field::kPhone ||
         f == Field::kDepartment;
}

bool is_nested_field(Field f) {
  return f == Field::kExperience || f == Field::kEducation;
}

const std::string& ParsedResume::scalar(Field f) const {
  switch (f) {
    case Field::kName: return name;
    case Field::kEmail: return email;
    case Field::kPhone: return phone;
    case Field::kDepartment: return department;
    default: throw Error("not a scalar field: " + std::string(field_name(f)));
  }
}

std::string& ParsedResume::scalar(Field f) {
  return const_cast<std::string&>(static_cast<const ParsedResume&>(*this).scalar(f));
}

namespace {

std::string scalar_from(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || j.at(key).is_null()) return kMissing;
  const json& v = j.at(key);
  if (!v.is_string()) {
    throw SchemaError(path.empty() ? key : path + "." + key,
                      "field '" + (path.empty() ? std::string(key) : path + "." + key) +
                          "' must be a string");
  }
  return v.get<std::string>();
}

std::vector<std::string> string_list_from(const json& j, const char* key, const std::string& path) {
  std::vector<std::string> out;
  if (!j.contains(key) || j.at(key).is_null()) return out;
  const json& v = j.at(key);
  const std::string full = path.empty() ? key : path + "." + key;
  if (!v.is_array()) throw SchemaError(full, "field '" + full + "' must be an array");
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) {
      throw SchemaError(full + "[" + std::to_string(i) + "]",
                        "field '" + full + "[" + std::to_string(i) + "]' must be a string");
    }
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

void warn_unknown_keys(const json& j, std::initializer_list<const char*> known,
                       const std::string& path, std::vector<std::string>* warnings) {
  if (!warnings) return;
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool found = false;
    for (const char* k : known) {
      if (it.key() == k) { found = true; break; }
    }
    if (!found) {
      warnings->push_back("ignored unknown key '" +
                          (path.empty() ? it.key() : path + "." + it.key()) + "'");
    }
  }
}

}  // namespace

ExperienceEntry experience_from_json(const json& j, const std::string& path,
                                     std::vector<std::string>* warnings) {
  if (!j.is_object()) throw SchemaError(path, "field '" + path + "' must be an object");
  ExperienceEntry e;
  e.title = scalar_from(j, "title", path);
  e.company = scalar_from(j, "company", path);
  e.location = scalar_from(j, "location", path);
  e.start_date = scalar_from(j, "start_date", path);
  e.end_date = scalar_from(j, "end_date", path);
  e.bullets = string_list_from(j, "bullets", path);
  warn_unknown_keys(j, {"title", "company", "location", "start_date", "end_date", "bullets"},
                    path, warnings);
  return e;
}

EducationEntry education_from_json(const json& j, const std::string& path,
                                   std::vector<std::string>* warnings) {
  if (!j.is_object()) throw SchemaError(path, "field '" + path + "' must be an object");
  EducationEntry e;
  e.degree = scalar_from(j, "degree", path);
  e.institution = scalar_from(j, "institution", path);
  e.field_of_study = scalar_from(j, "field_of_study", path);
  e.start_date = scalar_from(j, "start_date", path);
  e.end_date = scalar_from(j, "end_date", path);
  warn_unknown_keys(j, {"degree", "institution", "field_of_study", "start_date", "end_date"},
                    path, warnings);
  return e;
}

ParsedResume resume_from_json(const json& j, std::vector<std::string>* warnings) {
  if (!j.is_object()) throw SchemaError("", "resume JSON must be an object");
  ParsedResume r;
  r.name = scalar_from(j, "name", "");
  r.email = scalar_from(j, "email", "");
  r.phone = scalar_from(j, "phone", "");
  r.department = scalar_from(j, "department", "");
  r.skills = string_list_from(j, "skills", "");

  if (j.contains("experience") && !j.at("experience").is_null()) {
    const json& v = j.at("experience");
    if (!v.is_array()) throw SchemaError("experience", "field 'experience' must be an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      r.experience.push_back(
          experience_from_json(v[i], "experience[" + std::to_string(i) + "]", warnings));
    }
  }
  if (j.contains("education") && !j.at("education").is_null()) {
    const json& v = j.at("education");
    if (!v.is_array()) throw SchemaError("education", "field 'education' must be an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      r.education.push_back(
          education_from_json(v[i], "education[" + std::to_string(i) + "]", warnings));
    }
  }
  warn_unknown_keys(j, {"name", "email", "phone", "department", "skills", "experience",
                        "education"},
                    "", warnings);
  return r;
}

ParsedResume parse_resume_json(std::string_view text, std::vector<std::string>* warnings) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what(),
                     e.byte);
  }
  return resume_from_json(j, warnings);
}

ordered_json experience_to_json(const ExperienceEntry& e) {
  ordered_json o;
  o["title"] = e.title;
  o["company"] = e.company;
  o["location"] = e.location;
  o["start_date"] = e.start_date;
  o["end_date"] = e.end_date;
  o["bullets"] = e.bullets;
  return o;
}

ordered_json education_to_json(const EducationEntry& e) {
  ordered_json o;
  o["degree"] = e.degree;
  o["institution"] = e.institution;
  o["field_of_study"] = e.field_of_study;
  o["start_date"] = e.start_date;
  o["end_date"] = e.end_date;
  return o;
}

ordered_json resume_to_json(const ParsedResume& r) {
  ordered_json o;
  o["name"] = r.name;
  o["email"] = r.email;
  o["phone"] = r.phone;
  o["department"] = r.department;
  o["skills"] = r.skills;
  ordered_json exp = ordered_json::array();
  for (const auto& e : r.experience) exp.push_back(experience_to_json(e));
  o["experience"] = std::move(exp);
  ordered_json edu = ordered_json::array();
  for (const auto& e : r.education) edu.push_back(education_to_json(e));
  o["education"] = std::move(edu);
  return o;
}

std::string serialize_resume(const ParsedResume& r) { return resume_to_json(r).dump(); }

std::string serialize_experience_list(const std::vector<ExperienceEntry>& entries) {
  ordered_json a = ordered_json::array();
  for (const auto& e : entries) a.push_back(experience_to_json(e));
  return a.dump();
}

std::string serialize_education_list(const std::vector<EducationEntry>& entries) {
  ordered_json a = ordered_json::array();
  for (const auto& e : entries) a.push_back(education_to_json(e));
  return a.dump();
}

std::string serialize_skill_list(const std::vector<std::string>& skills) {
  ordered_json a = skills;
  return a.dump();
}

std::vector<ExperienceEntry> experience_list_from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what(), e.byte);
  }
  if (!j.is_array()) throw SchemaError("experience", "experience candidate must be an array");
  std::vector<ExperienceEntry> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(experience_from_json(j[i], "experience[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<EducationEntry> education_list_from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what(), e.byte);
  }
  if (!j.is_array()) throw SchemaError("education", "education candidate must be an array");
  std::vector<EducationEntry> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(education_from_json(j[i], "education[" + std::to_string(i) + "]"));
  }
  return out;
}

bool is_canonical_date(std::string_view s) {
  if (s == kMissing || s == kPresent) return true;
  if (s.size() != 10) return false;
  for (std::size_t i = 0; i < 10; ++i) {
    if (i == 4 || i == 7) {
      if (s[i] != '-') return false;
    } else if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
      return false;
    }
  }
  return true;
}

namespace {

void check_date(const std::string& value, const std::string& path, std::vector<Violation>& out) {
  if (!is_canonical_date(value)) {
    out.push_back({path, "date_pattern",
                   "date '" + value + "' is not YYYY-MM-DD, \"N/A\", or \"present\""});
  }
}

}  // namespace

std::vector<Violation> validate(const ParsedResume& r) {
  std::vector<Violation> out;
  for (Field f : kAllFields) {
    if (!is_scalar_field(f)) continue;
    if (r.scalar(f).empty()) {
      out.push_back({std::string(field_name(f)), "scalar_empty",
                     "scalar field must be non-empty text or \"N/A\""});
    }
  }
  for (std::size_t i = 0; i < r.skills.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (r.skills[i] == r.skills[k]) {
        out.push_back({"skills", "duplicate_skill",
                       "duplicate skill '" + r.skills[i] + "' at index " + std::to_string(i)});
        break;
      }
    }
  }
  for (std::size_t i = 0; i < r.experience.size(); ++i) {
    const auto& e = r.experience[i];
    const std::string base = "experience[" + std::to_string(i) + "]";
    check_date(e.start_date, base + ".start_date", out);
    check_date(e.end_date, base + ".end_date", out);
    for (std::size_t b = 0; b < e.bullets.size(); ++b) {
      if (e.bullets[b].empty()) {
        out.push_back({base + ".bullets[" + std::to_string(b) + "]", "empty_bullet",
                       "bullets must not contain empty strings"});
      }
    }
  }
  for (std::size_t i = 0; i < r.education.size(); ++i) {
    const auto& e = r.education[i];
    const std::string base = "education[" + std::to_string(i) + "]";
    check_date(e.start_date, base + ".start_date", out);
    check_date(e.end_date, base + ".end_date", out);
  }
  return out;
}

}  // namespace parsemble
