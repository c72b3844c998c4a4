#include "normalize.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace parsemble {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

int month_from_name(std::string_view name) {
  static const struct { const char* full; const char* abbr; } kMonths[12] = {
      {"january", "jan"}, {"february", "feb"}, {"march", "mar"},
      {"april", "apr"},   {"may", "may"},      {"june", "jun"},
      {"july", "jul"},    {"august", "aug"},   {"september", "sep"},
      {"october", "oct"}, {"november", "nov"}, {"december", "dec"},
  };
  std::string n = to_lower(name);
  if (!n.empty() && (n.back() == '.' || n.back() == ',')) n.pop_back();
  if (n == "sept") return 9;
  for (int i = 0; i < 12; ++i) {
    if (n == kMonths[i].full || n == kMonths[i].abbr) return i + 1;
  }
  return 0;
}

bool valid_day(int year, int month, int day) {
  static const int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (day < 1) return false;
  int max = kDays[month - 1];
  if (month == 2) {
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    if (leap) max = 29;
  }
  return day <= max;
}

std::string format_date(int y, int m, int d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

// Attempts to parse a trimmed date string; returns empty on failure.
std::string try_parse_date(const std::string& s) {
  // Split on a single separator kind first.
  auto split = [&](char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
      if (i == s.size() || s[i] == sep) {
        parts.push_back(s.substr(start, i - start));
        start = i + 1;
      }
    }
    return parts;
  };

  if (s.find('-') != std::string::npos && s.find('/') == std::string::npos) {
    auto p = split('-');
    if (p.size() == 3 && p[0].size() == 4 && all_digits(p[0]) && all_digits(p[1]) &&
        all_digits(p[2]) && p[1].size() <= 2 && p[2].size() <= 2) {
      int y = std::stoi(p[0]), m = std::stoi(p[1]), d = std::stoi(p[2]);
      if (m >= 1 && m <= 12 && valid_day(y, m, d)) return format_date(y, m, d);
      return {};
    }
    if (p.size() == 2 && p[0].size() == 4 && all_digits(p[0]) && all_digits(p[1]) &&
        p[1].size() <= 2) {
      int y = std::stoi(p[0]), m = std::stoi(p[1]);
      if (m >= 1 && m <= 12) return format_date(y, m, 1);
      return {};
    }
    if (p.size() == 2 && p[1].size() == 4 && all_digits(p[0]) && all_digits(p[1]) &&
        p[0].size() <= 2) {
      int m = std::stoi(p[0]), y = std::stoi(p[1]);
      if (m >= 1 && m <= 12) return format_date(y, m, 1);
      return {};
    }
    return {};
  }

  if (s.find('/') != std::string::npos) {
    auto p = split('/');
    if (p.size() == 2 && p[1].size() == 4 && all_digits(p[0]) && all_digits(p[1]) &&
        p[0].size() <= 2) {
      int m = std::stoi(p[0]), y = std::stoi(p[1]);
      if (m >= 1 && m <= 12) return format_date(y, m, 1);
    }
    return {};
  }

  if (s.size() == 4 && all_digits(s)) {
    return format_date(std::stoi(s), 1, 1);
  }

  // "Mon YYYY" / "Month YYYY", optional '.' or ',' after the month name.
  {
    std::istringstream in(s);
    std::string a, b, extra;
    if ((in >> a >> b) && !(in >> extra)) {
      int m = month_from_name(a);
      if (m != 0 && b.size() == 4 && all_digits(b)) {
        return format_date(std::stoi(b), m, 1);
      }
    }
  }
  return {};
}

}  // namespace

std::string normalize_date(std::string_view raw, std::vector<std::string>* warnings) {
  const std::string s = collapse_spaces(trim(raw));
  if (s.empty()) return kMissing;
  const std::string lower = to_lower(s);
  if (lower == "n/a") return kMissing;
  if (lower == "present" || lower == "current") return kPresent;

  std::string parsed = try_parse_date(s);
  if (!parsed.empty()) return parsed;

  if (warnings) warnings->push_back("unrecognized date '" + std::string(raw) + "' -> N/A");
  return kMissing;
}

SkillOntology SkillOntology::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("ontology must be a JSON object");
  SkillOntology o;
  if (j.contains("case_insensitive")) {
    if (!j.at("case_insensitive").is_boolean()) {
      throw ConfigError("ontology 'case_insensitive' must be a boolean");
    }
    o.case_insensitive = j.at("case_insensitive").get<bool>();
  }
  if (!j.contains("map") || !j.at("map").is_object()) {
    throw ConfigError("ontology must contain a 'map' object of variant -> canonical");
  }
  for (auto it = j.at("map").begin(); it != j.at("map").end(); ++it) {
    if (!it.value().is_string()) {
      throw ConfigError("ontology entry '" + it.key() + "' must map to a string");
    }
    std::string key = o.case_insensitive ? to_lower(it.key()) : it.key();
    o.canonical_map[collapse_spaces(trim(key))] = it.value().get<std::string>();
  }
  // Idempotence: a canonical form must not remap to a different canonical form.
  for (const auto& [variant, canonical] : o.canonical_map) {
    auto it = o.canonical_map.find(o.lookup_key(canonical));
    if (it != o.canonical_map.end() && it->second != canonical) {
      throw ConfigError("ontology is not idempotent: '" + variant + "' -> '" + canonical +
                        "' -> '" + it->second + "'");
    }
  }
  return o;
}

std::string SkillOntology::lookup_key(std::string_view canonical_form) const {
  std::string key = collapse_spaces(trim(canonical_form));
  return case_insensitive ? to_lower(key) : key;
}

SkillOntology SkillOntology::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ontology file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("malformed ontology JSON in " + path + ": " + e.what(), e.byte);
  }
  return from_json(j);
}

ordered_json SkillOntology::to_json() const {
  ordered_json o;
  o["case_insensitive"] = case_insensitive;
  ordered_json m;
  std::vector<std::string> keys;
  keys.reserve(canonical_map.size());
  for (const auto& [k, _] : canonical_map) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (const auto& k : keys) m[k] = canonical_map.at(k);
  o["map"] = std::move(m);
  return o;
}

// Common technology synonyms. Kept small and editable; users supply their own
// ontology file for anything domain-specific.
const SkillOntology& SkillOntology::builtin() {
  static const SkillOntology instance = [] {
    static const char* kPairs[][2] = {
        {"python 3", "Python"}, {"python3", "Python"}, {"python 2", "Python"},
        {"python2", "Python"}, {"py", "Python"},
        {"js", "JavaScript"}, {"java script", "JavaScript"}, {"ecmascript", "JavaScript"},
        {"ts", "TypeScript"}, {"type script", "TypeScript"},
        {"c plus plus", "C++"}, {"cpp", "C++"}, {"c++11", "C++"}, {"c++14", "C++"},
        {"c++17", "C++"}, {"c++20", "C++"},
        {"c sharp", "C#"}, {"csharp", "C#"}, {"c-sharp", "C#"},
        {"golang", "Go"}, {"go lang", "Go"},
        {"java 8", "Java"}, {"java 11", "Java"}, {"java 17", "Java"},
        {"rustlang", "Rust"},
        {"k8s", "Kubernetes"}, {"kube", "Kubernetes"},
        {"dockers", "Docker"},
        {"postgres", "PostgreSQL"}, {"postgre", "PostgreSQL"}, {"psql", "PostgreSQL"},
        {"postgresql 14", "PostgreSQL"},
        {"my sql", "MySQL"},
        {"mongo", "MongoDB"}, {"mongo db", "MongoDB"},
        {"ms sql", "SQL Server"}, {"mssql", "SQL Server"}, {"sql server 2019", "SQL Server"},
        {"node", "Node.js"}, {"nodejs", "Node.js"}, {"node js", "Node.js"},
        {"reactjs", "React"}, {"react.js", "React"}, {"react js", "React"},
        {"vue", "Vue.js"}, {"vuejs", "Vue.js"}, {"vue js", "Vue.js"},
        {"angularjs", "Angular"}, {"angular 2", "Angular"},
        {"ml", "Machine Learning"}, {"machine-learning", "Machine Learning"},
        {"dl", "Deep Learning"},
        {"nlp", "Natural Language Processing"},
        {"cv", "Computer Vision"},
        {"tf", "TensorFlow"}, {"tensor flow", "TensorFlow"},
        {"torch", "PyTorch"}, {"py torch", "PyTorch"},
        {"sklearn", "scikit-learn"}, {"scikit learn", "scikit-learn"},
        {"np", "NumPy"}, {"numpy", "NumPy"},
        {"pandas", "Pandas"},
        {"amazon web services", "AWS"}, {"amazon aws", "AWS"},
        {"google cloud platform", "GCP"}, {"google cloud", "GCP"},
        {"microsoft azure", "Azure"},
        {"ci cd", "CI/CD"}, {"cicd", "CI/CD"}, {"ci-cd", "CI/CD"},
        {"tf-idf", "TF-IDF"},
        {"restful", "REST"}, {"rest api", "REST"}, {"rest apis", "REST"},
        {"graph ql", "GraphQL"},
        {"html5", "HTML"}, {"css3", "CSS"},
        {"sass", "SCSS"},
        {"shell scripting", "Bash"}, {"shell", "Bash"}, {"bash scripting", "Bash"},
        {"powershell 7", "PowerShell"},
        {"excel", "Microsoft Excel"}, {"ms excel", "Microsoft Excel"},
        {"ms office", "Microsoft Office"},
        {"power bi", "Power BI"}, {"powerbi", "Power BI"},
        {"tableau desktop", "Tableau"},
        {"spark", "Apache Spark"}, {"pyspark", "Apache Spark"},
        {"kafka", "Apache Kafka"},
        {"airflow", "Apache Airflow"},
        {"hadoop ecosystem", "Hadoop"},
        {"elastic search", "Elasticsearch"}, {"elk", "Elasticsearch"},
        {"redis cache", "Redis"},
        {"rabbit mq", "RabbitMQ"}, {"rabbitmq broker", "RabbitMQ"},
        {"terraform iac", "Terraform"},
        {"ansible playbooks", "Ansible"},
        {"jenkins ci", "Jenkins"},
        {"git hub", "GitHub"}, {"gitlab ci", "GitLab"},
        {"jira software", "Jira"},
        {"agile methodologies", "Agile"}, {"agile/scrum", "Agile"},
        {"scrum master", "Scrum"},
        {"kanban boards", "Kanban"},
        {"sql queries", "SQL"}, {"structured query language", "SQL"},
        {"nosql databases", "NoSQL"},
        {"etl pipelines", "ETL"},
        {"data warehousing", "Data Warehouse"},
        {"a/b testing", "A/B Testing"}, {"ab testing", "A/B Testing"},
        {"unit testing", "Testing"}, {"test automation", "Testing"},
        {"oop", "Object-Oriented Programming"},
        {"tdd", "Test-Driven Development"},
        {"microservice", "Microservices"}, {"micro services", "Microservices"},
        {"linux administration", "Linux"}, {"gnu/linux", "Linux"},
        {"win32", "Windows"},
        {"mac os", "macOS"}, {"osx", "macOS"},
        {"photoshop", "Adobe Photoshop"},
        {"illustrator", "Adobe Illustrator"},
        {"autocad 2d", "AutoCAD"},
        {"solid works", "SolidWorks"},
        {"matlab/simulink", "MATLAB"},
        {"r programming", "R"}, {"r language", "R"},
        {"sas programming", "SAS"},
        {"stata 17", "Stata"},
        {"spss statistics", "SPSS"},
        {"seo optimization", "SEO"}, {"search engine optimization", "SEO"},
        {"sem campaigns", "SEM"},
        {"crm systems", "CRM"}, {"salesforce crm", "Salesforce"},
        {"sap erp", "SAP"},
        {"quickbooks online", "QuickBooks"},
        {"gaap accounting", "GAAP"},
        {"hipaa compliance", "HIPAA"},
        {"osha compliance", "OSHA"},
        {"cpr certified", "CPR"},
        {"phlebotomy certified", "Phlebotomy"},
        {"six sigma green belt", "Six Sigma"}, {"lean six sigma", "Six Sigma"},
        {"pmp certified", "PMP"},
        {"public speaking skills", "Public Speaking"},
        {"communication skills", "Communication"},
        {"team leadership", "Leadership"}, {"people leadership", "Leadership"},
        {"stakeholder mgmt", "Stakeholder Management"},
        {"project mgmt", "Project Management"},
        {"time mgmt", "Time Management"},
    };
    json map = json::object();
    for (const auto& pair : kPairs) map[pair[0]] = pair[1];
    json j;
    j["case_insensitive"] = true;
    j["map"] = std::move(map);
    return from_json(j);
  }();
  return instance;
}

std::string canonicalize_skill(std::string_view raw, const SkillOntology& ontology) {
  const std::string cleaned = collapse_spaces(trim(raw));
  if (cleaned.empty()) return cleaned;
  const std::string key = ontology.case_insensitive ? to_lower(cleaned) : cleaned;
  auto it = ontology.canonical_map.find(key);
  if (it != ontology.canonical_map.end()) return it->second;
  return cleaned;
}

namespace {

std::string normalize_scalar(const std::string& s) {
  std::string t = trim(s);
  return t.empty() ? std::string(kMissing) : t;
}

}  // namespace

ParsedResume normalize_fields(const ParsedResume& prediction, const SkillOntology& ontology,
                              std::vector<std::string>* warnings) {
  ParsedResume out;
  out.name = normalize_scalar(prediction.name);
  out.email = normalize_scalar(prediction.email);
  out.phone = normalize_scalar(prediction.phone);
  out.department = normalize_scalar(prediction.department);

  out.skills.reserve(prediction.skills.size());
  for (const auto& raw : prediction.skills) {
    std::string skill = canonicalize_skill(raw, ontology);
    if (skill.empty()) continue;
    if (std::find(out.skills.begin(), out.skills.end(), skill) == out.skills.end()) {
      out.skills.push_back(std::move(skill));
    }
  }

  out.experience.reserve(prediction.experience.size());
  for (const auto& e : prediction.experience) {
    ExperienceEntry n;
    n.title = normalize_scalar(e.title);
    n.company = normalize_scalar(e.company);
    n.location = normalize_scalar(e.location);
    n.start_date = normalize_date(e.start_date, warnings);
    n.end_date = normalize_date(e.end_date, warnings);
    for (const auto& b : e.bullets) {
      std::string t = trim(b);
      if (!t.empty()) n.bullets.push_back(std::move(t));
    }
    out.experience.push_back(std::move(n));
  }

  out.education.reserve(prediction.education.size());
  for (const auto& e : prediction.education) {
    EducationEntry n;
    n.degree = normalize_scalar(e.degree);
    n.institution = normalize_scalar(e.institution);
    n.field_of_study = normalize_scalar(e.field_of_study);
    n.start_date = normalize_date(e.start_date, warnings);
    n.end_date = normalize_date(e.end_date, warnings);
    out.education.push_back(std::move(n));
  }
  return out;
}

}  // namespace parsemble
