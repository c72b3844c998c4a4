#include "corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace parsemble {

using nlohmann::json;
using nlohmann::ordered_json;

const CorpusEntry* Corpus::find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.document.id == id) return &e;
  }
  return nullptr;
}

GenOptions GenOptions::from_json(const json& j) {
  GenOptions o;
  if (j.is_null()) return o;
  if (!j.is_object()) throw ConfigError("generator options must be a JSON object");
  auto knob = [&](const char* key, double& value) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) throw ConfigError(std::string("option '") + key + "' must be a number");
    value = j.at(key).get<double>();
    if (value < 0.0 || value > 1.0) {
      throw ConfigError(std::string("option '") + key + "' must be in [0,1]");
    }
  };
  knob("date_format_variation", o.date_format_variation);
  knob("skill_synonym_rate", o.skill_synonym_rate);
  knob("field_omission_rate", o.field_omission_rate);
  knob("edge_case_rate", o.edge_case_rate);
  return o;
}

// ---------------------------------------------------------------------------
// Profession templates
// ---------------------------------------------------------------------------

const std::vector<ProfessionTemplate>& default_professions() {
  static const std::vector<ProfessionTemplate> kPool = {
      {"Software Engineer", "Engineering",
       {"Software Engineer", "Senior Software Engineer", "Staff Software Engineer",
        "Backend Developer"},
       {"Python", "C++", "Go", "SQL", "Docker", "Kubernetes", "PostgreSQL", "REST", "Git",
        "Linux", "Microservices"},
       {"Computer Science", "Software Engineering"}},
      {"Data Scientist", "Data and Analytics",
       {"Data Scientist", "Senior Data Scientist", "Machine Learning Engineer"},
       {"Python", "Machine Learning", "Deep Learning", "Pandas", "NumPy", "scikit-learn",
        "TensorFlow", "PyTorch", "SQL", "Natural Language Processing"},
       {"Statistics", "Computer Science", "Applied Mathematics"}},
      {"Web Developer", "Engineering",
       {"Web Developer", "Frontend Developer", "Full Stack Developer"},
       {"JavaScript", "TypeScript", "React", "Node.js", "HTML", "CSS", "GraphQL", "REST",
        "Vue.js"},
       {"Computer Science", "Web Design"}},
      {"DevOps Engineer", "Infrastructure",
       {"DevOps Engineer", "Site Reliability Engineer", "Platform Engineer"},
       {"Kubernetes", "Docker", "Terraform", "Ansible", "AWS", "CI/CD", "Bash", "Linux",
        "Jenkins", "GCP"},
       {"Computer Science", "Information Systems"}},
      {"Mobile Developer", "Engineering",
       {"Mobile Developer", "iOS Developer", "Android Developer"},
       {"Swift", "Kotlin", "Java", "React", "REST", "Git", "Firebase"},
       {"Computer Science", "Mobile Computing"}},
      {"QA Engineer", "Quality Assurance",
       {"QA Engineer", "Test Automation Engineer", "Quality Analyst"},
       {"Testing", "Selenium", "Python", "Jira", "CI/CD", "SQL", "Agile"},
       {"Computer Science", "Information Technology"}},
      {"Database Administrator", "IT Operations",
       {"Database Administrator", "Senior Database Administrator", "Data Engineer"},
       {"SQL", "PostgreSQL", "MySQL", "SQL Server", "ETL", "Data Warehouse", "Linux",
        "NoSQL"},
       {"Information Systems", "Computer Science"}},
      {"Network Engineer", "IT Operations",
       {"Network Engineer", "Network Administrator", "Systems Engineer"},
       {"Cisco IOS", "TCP/IP", "Firewalls", "VPN", "Linux", "DNS", "Load Balancing"},
       {"Network Engineering", "Information Technology"}},
      {"Security Analyst", "Information Security",
       {"Security Analyst", "Security Engineer", "SOC Analyst"},
       {"SIEM", "Penetration Testing", "Incident Response", "Python", "Firewalls",
        "Threat Modeling", "Linux"},
       {"Cybersecurity", "Computer Science"}},
      {"Project Manager", "Program Management",
       {"Project Manager", "Senior Project Manager", "Program Manager"},
       {"Project Management", "Agile", "Scrum", "Kanban", "Jira", "Stakeholder Management",
        "Risk Management", "Budgeting"},
       {"Business Administration", "Management"}},
      {"Product Manager", "Product",
       {"Product Manager", "Senior Product Manager", "Product Owner"},
       {"Product Strategy", "Roadmapping", "A/B Testing", "SQL", "User Research", "Agile",
        "Stakeholder Management"},
       {"Business Administration", "Computer Science"}},
      {"Business Analyst", "Business Operations",
       {"Business Analyst", "Senior Business Analyst", "Operations Analyst"},
       {"SQL", "Microsoft Excel", "Tableau", "Power BI", "Requirements Gathering",
        "Process Mapping", "Data Analysis"},
       {"Business Administration", "Economics"}},
      {"Accountant", "Finance",
       {"Accountant", "Senior Accountant", "Staff Accountant"},
       {"GAAP", "QuickBooks", "Microsoft Excel", "Accounts Payable", "Accounts Receivable",
        "Financial Reporting", "Tax Preparation", "Auditing"},
       {"Accounting", "Finance"}},
      {"Financial Analyst", "Finance",
       {"Financial Analyst", "Senior Financial Analyst", "Investment Analyst"},
       {"Financial Modeling", "Microsoft Excel", "Forecasting", "Valuation", "SQL",
        "Budgeting", "Variance Analysis"},
       {"Finance", "Economics"}},
      {"HR Specialist", "Human Resources",
       {"HR Specialist", "HR Generalist", "HR Manager"},
       {"Onboarding", "Employee Relations", "HRIS", "Payroll", "Benefits Administration",
        "Compliance", "Performance Management"},
       {"Human Resources", "Psychology"}},
      {"Recruiter", "Human Resources",
       {"Recruiter", "Senior Recruiter", "Talent Acquisition Partner"},
       {"Sourcing", "Interviewing", "ATS Tools", "Negotiation", "Employer Branding",
        "Pipeline Management"},
       {"Human Resources", "Communications"}},
      {"Marketing Manager", "Marketing",
       {"Marketing Manager", "Digital Marketing Manager", "Brand Manager"},
       {"SEO", "SEM", "Content Marketing", "Google Analytics", "Email Marketing",
        "Social Media", "CRM"},
       {"Marketing", "Communications"}},
      {"Sales Representative", "Sales",
       {"Sales Representative", "Account Executive", "Sales Manager"},
       {"Salesforce", "Negotiation", "Lead Generation", "CRM", "Cold Calling",
        "Territory Management", "Forecasting"},
       {"Business Administration", "Marketing"}},
      {"Graphic Designer", "Design",
       {"Graphic Designer", "Senior Graphic Designer", "Art Director"},
       {"Adobe Photoshop", "Adobe Illustrator", "InDesign", "Typography", "Branding",
        "Print Design"},
       {"Graphic Design", "Fine Arts"}},
      {"UX Designer", "Design",
       {"UX Designer", "Product Designer", "UX Researcher"},
       {"Figma", "Wireframing", "Prototyping", "User Research", "Usability Testing",
        "Design Systems"},
       {"Interaction Design", "Human-Computer Interaction"}},
      {"Registered Nurse", "Healthcare",
       {"Registered Nurse", "Charge Nurse", "Clinical Nurse"},
       {"Patient Care", "CPR", "Phlebotomy", "Triage", "Electronic Health Records",
        "Medication Administration", "HIPAA"},
       {"Nursing", "Health Sciences"}},
      {"Teacher", "Education",
       {"Teacher", "Lead Teacher", "Curriculum Coordinator"},
       {"Lesson Planning", "Classroom Management", "Curriculum Development", "Assessment",
        "Differentiated Instruction", "Parent Communication"},
       {"Education", "English Literature"}},
      {"Civil Engineer", "Construction",
       {"Civil Engineer", "Structural Engineer", "Site Engineer"},
       {"AutoCAD", "Structural Analysis", "Project Management", "Surveying", "OSHA",
        "Cost Estimation", "SolidWorks"},
       {"Civil Engineering", "Structural Engineering"}},
      {"Chef", "Hospitality",
       {"Chef", "Sous Chef", "Executive Chef"},
       {"Menu Planning", "Food Safety", "Inventory Management", "Culinary Arts",
        "Kitchen Operations", "Cost Control"},
       {"Culinary Arts", "Hospitality Management"}},
  };
  return kPool;
}

namespace {

const char* kFirstNames[] = {
    "Ava", "Noah", "Mia", "Liam", "Zoe", "Ethan", "Ruby", "Mason", "Isla", "Logan",
    "Nora", "Caleb", "Elena", "Owen", "Priya", "Felix", "Amara", "Hugo", "Lena", "Marcus",
    "Dara", "Ivan", "Salma", "Theo", "Wren", "Omar", "Nina", "Jude", "Tessa", "Rohan",
};
const char* kLastNames[] = {
    "Calloway", "Mercer", "Ashford", "Delgado", "Whitaker", "Okafor", "Lindqvist", "Navarro",
    "Pemberton", "Suzuki", "Hale", "Vazquez", "Thornton", "Adeyemi", "Koval", "Marchetti",
    "Beaumont", "Osei", "Varga", "Winslow", "Castellanos", "Drummond", "Ferreira", "Holloway",
};
const char* kCompanies[] = {
    "Brightline Systems", "Cobalt Ridge Group", "Harborview Labs", "Meridian Works",
    "Northgate Analytics", "Pinewood Partners", "Quartz Harbor Inc", "Redwood Dynamics",
    "Silverbrook Media", "Tidewater Solutions", "Vantage Crest", "Willow and Main",
    "Ironvale Manufacturing", "Lakeshore Collective", "Summit Forge", "Bluefield Health",
    "Copperleaf Designs", "Eastbank Financial", "Foxglove Studios", "Granite Bay Retail",
};
const char* kCities[] = {
    "Austin, TX", "Denver, CO", "Portland, OR", "Raleigh, NC", "Columbus, OH",
    "Madison, WI", "Tucson, AZ", "Boise, ID", "Richmond, VA", "Omaha, NE",
    "Spokane, WA", "Albany, NY", "Savannah, GA", "Fresno, CA", "Duluth, MN", "Mobile, AL",
};
const char* kInstitutions[] = {
    "Ridgeline State University", "Harper Valley College", "Lakemont University",
    "Clearwater Institute of Technology", "Bellamy College", "Northfield University",
    "Westbrook State College", "Solano Technical University", "Kingsford University",
    "Prairie Gate College", "Ashwood University", "Midland Polytechnic",
};
const char* kDegrees[] = {"B.S.", "B.A.", "M.S.", "M.A."};
const char* kEmailDomains[] = {"example.com", "mailbox.org", "postbox.net", "inbox.dev"};
const char* kBulletTemplates[] = {
    "Delivered quarterly improvements using {skill}",
    "Led cross-team initiatives built on {skill}",
    "Automated recurring workflows with {skill}",
    "Mentored junior staff on {skill} practices",
    "Reduced turnaround time through {skill}",
    "Owned the {skill} roadmap for the group",
    "Standardized documentation around {skill}",
    "Coordinated vendor deliverables involving {skill}",
    "Streamlined reporting pipelines via {skill}",
    "Championed adoption of {skill} across the department",
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick_index(std::mt19937_64& rng, std::size_t n) {
  return n == 0 ? 0 : static_cast<std::size_t>(rng() % n);
}

template <std::size_t N>
std::string pick(const char* const (&pool)[N], std::mt19937_64& rng) {
  return pool[pick_index(rng, N)];
}

std::string lower_ascii(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string month_name(int month, bool abbreviated) {
  static const char* kFull[] = {"January", "February", "March",     "April",   "May",
                                "June",    "July",     "August",    "September", "October",
                                "November", "December"};
  static const char* kAbbr[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  return abbreviated ? kAbbr[month - 1] : kFull[month - 1];
}

// Reverse map canonical -> variants, built from the built-in ontology.
const std::map<std::string, std::vector<std::string>>& synonym_variants() {
  static const std::map<std::string, std::vector<std::string>> kMap = [] {
    std::map<std::string, std::vector<std::string>> m;
    for (const auto& [variant, canonical] : SkillOntology::builtin().canonical_map) {
      m[canonical].push_back(variant);
    }
    for (auto& [_, variants] : m) std::sort(variants.begin(), variants.end());
    return m;
  }();
  return kMap;
}

struct DateParts {
  int year = 0;
  int month = 1;
  bool present = false;

  std::string canonical() const {
    if (present) return kPresent;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-01", year, month);
    return buf;
  }
};

// Renders a generated date for the raw text. When variation is requested,
// picks one of the accepted non-ISO formats; the gold keeps the canonical
// form, so normalize_date maps the rendering back to it.
std::string render_date(const DateParts& d, bool vary, std::mt19937_64& rng) {
  if (d.present) {
    if (!vary) return kPresent;
    static const char* kPresentForms[] = {"present", "Present", "current", "Current"};
    return pick(kPresentForms, rng);
  }
  if (!vary) return d.canonical();
  char buf[32];
  switch (pick_index(rng, d.month == 1 ? 6 : 5)) {
    case 0:
      std::snprintf(buf, sizeof(buf), "%04d-%02d", d.year, d.month);
      return buf;
    case 1:
      return month_name(d.month, true) + " " + std::to_string(d.year);
    case 2:
      return month_name(d.month, false) + " " + std::to_string(d.year);
    case 3:
      std::snprintf(buf, sizeof(buf), "%02d/%04d", d.month, d.year);
      return buf;
    case 4:
      std::snprintf(buf, sizeof(buf), "%02d-%04d", d.month, d.year);
      return buf;
    default:
      return std::to_string(d.year);  // only when month == 1
  }
}

struct RenderedEntry {
  ExperienceEntry gold;
  std::string start_rendered;
  std::string end_rendered;
};

struct RenderedEducation {
  EducationEntry gold;
  std::string start_rendered;
  std::string end_rendered;
};

}  // namespace

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

Corpus generate_synthetic(std::size_t n, std::uint64_t seed,
                          const std::vector<ProfessionTemplate>& pool,
                          const GenOptions& options) {
  if (n == 0) throw ConfigError("generate_synthetic requires n >= 1");
  if (pool.empty()) throw ConfigError("generate_synthetic requires at least one template");

  Corpus corpus;
  corpus.entries.reserve(n);
  corpus.metadata.reserve(n);

  for (std::size_t index = 0; index < n; ++index) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(0x5eed0000ull + index)));
    const ProfessionTemplate& prof = pool[pick_index(rng, pool.size())];

    ordered_json noise;
    noise["dates"] = ordered_json::array();
    noise["skills"] = ordered_json::array();
    noise["omitted"] = ordered_json::array();
    noise["edge_cases"] = ordered_json::array();

    std::string edge;
    if (uniform01(rng) < options.edge_case_rate) {
      static const char* kEdges[] = {"empty_experience", "empty_education",
                                     "single_entry_history", "long_skill_list"};
      edge = pick(kEdges, rng);
      noise["edge_cases"].push_back(edge);
    }

    ParsedResume gold;
    const std::string first = pick(kFirstNames, rng);
    const std::string last = pick(kLastNames, rng);
    gold.name = first + " " + last;
    gold.email = lower_ascii(first) + "." + lower_ascii(last) + std::to_string(rng() % 90 + 10) +
                 "@" + pick(kEmailDomains, rng);
    {
      std::string phone = "(";
      for (int i = 0; i < 3; ++i) phone += static_cast<char>('0' + (i == 0 ? 2 + rng() % 8 : rng() % 10));
      phone += ") ";
      for (int i = 0; i < 3; ++i) phone += static_cast<char>('0' + rng() % 10);
      phone += "-";
      for (int i = 0; i < 4; ++i) phone += static_cast<char>('0' + rng() % 10);
      gold.phone = phone;
    }
    gold.department = prof.department;

    // Skills: a shuffled prefix of the profession pool, canonical forms.
    {
      std::vector<std::string> skills = prof.skills;
      for (std::size_t i = skills.size(); i > 1; --i) {
        std::swap(skills[i - 1], skills[pick_index(rng, i)]);
      }
      std::size_t want = edge == "long_skill_list"
                             ? skills.size()
                             : std::min<std::size_t>(4 + pick_index(rng, 4), skills.size());
      skills.resize(std::max<std::size_t>(1, want));
      gold.skills = std::move(skills);
    }

    // Experience, reverse-chronological.
    std::vector<RenderedEntry> experience;
    {
      std::size_t count = 1 + pick_index(rng, 3);
      if (edge == "empty_experience") count = 0;
      if (edge == "single_entry_history") count = 1;
      int next_start_year = 2016 + static_cast<int>(pick_index(rng, 5));
      for (std::size_t e = 0; e < count; ++e) {
        RenderedEntry re;
        DateParts start, end;
        start.year = next_start_year;
        start.month = 1 + static_cast<int>(pick_index(rng, 12));
        if (e == 0 && uniform01(rng) < 0.45) {
          end.present = true;
        } else {
          end.year = start.year + 1 + static_cast<int>(pick_index(rng, 3));
          end.month = 1 + static_cast<int>(pick_index(rng, 12));
        }
        next_start_year = start.year - 2 - static_cast<int>(pick_index(rng, 3));

        re.gold.title = prof.titles[pick_index(rng, prof.titles.size())];
        re.gold.company = pick(kCompanies, rng);
        re.gold.location = pick(kCities, rng);
        re.gold.start_date = start.canonical();
        re.gold.end_date = end.canonical();

        bool vary_start = uniform01(rng) < options.date_format_variation;
        bool vary_end = uniform01(rng) < options.date_format_variation;
        re.start_rendered = render_date(start, vary_start, rng);
        re.end_rendered = render_date(end, vary_end, rng);

        std::size_t n_bullets = 2 + pick_index(rng, 3);
        std::set<std::size_t> used;
        for (std::size_t b = 0; b < n_bullets; ++b) {
          std::size_t t;
          do {
            t = pick_index(rng, std::size(kBulletTemplates));
          } while (!used.insert(t).second);
          std::string bullet = kBulletTemplates[t];
          const std::string& skill = gold.skills[pick_index(rng, gold.skills.size())];
          bullet.replace(bullet.find("{skill}"), 7, skill);
          re.gold.bullets.push_back(std::move(bullet));
        }
        experience.push_back(std::move(re));
      }
    }

    // Education.
    std::vector<RenderedEducation> education;
    {
      std::size_t count = 1 + (uniform01(rng) < 0.3 ? 1 : 0);
      if (edge == "empty_education") count = 0;
      if (edge == "single_entry_history") count = std::min<std::size_t>(count, 1);
      int grad_year = 2008 + static_cast<int>(pick_index(rng, 8));
      for (std::size_t e = 0; e < count; ++e) {
        RenderedEducation re;
        DateParts start, end;
        end.year = grad_year;
        end.month = e == 0 ? 6 : 5;
        start.year = grad_year - (e == 0 ? 4 : 2);
        start.month = 9;
        grad_year = start.year - 1;

        re.gold.degree = kDegrees[pick_index(rng, std::size(kDegrees))];
        re.gold.institution = pick(kInstitutions, rng);
        re.gold.field_of_study =
            prof.fields_of_study[pick_index(rng, prof.fields_of_study.size())];
        re.gold.start_date = start.canonical();
        re.gold.end_date = end.canonical();

        bool vary_start = uniform01(rng) < options.date_format_variation;
        bool vary_end = uniform01(rng) < options.date_format_variation;
        re.start_rendered = render_date(start, vary_start, rng);
        re.end_rendered = render_date(end, vary_end, rng);
        education.push_back(std::move(re));
      }
    }

    // Field omission: phone and department are treated as optional.
    bool omit_phone = uniform01(rng) < options.field_omission_rate;
    bool omit_department = uniform01(rng) < options.field_omission_rate;
    if (omit_phone) {
      gold.phone = kMissing;
      noise["omitted"].push_back("phone");
    }
    if (omit_department) {
      gold.department = kMissing;
      noise["omitted"].push_back("department");
    }

    // Skill renderings: some skills appear in the raw text as ontology
    // variants; the gold keeps the canonical form.
    std::vector<std::string> skill_renderings;
    for (const auto& skill : gold.skills) {
      std::string rendered = skill;
      if (uniform01(rng) < options.skill_synonym_rate) {
        auto it = synonym_variants().find(skill);
        if (it != synonym_variants().end()) {
          rendered = it->second[pick_index(rng, it->second.size())];
        }
      }
      if (rendered != skill) {
        ordered_json rec;
        rec["canonical"] = skill;
        rec["rendered"] = rendered;
        noise["skills"].push_back(std::move(rec));
      }
      skill_renderings.push_back(std::move(rendered));
    }

    auto record_date = [&](const std::string& path, const std::string& canonical,
                           const std::string& rendered) {
      if (rendered == canonical) return;
      ordered_json rec;
      rec["path"] = path;
      rec["gold"] = canonical;
      rec["rendered"] = rendered;
      noise["dates"].push_back(std::move(rec));
    };
    for (std::size_t e = 0; e < experience.size(); ++e) {
      record_date("experience[" + std::to_string(e) + "].start_date",
                  experience[e].gold.start_date, experience[e].start_rendered);
      record_date("experience[" + std::to_string(e) + "].end_date",
                  experience[e].gold.end_date, experience[e].end_rendered);
    }
    for (std::size_t e = 0; e < education.size(); ++e) {
      record_date("education[" + std::to_string(e) + "].start_date",
                  education[e].gold.start_date, education[e].start_rendered);
      record_date("education[" + std::to_string(e) + "].end_date",
                  education[e].gold.end_date, education[e].end_rendered);
    }

    for (auto& re : experience) gold.experience.push_back(re.gold);
    for (auto& re : education) gold.education.push_back(re.gold);

    // ----- raw text rendering -----
    static const char* kLayouts[] = {"plain_paragraphs", "labeled_sections", "bulleted",
                                     "shuffled_sections"};
    const std::string layout = pick(kLayouts, rng);

    std::ostringstream header, skills_sec, exp_sec, edu_sec;
    const bool bullets_layout = layout == "bulleted";
    const std::string item_prefix = bullets_layout ? "* " : "";

    if (layout == "plain_paragraphs") {
      header << gold.name << " works in the "
             << (omit_department ? prof.department : gold.department) << " field."
             << " Contact: " << gold.email;
      if (!omit_phone) header << " or " << gold.phone;
      header << ".";
      if (omit_department) {
        // Department deliberately absent from the text as well.
        header.str("");
        header << gold.name << ". Contact: " << gold.email;
        if (!omit_phone) header << " or " << gold.phone;
        header << ".";
      }
    } else {
      header << item_prefix << "Name: " << gold.name << "\n";
      header << item_prefix << "Email: " << gold.email << "\n";
      if (!omit_phone) header << item_prefix << "Phone: " << gold.phone << "\n";
      if (!omit_department) header << item_prefix << "Department: " << gold.department << "\n";
    }

    if (layout == "plain_paragraphs") {
      skills_sec << "Skilled in ";
      for (std::size_t i = 0; i < skill_renderings.size(); ++i) {
        if (i) skills_sec << (i + 1 == skill_renderings.size() ? " and " : ", ");
        skills_sec << skill_renderings[i];
      }
      skills_sec << ".";
    } else {
      skills_sec << "Skills:\n";
      for (const auto& s : skill_renderings) {
        skills_sec << (bullets_layout ? "* " : "  - ") << s << "\n";
      }
    }

    if (!experience.empty()) {
      exp_sec << (layout == "plain_paragraphs" ? "Work history. " : "Experience:\n");
      for (const auto& re : experience) {
        if (layout == "plain_paragraphs") {
          exp_sec << re.gold.title << " at " << re.gold.company << " in " << re.gold.location
                  << " (" << re.start_rendered << " to " << re.end_rendered << "). ";
          for (const auto& b : re.gold.bullets) exp_sec << b << ". ";
        } else {
          exp_sec << item_prefix << re.gold.title << " | " << re.gold.company << " | "
                  << re.gold.location << " | " << re.start_rendered << " - "
                  << re.end_rendered << "\n";
          for (const auto& b : re.gold.bullets) {
            exp_sec << (bullets_layout ? "  * " : "  - ") << b << "\n";
          }
        }
      }
    }

    if (!education.empty()) {
      edu_sec << (layout == "plain_paragraphs" ? "Education. " : "Education:\n");
      for (const auto& re : education) {
        if (layout == "plain_paragraphs") {
          edu_sec << re.gold.degree << " in " << re.gold.field_of_study << ", "
                  << re.gold.institution << " (" << re.start_rendered << " to "
                  << re.end_rendered << "). ";
        } else {
          edu_sec << item_prefix << re.gold.degree << " in " << re.gold.field_of_study
                  << " | " << re.gold.institution << " | " << re.start_rendered << " - "
                  << re.end_rendered << "\n";
        }
      }
    }

    std::vector<std::string> sections = {header.str(), skills_sec.str(), exp_sec.str(),
                                         edu_sec.str()};
    if (layout == "shuffled_sections") {
      // Keep the header first; shuffle the rest.
      for (std::size_t i = sections.size() - 1; i > 1; --i) {
        std::swap(sections[i], sections[1 + pick_index(rng, i)]);
      }
    }
    std::string raw;
    for (const auto& s : sections) {
      if (s.empty()) continue;
      if (!raw.empty()) raw += "\n\n";
      raw += s;
    }

    char idbuf[24];
    std::snprintf(idbuf, sizeof(idbuf), "synth-%06zu", index);

    CorpusEntry entry;
    entry.document.id = idbuf;
    entry.document.raw_text = std::move(raw);
    entry.gold = std::move(gold);
    entry.profession = prof.profession;
    corpus.entries.push_back(std::move(entry));

    GenerationRecord record;
    record.id = idbuf;
    record.profession = prof.profession;
    record.layout = layout;
    record.noise = std::move(noise);
    corpus.metadata.push_back(std::move(record));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// JSONL I/O
// ---------------------------------------------------------------------------

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::ostringstream out;
  for (const auto& e : corpus.entries) {
    ordered_json line;
    line["id"] = e.document.id;
    line["raw_text"] = e.document.raw_text;
    line["gold"] = resume_to_json(e.gold);
    if (!e.profession.empty()) line["profession"] = e.profession;
    out << line.dump() << "\n";
  }
  return out.str();
}

ordered_json metadata_to_json(const Corpus& corpus) {
  ordered_json arr = ordered_json::array();
  for (const auto& m : corpus.metadata) {
    ordered_json rec;
    rec["id"] = m.id;
    rec["profession"] = m.profession;
    rec["layout"] = m.layout;
    rec["noise"] = m.noise;
    arr.push_back(std::move(rec));
  }
  return arr;
}

void save_corpus(const Corpus& corpus, const std::string& path,
                 const std::string& metadata_path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << corpus_to_jsonl(corpus);
  if (!out) throw IoError("failed writing corpus to '" + path + "'");
  if (!metadata_path.empty()) {
    std::ofstream meta(metadata_path, std::ios::binary);
    if (!meta) throw IoError("cannot open '" + metadata_path + "' for writing");
    meta << metadata_to_json(corpus).dump(2) << "\n";
    if (!meta) throw IoError("failed writing metadata to '" + metadata_path + "'");
  }
}

Corpus load_corpus(const std::string& path, const SkillOntology& ontology) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file: " + path);

  Corpus corpus;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what(),
                       e.byte);
    }
    if (!j.is_object() || !j.contains("id") || !j.at("id").is_string()) {
      throw ParseError("line " + std::to_string(line_no) + ": missing string 'id'");
    }
    CorpusEntry entry;
    entry.document.id = j.at("id").get<std::string>();
    if (entry.document.id.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": 'id' must be non-empty");
    }
    if (!seen_ids.insert(entry.document.id).second) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate id '" +
                       entry.document.id + "'");
    }
    if (!j.contains("raw_text") || !j.at("raw_text").is_string()) {
      throw ParseError("line " + std::to_string(line_no) + ": missing string 'raw_text'");
    }
    entry.document.raw_text = j.at("raw_text").get<std::string>();
    if (!j.contains("gold")) {
      throw ParseError("line " + std::to_string(line_no) + ": missing 'gold' object");
    }
    try {
      entry.gold = normalize_fields(resume_from_json(j.at("gold")), ontology);
    } catch (const Error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    auto violations = validate(entry.gold);
    if (!violations.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": gold invalid: " +
                       violations.front().field + ": " + violations.front().message);
    }
    if (j.contains("profession") && j.at("profession").is_string()) {
      entry.profession = j.at("profession").get<std::string>();
    }
    corpus.entries.push_back(std::move(entry));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

namespace {

std::size_t floor_fraction(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
}

Corpus subset_in_order(const Corpus& corpus, std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  Corpus out;
  out.entries.reserve(indices.size());
  std::set<std::string> wanted;
  for (std::size_t i : indices) {
    out.entries.push_back(corpus.entries[i]);
    wanted.insert(corpus.entries[i].document.id);
  }
  for (const auto& m : corpus.metadata) {
    if (wanted.count(m.id)) out.metadata.push_back(m);
  }
  return out;
}

}  // namespace

SplitResult split_corpus(const Corpus& corpus, const SplitSpec& spec) {
  if (spec.train_fraction <= 0 || spec.validation_fraction <= 0 || spec.test_fraction <= 0) {
    throw ConfigError("split fractions must all be > 0");
  }
  if (std::abs(spec.train_fraction + spec.validation_fraction + spec.test_fraction - 1.0) >
      1e-9) {
    throw ConfigError("split fractions must sum to 1.0");
  }
  const std::size_t n = corpus.entries.size();
  if (n < 3) throw ConfigError("corpus must have at least 3 documents to split");

  const std::size_t n_val = floor_fraction(n, spec.validation_fraction);
  const std::size_t n_test = floor_fraction(n, spec.test_fraction);

  // Strata in sorted-name order; one anonymous stratum when not stratifying.
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < n; ++i) {
    strata[spec.stratify_by_profession ? corpus.entries[i].profession : std::string()].push_back(
        i);
  }

  std::mt19937_64 rng(spec.seed);
  for (auto& [_, indices] : strata) {
    for (std::size_t i = indices.size(); i > 1; --i) {
      std::swap(indices[i - 1], indices[rng() % i]);
    }
  }

  struct Quota {
    std::string name;
    std::size_t size = 0;
    std::size_t val = 0;
    std::size_t test = 0;
    double val_rem = 0;
    double test_rem = 0;
  };
  std::vector<Quota> quotas;
  for (const auto& [name, indices] : strata) {
    Quota q;
    q.name = name;
    q.size = indices.size();
    q.val = floor_fraction(q.size, spec.validation_fraction);
    q.test = floor_fraction(q.size, spec.test_fraction);
    q.val_rem = static_cast<double>(q.size) * spec.validation_fraction -
                static_cast<double>(q.val);
    q.test_rem = static_cast<double>(q.size) * spec.test_fraction -
                 static_cast<double>(q.test);
    if (q.val + q.test > q.size) q.test = q.size - q.val;  // tiny strata
    quotas.push_back(q);
  }

  // Largest-remainder top-up so the global counts are exact while each
  // stratum stays within one document of its proportional share.
  auto distribute = [&](std::size_t target, auto get_assigned, auto bump, auto remainder) {
    std::size_t assigned = 0;
    for (const auto& q : quotas) assigned += get_assigned(q);
    if (assigned > target) {
      // Trim from the smallest remainders (can only happen via capacity caps).
      std::vector<Quota*> order;
      for (auto& q : quotas) order.push_back(&q);
      std::sort(order.begin(), order.end(), [&](Quota* a, Quota* b) {
        if (remainder(*a) != remainder(*b)) return remainder(*a) < remainder(*b);
        return a->name < b->name;
      });
      for (Quota* q : order) {
        while (assigned > target && get_assigned(*q) > 0) {
          bump(*q, -1);
          --assigned;
        }
      }
      return;
    }
    while (assigned < target) {
      std::vector<Quota*> order;
      for (auto& q : quotas) {
        if (q.val + q.test < q.size) order.push_back(&q);
      }
      if (order.empty()) throw Error("split quota distribution ran out of capacity");
      std::sort(order.begin(), order.end(), [&](Quota* a, Quota* b) {
        if (remainder(*a) != remainder(*b)) return remainder(*a) > remainder(*b);
        return a->name < b->name;
      });
      for (Quota* q : order) {
        if (assigned == target) break;
        if (q->val + q->test >= q->size) continue;
        bump(*q, +1);
        ++assigned;
      }
    }
  };

  distribute(
      n_val, [](const Quota& q) { return q.val; },
      [](Quota& q, int d) { q.val = static_cast<std::size_t>(static_cast<long>(q.val) + d); },
      [](const Quota& q) { return q.val_rem; });
  distribute(
      n_test, [](const Quota& q) { return q.test; },
      [](Quota& q, int d) { q.test = static_cast<std::size_t>(static_cast<long>(q.test) + d); },
      [](const Quota& q) { return q.test_rem; });

  std::vector<std::size_t> train_idx, val_idx, test_idx;
  for (const auto& q : quotas) {
    const auto& indices = strata.at(q.name);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (i < q.val) {
        val_idx.push_back(indices[i]);
      } else if (i < q.val + q.test) {
        test_idx.push_back(indices[i]);
      } else {
        train_idx.push_back(indices[i]);
      }
    }
  }

  SplitResult result;
  result.train = subset_in_order(corpus, std::move(train_idx));
  result.validation = subset_in_order(corpus, std::move(val_idx));
  result.test = subset_in_order(corpus, std::move(test_idx));
  return result;
}

}  // namespace parsemble
