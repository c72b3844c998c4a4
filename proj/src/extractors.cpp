#include "extractors.hpp"

#include <algorithm>
#include <random>

#include "errors.hpp"
#include "thread_pool.hpp"

namespace parsemble {

CorruptionKind corruption_kind_from_string(const std::string& s) {
  if (s == "drop") return CorruptionKind::kDrop;
  if (s == "typo") return CorruptionKind::kTypo;
  if (s == "merge_bullets") return CorruptionKind::kMergeBullets;
  if (s == "wrong_value") return CorruptionKind::kWrongValue;
  throw ConfigError("unknown corruption kind '" + s + "'");
}

std::string corruption_kind_to_string(CorruptionKind k) {
  switch (k) {
    case CorruptionKind::kDrop: return "drop";
    case CorruptionKind::kTypo: return "typo";
    case CorruptionKind::kMergeBullets: return "merge_bullets";
    case CorruptionKind::kWrongValue: return "wrong_value";
  }
  return "";
}

void MockProfile::check() const {
  if (model_id.empty()) throw ConfigError("mock profile requires a model_id");
  for (Field f : kAllFields) {
    const std::string name(field_name(f));
    auto it = per_field_error_rate.find(name);
    if (it == per_field_error_rate.end()) {
      throw ConfigError("mock profile '" + model_id + "' missing error rate for field '" +
                        name + "'");
    }
    if (it->second < 0.0 || it->second > 1.0) {
      throw ConfigError("mock profile '" + model_id + "' error rate for '" + name +
                        "' must be in [0,1]");
    }
    if (corruption_kind.find(name) == corruption_kind.end()) {
      throw ConfigError("mock profile '" + model_id + "' missing corruption kind for field '" +
                        name + "'");
    }
  }
}

double MockProfile::rate(Field f) const {
  return per_field_error_rate.at(std::string(field_name(f)));
}

CorruptionKind MockProfile::kind(Field f) const {
  return corruption_kind.at(std::string(field_name(f)));
}

MockProfile MockProfile::uniform(std::string model_id, double rate, CorruptionKind kind,
                                 std::uint64_t seed) {
  MockProfile p;
  p.model_id = std::move(model_id);
  p.seed = seed;
  for (Field f : kAllFields) {
    p.per_field_error_rate[std::string(field_name(f))] = rate;
    p.corruption_kind[std::string(field_name(f))] = kind;
  }
  return p;
}

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Library-independent uniform doubles/ints, so output is identical across
// standard library implementations.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return n == 0 ? 0 : static_cast<std::size_t>(rng() % n);
}

const char* kWrongNames[] = {
    "Zebulon Quagmire", "Xerxes Blunderbuss", "Wilhelmina Thistlequack",
    "Bartholomew Snodgrass", "Euphemia Crumplehorn", "Ignatius Wobblethorpe",
};
const char* kWrongDepartments[] = {
    "Cryptozoology", "Submarine Telegraphy", "Zeppelin Maintenance",
    "Alchemy and Transmutation", "Carrier Pigeon Logistics",
};
const char* kWrongSkills[] = {
    "Underwater Basket Weaving", "Falconry", "Dowsing", "Juggling Chainsaws",
    "Competitive Yodeling", "Medieval Siegecraft", "Tea Leaf Reading",
};
const char* kWrongLocations[] = {
    "Scurvy Cove, Antarctica Outpost", "Mare Tranquillitatis Station",
    "Rust Belt Annex, Atlantis", "Forgotten Basement, Area 52",
    "Windswept Mesa Field Office",
};
const char* kWrongTitles[] = {
    "Chief Confusion Officer", "Interim Gnome Wrangler", "Deputy Vibe Curator",
};
const char* kWrongInstitutions[] = {
    "Unaccredited Institute of Conjecture", "Correspondence School of Hearsay",
    "Invisible College of Rumors", "Academy of Dubious Letters",
};

template <std::size_t N>
std::string pick(const char* const (&pool)[N], std::mt19937_64& rng) {
  return pool[uniform_index(rng, N)];
}

template <std::size_t N>
std::string pick_different(const char* const (&pool)[N], std::mt19937_64& rng,
                           const std::string& avoid) {
  std::string v = pick(pool, rng);
  if (v == avoid) v += " II";
  return v;
}

void typo_text(std::string& s, std::mt19937_64& rng) {
  std::size_t pos = uniform_index(rng, s.size());
  char replacement;
  do {
    replacement = static_cast<char>('a' + uniform_index(rng, 26));
  } while (replacement == s[pos]);
  s[pos] = replacement;
}

bool degenerate(const std::string& s) { return s.empty() || s == kMissing; }

void wrong_scalar(Field f, ParsedResume& r, std::mt19937_64& rng) {
  switch (f) {
    case Field::kName:
      r.name = pick_different(kWrongNames, rng, r.name);
      break;
    case Field::kEmail: {
      std::string v = "bounced." + std::to_string(rng() % 100000) + "@nowhere.invalid";
      if (v == r.email) v = "x" + v;
      r.email = v;
      break;
    }
    case Field::kPhone: {
      std::string v = "(900) 555-";
      for (int i = 0; i < 4; ++i) v += static_cast<char>('0' + rng() % 10);
      if (v == r.phone) v += "0";
      r.phone = v;
      break;
    }
    case Field::kDepartment:
      r.department = pick_different(kWrongDepartments, rng, r.department);
      break;
    default:
      break;
  }
}

void wrong_value(Field f, ParsedResume& r, std::mt19937_64& rng) {
  if (is_scalar_field(f)) {
    wrong_scalar(f, r, rng);
    return;
  }
  if (f == Field::kSkills) {
    std::string junk = pick(kWrongSkills, rng);
    while (std::find(r.skills.begin(), r.skills.end(), junk) != r.skills.end()) junk += "!";
    if (r.skills.empty()) {
      r.skills.push_back(junk);
    } else {
      r.skills[uniform_index(rng, r.skills.size())] = junk;
    }
    return;
  }
  if (f == Field::kExperience) {
    if (r.experience.empty()) {
      ExperienceEntry e;
      e.title = pick(kWrongTitles, rng);
      e.company = "Phantom Holdings LLC";
      e.location = pick(kWrongLocations, rng);
      e.start_date = "1970-01-01";
      e.end_date = kMissing;
      r.experience.push_back(std::move(e));
      return;
    }
    // Outlier location strings in every entry.
    for (auto& e : r.experience) {
      e.location = pick_different(kWrongLocations, rng, e.location);
    }
    return;
  }
  if (r.education.empty()) {
    EducationEntry e;
    e.degree = "Diploma of Uncertain Provenance";
    e.institution = pick(kWrongInstitutions, rng);
    e.field_of_study = "General Mysteries";
    e.start_date = "1970-01-01";
    e.end_date = kMissing;
    r.education.push_back(std::move(e));
    return;
  }
  for (auto& e : r.education) {
    e.institution = pick_different(kWrongInstitutions, rng, e.institution);
  }
}

void drop_field(Field f, ParsedResume& r) {
  if (is_scalar_field(f)) {
    r.scalar(f) = kMissing;
  } else if (f == Field::kSkills) {
    r.skills.clear();
  } else if (f == Field::kExperience) {
    r.experience.clear();
  } else {
    r.education.clear();
  }
}

void typo_field(Field f, ParsedResume& r, std::mt19937_64& rng) {
  if (is_scalar_field(f)) {
    if (degenerate(r.scalar(f))) {
      wrong_value(f, r, rng);
    } else {
      typo_text(r.scalar(f), rng);
    }
    return;
  }
  if (f == Field::kSkills) {
    if (r.skills.empty()) {
      wrong_value(f, r, rng);
    } else {
      typo_text(r.skills[uniform_index(rng, r.skills.size())], rng);
    }
    return;
  }
  if (f == Field::kExperience) {
    if (r.experience.empty()) {
      wrong_value(f, r, rng);
      return;
    }
    auto& e = r.experience[uniform_index(rng, r.experience.size())];
    std::string* slots[] = {&e.title, &e.company, &e.location};
    std::string* target = slots[uniform_index(rng, 3)];
    if (degenerate(*target)) {
      wrong_value(f, r, rng);
    } else {
      typo_text(*target, rng);
    }
    return;
  }
  if (r.education.empty()) {
    wrong_value(f, r, rng);
    return;
  }
  auto& e = r.education[uniform_index(rng, r.education.size())];
  std::string* slots[] = {&e.degree, &e.institution, &e.field_of_study};
  std::string* target = slots[uniform_index(rng, 3)];
  if (degenerate(*target)) {
    wrong_value(f, r, rng);
  } else {
    typo_text(*target, rng);
  }
}

void merge_bullets_field(Field f, ParsedResume& r, std::mt19937_64& rng) {
  if (f == Field::kExperience) {
    std::vector<std::size_t> mergeable;
    for (std::size_t i = 0; i < r.experience.size(); ++i) {
      if (r.experience[i].bullets.size() >= 2) mergeable.push_back(i);
    }
    if (!mergeable.empty()) {
      auto& bullets = r.experience[mergeable[uniform_index(rng, mergeable.size())]].bullets;
      std::size_t i = uniform_index(rng, bullets.size() - 1);
      bullets[i] += " & " + bullets[i + 1];
      bullets.erase(bullets.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      return;
    }
  }
  // No mergeable bullets (education entries never have any): degrade to a
  // wrong value so the configured error rate still materializes.
  wrong_value(f, r, rng);
}

void corrupt_field(Field f, CorruptionKind kind, ParsedResume& r, std::mt19937_64& rng) {
  switch (kind) {
    case CorruptionKind::kDrop: drop_field(f, r); break;
    case CorruptionKind::kTypo: typo_field(f, r, rng); break;
    case CorruptionKind::kMergeBullets: merge_bullets_field(f, r, rng); break;
    case CorruptionKind::kWrongValue: wrong_value(f, r, rng); break;
  }
}

}  // namespace

MockExtractor::MockExtractor(MockProfile profile, GoldLookup golds)
    : profile_(std::move(profile)), golds_(std::move(golds)) {
  profile_.check();
  if (!golds_) throw ConfigError("mock backend '" + profile_.model_id + "' requires gold lookup");
}

ModelPrediction MockExtractor::extract(const ResumeDocument& document) const {
  auto it = golds_->find(document.id);
  if (it == golds_->end()) {
    throw BackendError(BackendError::Kind::kExtractionFailed,
                       "mock backend '" + profile_.model_id + "' has no gold for document '" +
                           document.id + "'");
  }
  // The per-document stream depends only on (seed, model_id, document.id).
  std::uint64_t state = splitmix64(profile_.seed ^ fnv1a(profile_.model_id));
  state = splitmix64(state ^ fnv1a(document.id));
  std::mt19937_64 rng(state);

  ParsedResume out = it->second;
  for (Field f : kAllFields) {
    double u = uniform01(rng);
    if (u < profile_.rate(f)) corrupt_field(f, profile_.kind(f), out, rng);
  }

  ModelPrediction p;
  p.model_id = profile_.model_id;
  p.prediction = std::move(out);
  p.raw_response = serialize_resume(p.prediction);
  return p;
}

std::vector<DocumentPanel> run_panel(const std::vector<ResumeDocument>& documents,
                                     const std::vector<std::shared_ptr<ExtractorBackend>>& backends,
                                     int parallelism) {
  if (documents.empty()) throw ConfigError("run_panel requires at least one document");
  if (backends.empty()) throw ConfigError("run_panel requires at least one backend");
  {
    std::vector<std::string> ids;
    for (const auto& b : backends) ids.push_back(b->model_id());
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw ConfigError("duplicate backend model_id in panel");
    }
  }

  struct Slot {
    bool failed = false;
    ModelPrediction prediction;
    PanelFailure failure;
  };
  const std::size_t n_docs = documents.size();
  const std::size_t n_backends = backends.size();
  std::vector<Slot> slots(n_docs * n_backends);

  parallel_for(n_docs * n_backends, parallelism, [&](std::size_t task) {
    const std::size_t d = task / n_backends;
    const std::size_t b = task % n_backends;
    Slot& slot = slots[task];
    try {
      slot.prediction = backends[b]->extract(documents[d]);
    } catch (const std::exception& e) {
      slot.failed = true;
      slot.failure = {backends[b]->model_id(), e.what()};
    }
  });

  std::vector<DocumentPanel> out(n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) {
    out[d].document_id = documents[d].id;
    for (std::size_t b = 0; b < n_backends; ++b) {
      Slot& slot = slots[d * n_backends + b];
      if (slot.failed) {
        out[d].failures.push_back(std::move(slot.failure));
      } else {
        out[d].predictions.push_back(std::move(slot.prediction));
      }
    }
    std::sort(out[d].predictions.begin(), out[d].predictions.end(),
              [](const ModelPrediction& a, const ModelPrediction& b) {
                return a.model_id < b.model_id;
              });
    std::sort(out[d].failures.begin(), out[d].failures.end(),
              [](const PanelFailure& a, const PanelFailure& b) {
                return a.model_id < b.model_id;
              });
  }
  return out;
}

}  // namespace parsemble
