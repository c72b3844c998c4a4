#include <doctest.h>

#include <cmath>
#include <set>

#include "corpus.hpp"
#include "errors.hpp"
#include "extractors.hpp"
#include "test_util.hpp"

using namespace parsemble;

namespace {

MockExtractor::GoldLookup golds_of(const Corpus& corpus) {
  auto map = std::make_shared<std::map<std::string, ParsedResume>>();
  for (const auto& e : corpus.entries) (*map)[e.document.id] = e.gold;
  return map;
}

}  // namespace

TEST_CASE("mock with zero error rates reproduces the gold exactly") {
  Corpus corpus = generate_synthetic(20, 1);
  MockExtractor mock(MockProfile::uniform("m", 0.0, CorruptionKind::kDrop, 9), golds_of(corpus));
  for (const auto& e : corpus.entries) {
    ModelPrediction p = mock.extract(e.document);
    CHECK(p.prediction == e.gold);
    CHECK(p.model_id == "m");
    CHECK(p.raw_response == serialize_resume(e.gold));
  }
}

TEST_CASE("mock with a forced drop corrupts exactly that field") {
  Corpus corpus = generate_synthetic(10, 2);
  MockProfile profile = MockProfile::uniform("m", 0.0, CorruptionKind::kDrop, 4);
  profile.per_field_error_rate["email"] = 1.0;
  MockExtractor mock(profile, golds_of(corpus));
  for (const auto& e : corpus.entries) {
    ModelPrediction p = mock.extract(e.document);
    CHECK(p.prediction.email == "N/A");
    ParsedResume rest = p.prediction;
    rest.email = e.gold.email;
    CHECK(rest == e.gold);
  }
}

TEST_CASE("mock output is deterministic per (seed, model, document)") {
  Corpus corpus = generate_synthetic(12, 3);
  MockProfile profile = MockProfile::uniform("m", 0.5, CorruptionKind::kTypo, 11);
  MockExtractor mock(profile, golds_of(corpus));
  MockExtractor again(profile, golds_of(corpus));
  for (const auto& e : corpus.entries) {
    CHECK(serialize_resume(mock.extract(e.document).prediction) ==
          serialize_resume(again.extract(e.document).prediction));
  }
  // A different model_id draws a different stream.
  MockProfile other = profile;
  other.model_id = "other";
  MockExtractor different(other, golds_of(corpus));
  bool any_diff = false;
  for (const auto& e : corpus.entries) {
    any_diff |= !(different.extract(e.document).prediction == mock.extract(e.document).prediction);
  }
  CHECK(any_diff);
}

TEST_CASE("every corruption kind actually changes the field") {
  Corpus corpus = generate_synthetic(40, 5);  // defaults: no degenerate golds at this size
  for (CorruptionKind kind : {CorruptionKind::kDrop, CorruptionKind::kTypo,
                              CorruptionKind::kMergeBullets, CorruptionKind::kWrongValue}) {
    MockExtractor mock(MockProfile::uniform("m", 1.0, kind, 21), golds_of(corpus));
    for (const auto& e : corpus.entries) {
      ModelPrediction p = mock.extract(e.document);
      CAPTURE(corruption_kind_to_string(kind));
      CHECK(p.prediction.name != e.gold.name);
      CHECK(p.prediction.email != e.gold.email);
      CHECK(p.prediction.skills != e.gold.skills);
      if (!e.gold.experience.empty()) CHECK(p.prediction.experience != e.gold.experience);
      if (!e.gold.education.empty()) CHECK(p.prediction.education != e.gold.education);
    }
  }
}

TEST_CASE("mock profile validation") {
  MockProfile p = MockProfile::uniform("m", 0.5, CorruptionKind::kDrop, 1);
  p.per_field_error_rate.erase("phone");
  CHECK_THROWS_AS(p.check(), ConfigError);
  MockProfile q = MockProfile::uniform("m", 1.5, CorruptionKind::kDrop, 1);
  CHECK_THROWS_AS(q.check(), ConfigError);
  MockProfile r = MockProfile::uniform("", 0.1, CorruptionKind::kDrop, 1);
  CHECK_THROWS_AS(r.check(), ConfigError);
}

TEST_CASE("observed per-field error frequency stays within 3 standard errors") {
  GenOptions options;
  options.edge_case_rate = 0.0;     // keep every gold field populated
  options.field_omission_rate = 0.0;
  Corpus corpus = generate_synthetic(1200, 99, default_professions(), options);

  MockProfile profile;
  profile.model_id = "m";
  profile.seed = 7;
  profile.per_field_error_rate = {
      {"name", 0.30},  {"email", 0.15},      {"phone", 0.10},     {"department", 0.20},
      {"skills", 0.20}, {"experience", 0.25}, {"education", 0.12},
  };
  profile.corruption_kind = {
      {"name", CorruptionKind::kTypo},           {"email", CorruptionKind::kDrop},
      {"phone", CorruptionKind::kWrongValue},    {"department", CorruptionKind::kTypo},
      {"skills", CorruptionKind::kWrongValue},   {"experience", CorruptionKind::kMergeBullets},
      {"education", CorruptionKind::kWrongValue},
  };
  MockExtractor mock(profile, golds_of(corpus));

  std::map<std::string, int> errors;
  for (const auto& e : corpus.entries) {
    ModelPrediction p = mock.extract(e.document);
    if (p.prediction.name != e.gold.name) ++errors["name"];
    if (p.prediction.email != e.gold.email) ++errors["email"];
    if (p.prediction.phone != e.gold.phone) ++errors["phone"];
    if (p.prediction.department != e.gold.department) ++errors["department"];
    if (p.prediction.skills != e.gold.skills) ++errors["skills"];
    if (p.prediction.experience != e.gold.experience) ++errors["experience"];
    if (p.prediction.education != e.gold.education) ++errors["education"];
  }
  const double n = static_cast<double>(corpus.entries.size());
  for (const auto& [field, rate] : profile.per_field_error_rate) {
    const double freq = errors[field] / n;
    const double se = std::sqrt(rate * (1.0 - rate) / n);
    CAPTURE(field);
    CAPTURE(freq);
    CHECK(std::abs(freq - rate) <= 3.0 * se);
  }
}

TEST_CASE("run_panel: one prediction per backend per document, ordered by model_id") {
  Corpus corpus = generate_synthetic(2, 13);
  std::vector<ResumeDocument> docs;
  for (const auto& e : corpus.entries) docs.push_back(e.document);
  std::vector<std::shared_ptr<ExtractorBackend>> backends = {
      std::make_shared<MockExtractor>(MockProfile::uniform("zeta", 0, CorruptionKind::kDrop, 1),
                                      golds_of(corpus)),
      std::make_shared<MockExtractor>(MockProfile::uniform("alpha", 0, CorruptionKind::kDrop, 2),
                                      golds_of(corpus)),
      std::make_shared<MockExtractor>(MockProfile::uniform("mid", 0, CorruptionKind::kDrop, 3),
                                      golds_of(corpus)),
  };
  auto panels = run_panel(docs, backends);
  REQUIRE(panels.size() == 2);
  for (const auto& panel : panels) {
    REQUIRE(panel.predictions.size() == 3);
    CHECK(panel.failures.empty());
    CHECK(panel.predictions[0].model_id == "alpha");
    CHECK(panel.predictions[1].model_id == "mid");
    CHECK(panel.predictions[2].model_id == "zeta");
  }
}

TEST_CASE("run_panel: failures are recorded, not silently dropped") {
  Corpus corpus = generate_synthetic(3, 14);
  std::vector<ResumeDocument> docs;
  for (const auto& e : corpus.entries) docs.push_back(e.document);
  // This backend has golds for nothing, so it fails on every document.
  auto empty_golds = std::make_shared<std::map<std::string, ParsedResume>>();
  std::vector<std::shared_ptr<ExtractorBackend>> backends = {
      std::make_shared<MockExtractor>(MockProfile::uniform("ok", 0, CorruptionKind::kDrop, 1),
                                      golds_of(corpus)),
      std::make_shared<MockExtractor>(MockProfile::uniform("broken", 0, CorruptionKind::kDrop, 2),
                                      empty_golds),
  };
  auto panels = run_panel(docs, backends);
  REQUIRE(panels.size() == 3);
  for (const auto& panel : panels) {
    REQUIRE(panel.predictions.size() == 1);
    CHECK(panel.predictions[0].model_id == "ok");
    REQUIRE(panel.failures.size() == 1);
    CHECK(panel.failures[0].model_id == "broken");
    CHECK(panel.failures[0].error.find("no gold") != std::string::npos);
  }
}

TEST_CASE("run_panel: all backends failing still completes the run") {
  Corpus corpus = generate_synthetic(2, 15);
  std::vector<ResumeDocument> docs;
  for (const auto& e : corpus.entries) docs.push_back(e.document);
  auto empty_golds = std::make_shared<std::map<std::string, ParsedResume>>();
  std::vector<std::shared_ptr<ExtractorBackend>> backends = {
      std::make_shared<MockExtractor>(MockProfile::uniform("a", 0, CorruptionKind::kDrop, 1),
                                      empty_golds),
  };
  auto panels = run_panel(docs, backends);
  REQUIRE(panels.size() == 2);
  for (const auto& panel : panels) {
    CHECK(panel.predictions.empty());
    CHECK(panel.failures.size() == 1);
  }
}

TEST_CASE("run_panel: output is invariant to the parallelism degree") {
  Corpus corpus = generate_synthetic(30, 16);
  std::vector<ResumeDocument> docs;
  for (const auto& e : corpus.entries) docs.push_back(e.document);
  std::vector<std::shared_ptr<ExtractorBackend>> backends;
  for (const char* id : {"a", "b", "c"}) {
    backends.push_back(std::make_shared<MockExtractor>(
        MockProfile::uniform(id, 0.4, CorruptionKind::kTypo, 5), golds_of(corpus)));
  }
  auto serialize_all = [](const std::vector<DocumentPanel>& panels) {
    std::string out;
    for (const auto& panel : panels) {
      out += panel.document_id + ":";
      for (const auto& p : panel.predictions) {
        out += p.model_id + "=" + serialize_resume(p.prediction) + ";";
      }
    }
    return out;
  };
  const std::string base = serialize_all(run_panel(docs, backends, 1));
  CHECK(base == serialize_all(run_panel(docs, backends, 2)));
  CHECK(base == serialize_all(run_panel(docs, backends, 8)));
}

TEST_CASE("run_panel: input validation") {
  Corpus corpus = generate_synthetic(1, 17);
  std::vector<ResumeDocument> docs = {corpus.entries[0].document};
  std::vector<std::shared_ptr<ExtractorBackend>> backends = {
      std::make_shared<MockExtractor>(MockProfile::uniform("a", 0, CorruptionKind::kDrop, 1),
                                      golds_of(corpus)),
      std::make_shared<MockExtractor>(MockProfile::uniform("a", 0, CorruptionKind::kDrop, 2),
                                      golds_of(corpus)),
  };
  CHECK_THROWS_AS(run_panel(docs, backends), ConfigError);  // duplicate model_id
  CHECK_THROWS_AS(run_panel({}, {backends[0]}), ConfigError);
  CHECK_THROWS_AS(run_panel(docs, {}), ConfigError);
}
