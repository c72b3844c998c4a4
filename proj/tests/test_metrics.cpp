#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace parsemble;

TEST_CASE("token_f1 basics") {
  CHECK(token_f1("machine learning", "machine learning") == 1.0);
  CHECK(token_f1("the cat sat", "the cat") == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(token_f1("", "abc") == 0.0);
  CHECK(token_f1("abc", "") == 0.0);
  CHECK(token_f1("", "") == 1.0);
  CHECK(token_f1("a b", "c d") == 0.0);
}

TEST_CASE("bleu basics") {
  CHECK(bleu("the quick brown fox jumps", "the quick brown fox jumps") ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bleu("", "anything at all") == 0.0);
  CHECK(bleu("totally different words", "the quick brown fox") == 0.0);
}

TEST_CASE("bleu brevity penalty: hand-computed case") {
  // pred = 4-token prefix of a 5-token gold: every n-gram precision is 1
  // (n>=2 smoothed as (m+1)/(t+1) with m == t), so BLEU = BP = e^(1 - 5/4).
  const double expected = std::exp(1.0 - 5.0 / 4.0);
  CHECK(bleu("the quick brown fox", "the quick brown fox jumps") ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(oracles::ref_bleu("the quick brown fox", "the quick brown fox jumps") ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rouge_l basics") {
  CHECK(rouge_l("a b c d", "a b c d") == 1.0);
  CHECK(rouge_l("a b c d", "a c d e") == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(rouge_l("x y", "a b") == 0.0);
  CHECK(rouge_l("", "") == 1.0);
  CHECK(rouge_l("", "a") == 0.0);
}

TEST_CASE("levenshtein_similarity basics") {
  CHECK(levenshtein_similarity("kitten", "sitting") ==
        doctest::Approx(1.0 - 3.0 / 7.0).epsilon(1e-12));
  CHECK(levenshtein_similarity("same", "same") == 1.0);
  CHECK(levenshtein_similarity("a", "b") == 0.0);
  CHECK(levenshtein_similarity("", "") == 1.0);
}

TEST_CASE("metrics match brute-force references on random pairs") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    const std::string a = test_util::random_sentence(rng);
    const std::string b = test_util::random_sentence(rng);
    CAPTURE(a);
    CAPTURE(b);
    CHECK(std::abs(token_f1(a, b) - oracles::ref_token_f1(a, b)) <= 1e-9);
    CHECK(std::abs(bleu(a, b) - oracles::ref_bleu(a, b)) <= 1e-9);
    CHECK(std::abs(rouge_l(a, b) - oracles::ref_rouge_l(a, b)) <= 1e-9);
    CHECK(std::abs(levenshtein_similarity(a, b) - oracles::ref_levenshtein_similarity(a, b)) <=
          1e-9);
  }
}

TEST_CASE("metric symmetry and identity properties") {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 50; ++i) {
    const std::string a = test_util::random_sentence(rng, 12);
    const std::string b = test_util::random_sentence(rng, 12);
    CHECK(levenshtein_similarity(a, b) == levenshtein_similarity(b, a));
    CHECK(rouge_l(a, b) == doctest::Approx(rouge_l(b, a)).epsilon(1e-12));
    for (double v : {token_f1(a, b), bleu(a, b), rouge_l(a, b), levenshtein_similarity(a, b)}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    if (!a.empty()) {
      CHECK(token_f1(a, a) == 1.0);
      CHECK(rouge_l(a, a) == 1.0);
      CHECK(levenshtein_similarity(a, a) == 1.0);
    }
  }
}

TEST_CASE("exact_match counts matching fields out of 7") {
  Corpus corpus = generate_synthetic(4, 11);
  const ParsedResume& gold = corpus.entries[0].gold;
  CHECK(exact_match(gold, gold) == 1.0);

  ParsedResume pred = gold;
  pred.email = "someone.else@example.com";
  CHECK(exact_match(pred, gold) == doctest::Approx(6.0 / 7.0).epsilon(1e-12));

  ParsedResume blank;  // all placeholders vs a populated gold
  CHECK(exact_match(blank, gold) == 0.0);
}

TEST_CASE("exact_match compares skills as sets") {
  ParsedResume a, b;
  a.skills = {"Python", "Rust"};
  b.skills = {"Rust", "Python"};
  CHECK(exact_match(a, b) == 1.0);
}

TEST_CASE("RSWeights defaults and validation") {
  RSWeights w = RSWeights::defaults();
  w.check();
  CHECK(w.weight(Field::kSkills) == 0.35);
  CHECK(w.weight(Field::kEmail) == 0.15);
  CHECK(w.weight(Field::kPhone) == 0.15);
  CHECK(w.weight(Field::kName) == 0.0875);
  double remainder = w.weight(Field::kName) + w.weight(Field::kDepartment) +
                     w.weight(Field::kExperience) + w.weight(Field::kEducation);
  CHECK(remainder == doctest::Approx(0.35).epsilon(1e-12));

  RSWeights bad = w;
  bad.weights["skills"] = 0.5;
  CHECK_THROWS_AS(bad.check(), ConfigError);
  CHECK_THROWS_AS(RSWeights::from_json({{"unknown_field", 1.0}}), ConfigError);
}

TEST_CASE("recruitment_similarity closed forms") {
  Corpus corpus = generate_synthetic(3, 5);
  const ParsedResume& gold = corpus.entries[0].gold;
  const RSWeights w = RSWeights::defaults();

  CHECK(recruitment_similarity(gold, gold, w) == doctest::Approx(1.0).epsilon(1e-12));

  // Phone completely wrong (same length, zero character overlap) -> S_phone = 0.
  ParsedResume phone_fail = gold;
  REQUIRE(gold.phone.size() == 14);
  phone_fail.phone = std::string(gold.phone.size(), 'x');
  CHECK(recruitment_similarity(phone_fail, gold, w) ==
        doctest::Approx(0.85).epsilon(1e-12));

  // Skills Jaccard exactly 0.5, everything else perfect.
  ParsedResume half_skills = gold;
  half_skills.skills = gold.skills;
  half_skills.skills.push_back("Something Unrelated Entirely");
  const double jaccard =
      static_cast<double>(gold.skills.size()) / static_cast<double>(gold.skills.size() + 1);
  // Force exactly 0.5 with a one-skill gold instead.
  ParsedResume one_skill_gold = gold;
  one_skill_gold.skills = {"Python"};
  ParsedResume two_skill_pred = one_skill_gold;
  two_skill_pred.skills = {"Python", "Falconry"};
  CHECK(skill_jaccard(two_skill_pred.skills, one_skill_gold.skills) == 0.5);
  CHECK(recruitment_similarity(two_skill_pred, one_skill_gold, w) ==
        doctest::Approx(1.0 - 0.35 * 0.5).epsilon(1e-12));
  (void)jaccard;
}

TEST_CASE("RS is affine in each field similarity") {
  Corpus corpus = generate_synthetic(2, 17);
  const ParsedResume& gold = corpus.entries[0].gold;
  const RSWeights w = RSWeights::defaults();
  // Perturb exactly one field from perfect to zero similarity: delta == weight.
  ParsedResume pred = gold;
  pred.phone = std::string(gold.phone.size(), 'z');
  const double before = recruitment_similarity(gold, gold, w);
  const double after = recruitment_similarity(pred, gold, w);
  CHECK(before - after == doctest::Approx(w.weight(Field::kPhone)).epsilon(1e-12));
  // And the composite equals the weighted sum of per-field similarities.
  double total = 0;
  for (Field f : kAllFields) total += w.weight(f) * field_similarity(pred, gold, f);
  CHECK(recruitment_similarity(pred, gold, w) == doctest::Approx(total).epsilon(1e-15));
}

TEST_CASE("evaluate_corpus: identity and shape") {
  Corpus corpus = generate_synthetic(10, 23);
  std::vector<std::pair<ParsedResume, ParsedResume>> pairs;
  for (const auto& e : corpus.entries) pairs.emplace_back(e.gold, e.gold);
  MetricReport report = evaluate_corpus(pairs, RSWeights::defaults());
  CHECK(report.n_documents == 10);
  CHECK(report.em == 1.0);
  CHECK(report.f1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.bleu == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.rouge_l == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.rs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.nested_rouge.at("experience") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.per_field.size() == 7);

  CHECK_THROWS_AS(evaluate_corpus({}, RSWeights::defaults()), ConfigError);

  // Single pair: corpus report equals the per-pair metrics.
  ParsedResume pred = corpus.entries[0].gold;
  pred.email = "different@example.net";
  MetricReport single = evaluate_corpus({{pred, corpus.entries[0].gold}}, RSWeights::defaults());
  CHECK(single.em ==
        doctest::Approx(exact_match(pred, corpus.entries[0].gold)).epsilon(1e-12));
  CHECK(single.rs == doctest::Approx(recruitment_similarity(
                         pred, corpus.entries[0].gold, RSWeights::defaults()))
                         .epsilon(1e-12));
}

TEST_CASE("report JSON round-trip and table rendering") {
  Corpus corpus = generate_synthetic(5, 31);
  std::vector<std::pair<ParsedResume, ParsedResume>> pairs;
  for (const auto& e : corpus.entries) pairs.emplace_back(e.gold, e.gold);
  MetricReport report = evaluate_corpus(pairs, RSWeights::defaults());
  MetricReport back = report_from_json(report_to_json(report));
  CHECK(back.em == report.em);
  CHECK(back.rs == report.rs);
  CHECK(back.nested_rouge == report.nested_rouge);

  std::string table = render_report_table({{"run-a", report}, {"run-b", report}});
  CHECK(table.find("EM (%)") != std::string::npos);
  CHECK(table.find("run-a") != std::string::npos);
  CHECK(table.find("run-b") != std::string::npos);
  CHECK(table.find("100.00") != std::string::npos);
}
