#include "metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace parsemble {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::map<std::string, int> count_tokens(const std::vector<std::string>& tokens) {
  std::map<std::string, int> counts;
  for (const auto& t : tokens) ++counts[t];
  return counts;
}

}  // namespace

double token_f1(std::string_view pred_text, std::string_view gold_text) {
  auto pred = tokenize(pred_text);
  auto gold = tokenize(gold_text);
  if (pred.empty() && gold.empty()) return 1.0;
  if (pred.empty() || gold.empty()) return 0.0;
  auto pc = count_tokens(pred);
  auto gc = count_tokens(gold);
  int overlap = 0;
  for (const auto& [tok, n] : pc) {
    auto it = gc.find(tok);
    if (it != gc.end()) overlap += std::min(n, it->second);
  }
  if (overlap == 0) return 0.0;
  double p = static_cast<double>(overlap) / static_cast<double>(pred.size());
  double r = static_cast<double>(overlap) / static_cast<double>(gold.size());
  return 2.0 * p * r / (p + r);
}

// BLEU-4 with uniform n-gram weights, brevity penalty, and add-one smoothing
// on n >= 2 (unigram precision is left unsmoothed, so disjoint texts score 0).
double bleu(std::string_view pred_text, std::string_view gold_text) {
  auto pred = tokenize(pred_text);
  auto gold = tokenize(gold_text);
  if (pred.empty() || gold.empty()) return 0.0;

  auto ngram_counts = [](const std::vector<std::string>& tokens, int n) {
    std::map<std::string, int> counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string key;
      for (int k = 0; k < n; ++k) {
        if (k) key.push_back('\x1f');
        key += tokens[i + k];
      }
      ++counts[key];
    }
    return counts;
  };

  double log_sum = 0.0;
  for (int n = 1; n <= 4; ++n) {
    auto pc = ngram_counts(pred, n);
    auto gc = ngram_counts(gold, n);
    long matches = 0, total = 0;
    for (const auto& [gram, count] : pc) {
      total += count;
      auto it = gc.find(gram);
      if (it != gc.end()) matches += std::min(count, it->second);
    }
    double precision;
    if (n == 1) {
      if (matches == 0) return 0.0;
      precision = static_cast<double>(matches) / static_cast<double>(total);
    } else {
      precision = (static_cast<double>(matches) + 1.0) / (static_cast<double>(total) + 1.0);
    }
    log_sum += 0.25 * std::log(precision);
  }

  double c = static_cast<double>(pred.size());
  double r = static_cast<double>(gold.size());
  double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum);
}

double rouge_l(std::string_view pred_text, std::string_view gold_text) {
  auto pred = tokenize(pred_text);
  auto gold = tokenize(gold_text);
  if (pred.empty() && gold.empty()) return 1.0;
  if (pred.empty() || gold.empty()) return 0.0;

  // LCS length via the classic DP, two rows.
  const std::size_t n = pred.size(), m = gold.size();
  std::vector<int> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = pred[i - 1] == gold[j - 1] ? prev[j - 1] + 1
                                          : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  int lcs = prev[m];
  if (lcs == 0) return 0.0;
  double p = static_cast<double>(lcs) / static_cast<double>(n);
  double r = static_cast<double>(lcs) / static_cast<double>(m);
  return 2.0 * p * r / (p + r);
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  const std::size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  double dist = static_cast<double>(prev[m]);
  return 1.0 - dist / static_cast<double>(std::max(n, m));
}

double skill_jaccard(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  std::set<std::string> ps(pred.begin(), pred.end());
  std::set<std::string> gs(gold.begin(), gold.end());
  if (ps.empty() && gs.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& s : ps) inter += gs.count(s);
  std::size_t uni = ps.size() + gs.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::string linearize_experience(const std::vector<ExperienceEntry>& entries) {
  std::ostringstream out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (i) out << '\n';
    out << e.title << " | " << e.company << " | " << e.location << " | " << e.start_date
        << " | " << e.end_date;
    for (const auto& b : e.bullets) out << "\n- " << b;
  }
  return out.str();
}

std::string linearize_education(const std::vector<EducationEntry>& entries) {
  std::ostringstream out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (i) out << '\n';
    out << e.degree << " | " << e.institution << " | " << e.field_of_study << " | "
        << e.start_date << " | " << e.end_date;
  }
  return out.str();
}

std::string field_text(const ParsedResume& r, Field f) {
  switch (f) {
    case Field::kName: return r.name;
    case Field::kEmail: return r.email;
    case Field::kPhone: return r.phone;
    case Field::kDepartment: return r.department;
    case Field::kSkills: {
      std::string out;
      for (std::size_t i = 0; i < r.skills.size(); ++i) {
        if (i) out.push_back(' ');
        out += r.skills[i];
      }
      return out;
    }
    case Field::kExperience: return linearize_experience(r.experience);
    case Field::kEducation: return linearize_education(r.education);
  }
  return {};
}

double exact_match(const ParsedResume& pred, const ParsedResume& gold) {
  int matches = 0;
  for (Field f : kAllFields) {
    bool equal = false;
    if (is_scalar_field(f)) {
      equal = pred.scalar(f) == gold.scalar(f);
    } else if (f == Field::kSkills) {
      equal = std::set<std::string>(pred.skills.begin(), pred.skills.end()) ==
              std::set<std::string>(gold.skills.begin(), gold.skills.end());
    } else if (f == Field::kExperience) {
      equal = pred.experience == gold.experience;
    } else {
      equal = pred.education == gold.education;
    }
    if (equal) ++matches;
  }
  return static_cast<double>(matches) / 7.0;
}

double field_similarity(const ParsedResume& pred, const ParsedResume& gold, Field f) {
  if (is_scalar_field(f)) return levenshtein_similarity(pred.scalar(f), gold.scalar(f));
  if (f == Field::kSkills) return skill_jaccard(pred.skills, gold.skills);
  if (f == Field::kExperience) {
    return rouge_l(linearize_experience(pred.experience), linearize_experience(gold.experience));
  }
  return rouge_l(linearize_education(pred.education), linearize_education(gold.education));
}

RSWeights RSWeights::defaults() {
  RSWeights w;
  w.weights = {
      {"skills", 0.35},     {"email", 0.15},      {"phone", 0.15},
      {"name", 0.0875},     {"department", 0.0875},
      {"experience", 0.0875}, {"education", 0.0875},
  };
  return w;
}

RSWeights RSWeights::with_skills_weight(double skills_weight) {
  if (skills_weight < 0.0 || skills_weight >= 1.0) {
    throw ConfigError("skills weight must be in [0, 1)");
  }
  RSWeights w = defaults();
  const double rest = 1.0 - w.weights.at("skills");  // 0.65
  const double factor = (1.0 - skills_weight) / rest;
  for (auto& [field, value] : w.weights) {
    value = field == "skills" ? skills_weight : value * factor;
  }
  return w;
}

RSWeights RSWeights::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("RS weights must be a JSON object");
  RSWeights w = defaults();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (w.weights.find(it.key()) == w.weights.end()) {
      throw ConfigError("unknown RS weight field '" + it.key() + "'");
    }
    if (!it.value().is_number()) {
      throw ConfigError("RS weight '" + it.key() + "' must be a number");
    }
    w.weights[it.key()] = it.value().get<double>();
  }
  w.check();
  return w;
}

void RSWeights::check() const {
  double total = 0.0;
  for (Field f : kAllFields) {
    auto it = weights.find(std::string(field_name(f)));
    if (it == weights.end()) {
      throw ConfigError("RS weights missing field '" + std::string(field_name(f)) + "'");
    }
    if (it->second < 0.0) {
      throw ConfigError("RS weight for '" + it->first + "' must be >= 0");
    }
    total += it->second;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("RS weights must total 1.0 (got " + std::to_string(total) + ")");
  }
}

double RSWeights::weight(Field f) const { return weights.at(std::string(field_name(f))); }

double recruitment_similarity(const ParsedResume& pred, const ParsedResume& gold,
                              const RSWeights& rs_weights) {
  rs_weights.check();
  double rs = 0.0;
  for (Field f : kAllFields) {
    rs += rs_weights.weight(f) * field_similarity(pred, gold, f);
  }
  return rs;
}

MetricReport evaluate_corpus(const std::vector<std::pair<ParsedResume, ParsedResume>>& pairs,
                             const RSWeights& rs_weights) {
  if (pairs.empty()) throw ConfigError("cannot evaluate an empty pair list");
  rs_weights.check();

  MetricReport report;
  report.n_documents = pairs.size();
  for (Field f : kAllFields) report.per_field[std::string(field_name(f))] = {};

  for (const auto& [pred, gold] : pairs) {
    double doc_f1 = 0, doc_bleu = 0, doc_rouge = 0;
    for (Field f : kAllFields) {
      auto& scores = report.per_field[std::string(field_name(f))];
      const std::string pt = field_text(pred, f);
      const std::string gt = field_text(gold, f);
      double f1 = token_f1(pt, gt);
      double bl = bleu(pt, gt);
      double rl = rouge_l(pt, gt);
      bool em;
      if (is_scalar_field(f)) {
        em = pred.scalar(f) == gold.scalar(f);
      } else if (f == Field::kSkills) {
        em = std::set<std::string>(pred.skills.begin(), pred.skills.end()) ==
             std::set<std::string>(gold.skills.begin(), gold.skills.end());
      } else if (f == Field::kExperience) {
        em = pred.experience == gold.experience;
      } else {
        em = pred.education == gold.education;
      }
      scores.em += em ? 1.0 : 0.0;
      scores.f1 += f1;
      scores.bleu += bl;
      scores.rouge_l += rl;
      scores.similarity += field_similarity(pred, gold, f);
      doc_f1 += f1;
      doc_bleu += bl;
      doc_rouge += rl;
    }
    report.em += exact_match(pred, gold);
    report.f1 += doc_f1 / 7.0;
    report.bleu += doc_bleu / 7.0;
    report.rouge_l += doc_rouge / 7.0;
    report.rs += recruitment_similarity(pred, gold, rs_weights);
  }

  const double n = static_cast<double>(pairs.size());
  report.em /= n;
  report.f1 /= n;
  report.bleu /= n;
  report.rouge_l /= n;
  report.rs /= n;
  for (auto& [_, scores] : report.per_field) {
    scores.em /= n;
    scores.f1 /= n;
    scores.bleu /= n;
    scores.rouge_l /= n;
    scores.similarity /= n;
  }
  report.nested_rouge["experience"] = report.per_field.at("experience").rouge_l;
  report.nested_rouge["education"] = report.per_field.at("education").rouge_l;
  return report;
}

ordered_json report_to_json(const MetricReport& report) {
  ordered_json o;
  o["em"] = report.em;
  o["f1"] = report.f1;
  o["bleu"] = report.bleu;
  o["rouge_l"] = report.rouge_l;
  o["rs"] = report.rs;
  o["em_granularity"] = "field-level";
  o["rouge_variant"] = "rouge-l";
  ordered_json pf;
  for (const auto& [field, s] : report.per_field) {
    ordered_json fs;
    fs["em"] = s.em;
    fs["f1"] = s.f1;
    fs["bleu"] = s.bleu;
    fs["rouge_l"] = s.rouge_l;
    fs["similarity"] = s.similarity;
    pf[field] = std::move(fs);
  }
  o["per_field"] = std::move(pf);
  o["nested_rouge"] = report.nested_rouge;
  o["n_documents"] = report.n_documents;
  return o;
}

MetricReport report_from_json(const json& j) {
  MetricReport r;
  r.em = j.at("em").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.bleu = j.at("bleu").get<double>();
  r.rouge_l = j.at("rouge_l").get<double>();
  r.rs = j.at("rs").get<double>();
  if (j.contains("per_field")) {
    for (auto it = j.at("per_field").begin(); it != j.at("per_field").end(); ++it) {
      FieldScores s;
      s.em = it.value().at("em").get<double>();
      s.f1 = it.value().at("f1").get<double>();
      s.bleu = it.value().at("bleu").get<double>();
      s.rouge_l = it.value().at("rouge_l").get<double>();
      s.similarity = it.value().at("similarity").get<double>();
      r.per_field[it.key()] = s;
    }
  }
  if (j.contains("nested_rouge")) {
    for (auto it = j.at("nested_rouge").begin(); it != j.at("nested_rouge").end(); ++it) {
      r.nested_rouge[it.key()] = it.value().get<double>();
    }
  }
  r.n_documents = j.value("n_documents", std::size_t{0});
  return r;
}

std::string render_report_table(
    const std::vector<std::pair<std::string, MetricReport>>& runs) {
  struct Row {
    const char* label;
    double (*get)(const MetricReport&);
  };
  static const Row kRows[] = {
      {"EM (%)", [](const MetricReport& r) { return r.em; }},
      {"F1 (%)", [](const MetricReport& r) { return r.f1; }},
      {"BLEU (%)", [](const MetricReport& r) { return r.bleu; }},
      {"ROUGE-L (%)", [](const MetricReport& r) { return r.rouge_l; }},
      {"RS (%)", [](const MetricReport& r) { return r.rs; }},
      {"ROUGE-L exp. (%)",
       [](const MetricReport& r) {
         auto it = r.nested_rouge.find("experience");
         return it == r.nested_rouge.end() ? 0.0 : it->second;
       }},
      {"ROUGE-L edu. (%)",
       [](const MetricReport& r) {
         auto it = r.nested_rouge.find("education");
         return it == r.nested_rouge.end() ? 0.0 : it->second;
       }},
  };

  std::size_t label_width = std::string("Metric").size();
  for (const auto& row : kRows) label_width = std::max(label_width, std::string(row.label).size());
  std::vector<std::size_t> widths;
  for (const auto& [label, _] : runs) widths.push_back(std::max<std::size_t>(label.size(), 6));

  std::ostringstream out;
  auto pad = [&](const std::string& s, std::size_t w) {
    out << s;
    for (std::size_t i = s.size(); i < w; ++i) out << ' ';
  };
  pad("Metric", label_width);
  for (std::size_t c = 0; c < runs.size(); ++c) {
    out << "  ";
    pad(runs[c].first, widths[c]);
  }
  out << '\n';
  out << std::string(label_width, '-');
  for (std::size_t c = 0; c < runs.size(); ++c) out << "  " << std::string(widths[c], '-');
  out << '\n';
  for (const auto& row : kRows) {
    pad(row.label, label_width);
    for (std::size_t c = 0; c < runs.size(); ++c) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * row.get(runs[c].second));
      out << "  ";
      pad(buf, widths[c]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace parsemble
