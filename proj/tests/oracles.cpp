#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace oracles {

namespace {

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

double ref_token_f1(std::string_view pred, std::string_view gold) {
  std::vector<std::string> p = words(pred), g = words(gold);
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;
  // Multiset intersection by sorting and walking both lists.
  std::sort(p.begin(), p.end());
  std::sort(g.begin(), g.end());
  std::size_t i = 0, j = 0, overlap = 0;
  while (i < p.size() && j < g.size()) {
    if (p[i] == g[j]) {
      ++overlap;
      ++i;
      ++j;
    } else if (p[i] < g[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  if (overlap == 0) return 0.0;
  double precision = double(overlap) / double(p.size());
  double recall = double(overlap) / double(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

double ref_bleu(std::string_view pred, std::string_view gold) {
  std::vector<std::string> p = words(pred), g = words(gold);
  if (p.empty() || g.empty()) return 0.0;

  auto grams = [](const std::vector<std::string>& t, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i + n <= t.size(); ++i) {
      std::string s;
      for (std::size_t k = 0; k < n; ++k) s += t[i + k] + "\x01";
      out.push_back(s);
    }
    return out;
  };

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<std::string> pg = grams(p, n), gg = grams(g, n);
    // Clipped matches: count each prediction n-gram against a shrinking pool.
    std::multiset<std::string> pool(gg.begin(), gg.end());
    std::size_t matched = 0;
    for (const auto& ngram : pg) {
      auto it = pool.find(ngram);
      if (it != pool.end()) {
        pool.erase(it);
        ++matched;
      }
    }
    double precision;
    if (n == 1) {
      if (matched == 0) return 0.0;
      precision = double(matched) / double(pg.size());
    } else {
      precision = (double(matched) + 1.0) / (double(pg.size()) + 1.0);
    }
    log_sum += std::log(precision) / 4.0;
  }
  double c = double(p.size()), r = double(g.size());
  double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum);
}

double ref_rouge_l(std::string_view pred, std::string_view gold) {
  std::vector<std::string> p = words(pred), g = words(gold);
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;
  // Full LCS table.
  std::vector<std::vector<int>> dp(p.size() + 1, std::vector<int>(g.size() + 1, 0));
  for (std::size_t i = 1; i <= p.size(); ++i) {
    for (std::size_t j = 1; j <= g.size(); ++j) {
      dp[i][j] = p[i - 1] == g[j - 1] ? dp[i - 1][j - 1] + 1
                                      : std::max(dp[i - 1][j], dp[i][j - 1]);
    }
  }
  int lcs = dp[p.size()][g.size()];
  if (lcs == 0) return 0.0;
  double precision = double(lcs) / double(p.size());
  double recall = double(lcs) / double(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

double ref_levenshtein_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  std::vector<std::vector<int>> dp(a.size() + 1, std::vector<int>(b.size() + 1, 0));
  for (std::size_t i = 0; i <= a.size(); ++i) dp[i][0] = int(i);
  for (std::size_t j = 0; j <= b.size(); ++j) dp[0][j] = int(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      dp[i][j] = std::min({dp[i - 1][j] + 1, dp[i][j - 1] + 1,
                           dp[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return 1.0 - double(dp[a.size()][b.size()]) / double(std::max(a.size(), b.size()));
}

std::string ref_majority_winner(const std::vector<std::pair<std::string, double>>& candidates) {
  std::map<std::string, double> cumulative;
  std::map<std::string, double> single;
  for (const auto& [v, w] : candidates) {
    cumulative[v] += w;
    single[v] = std::max(single[v], w);
  }
  // Enumerate every distinct value and keep the ones surviving each rule.
  std::vector<std::string> best;
  double top = 0;
  for (const auto& [_, c] : cumulative) top = std::max(top, c);
  for (const auto& [v, c] : cumulative) {
    if (c == top) best.push_back(v);
  }
  if (best.size() > 1) {
    std::vector<std::string> real;
    for (const auto& v : best) {
      if (v != "N/A") real.push_back(v);
    }
    if (!real.empty()) best = real;
  }
  if (best.size() > 1) {
    double top_single = 0;
    for (const auto& v : best) top_single = std::max(top_single, single[v]);
    std::vector<std::string> keep;
    for (const auto& v : best) {
      if (single[v] == top_single) keep.push_back(v);
    }
    best = keep;
  }
  return *std::min_element(best.begin(), best.end());
}

}  // namespace oracles
