#pragma once

// Brute-force reference implementations, independent of the library's metric
// and voting code. Test-only.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oracles {

double ref_token_f1(std::string_view pred, std::string_view gold);
double ref_bleu(std::string_view pred, std::string_view gold);
double ref_rouge_l(std::string_view pred, std::string_view gold);
double ref_levenshtein_similarity(std::string_view a, std::string_view b);

// Exhaustive tally-and-sort majority oracle implementing the stated rules:
// max cumulative weight; ties -> highest single supporting weight; then
// lexicographically smallest value; "N/A" loses ties against real values.
std::string ref_majority_winner(const std::vector<std::pair<std::string, double>>& candidates);

}  // namespace oracles
