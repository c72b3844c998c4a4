#include "json_repair.hpp"

#include <json.hpp>

#include "errors.hpp"

namespace parsemble {

namespace {

// Extracts the balanced {...} starting at `start`, honoring strings and
// escapes. Returns empty on imbalance.
std::string balanced_object(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
      if (depth == 0) return std::string(text.substr(start, i - start + 1));
      if (depth < 0) return {};
    }
  }
  return {};
}

std::string strip_trailing_commas(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      out.push_back(c);
      if (c == '\\' && i + 1 < text.size()) {
        out.push_back(text[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out.push_back(c);
      continue;
    }
    if (c == ',') {
      std::size_t k = i + 1;
      while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
      if (k < text.size() && (text[k] == '}' || text[k] == ']')) continue;  // drop the comma
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string repair_json(std::string_view raw) {
  std::size_t pos = 0;
  while ((pos = raw.find('{', pos)) != std::string_view::npos) {
    std::string candidate = balanced_object(raw, pos);
    if (!candidate.empty()) {
      candidate = strip_trailing_commas(candidate);
      if (nlohmann::json::accept(candidate)) return candidate;
    }
    ++pos;
  }
  throw BackendError(BackendError::Kind::kExtractionFailed,
                     "no JSON object recoverable from response", std::string(raw));
}

}  // namespace parsemble
