#include "http_backend.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "errors.hpp"
#include "json_repair.hpp"

namespace parsemble {

using nlohmann::json;

EndpointConfig EndpointConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("endpoint config must be a JSON object");
  EndpointConfig c;
  auto str = [&](const char* key, std::string& out, bool required) {
    if (!j.contains(key)) {
      if (required) throw ConfigError(std::string("endpoint config missing '") + key + "'");
      return;
    }
    if (!j.at(key).is_string()) {
      throw ConfigError(std::string("endpoint config '") + key + "' must be a string");
    }
    out = j.at(key).get<std::string>();
  };
  str("model_id", c.model_id, true);
  str("base_url", c.base_url, true);
  str("path", c.path, false);
  str("api_key_env_var", c.api_key_env_var, false);
  str("model_name", c.model_name, false);
  str("system_prompt", c.system_prompt, false);
  if (j.contains("prompt_template_per_field")) {
    const json& t = j.at("prompt_template_per_field");
    if (!t.is_object()) {
      throw ConfigError("endpoint config 'prompt_template_per_field' must be an object");
    }
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (!it.value().is_string()) {
        throw ConfigError("prompt template for '" + it.key() + "' must be a string");
      }
      c.prompt_template_per_field[it.key()] = it.value().get<std::string>();
    }
  }
  if (j.contains("timeout_ms")) {
    c.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<long>());
  }
  if (j.contains("max_retries")) c.max_retries = j.at("max_retries").get<int>();
  c.check();
  return c;
}

void EndpointConfig::check() const {
  if (model_id.empty()) throw ConfigError("endpoint config requires model_id");
  if (base_url.empty()) throw ConfigError("endpoint config requires base_url");
  if (timeout.count() <= 0) throw ConfigError("endpoint timeout must be > 0");
  if (max_retries < 0) throw ConfigError("endpoint max_retries must be >= 0");
}

struct ChatClient::Impl {
  httplib::Client client;
  explicit Impl(const EndpointConfig& c) : client(c.base_url) {
    const auto secs = c.timeout.count() / 1000;
    const auto usecs = (c.timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
  }
};

ChatClient::ChatClient(EndpointConfig config) : config_(std::move(config)) {
  config_.check();
  impl_ = std::make_unique<Impl>(config_);
}

ChatClient::~ChatClient() = default;

std::string ChatClient::complete(const std::string& user_prompt) const {
  json body;
  body["model"] = config_.model_name.empty() ? config_.model_id : config_.model_name;
  json messages = json::array();
  if (!config_.system_prompt.empty()) {
    messages.push_back({{"role", "system"}, {"content", config_.system_prompt}});
  }
  messages.push_back({{"role", "user"}, {"content", user_prompt}});
  body["messages"] = std::move(messages);
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key_env_var.empty()) {
    const char* key = std::getenv(config_.api_key_env_var.c_str());
    if (key != nullptr && key[0] != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  std::lock_guard<std::mutex> lock(mutex_);
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50L * attempt));
    }
    auto res = impl_->client.Post(config_.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error: HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw BackendError(BackendError::Kind::kUnavailable,
                         "endpoint '" + config_.model_id + "' returned HTTP " +
                             std::to_string(res->status),
                         res->body);
    }
    json parsed;
    try {
      parsed = json::parse(res->body);
    } catch (const json::parse_error&) {
      throw BackendError(BackendError::Kind::kExtractionFailed,
                         "endpoint '" + config_.model_id + "' returned a non-JSON body",
                         res->body);
    }
    try {
      return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw BackendError(BackendError::Kind::kExtractionFailed,
                         "endpoint '" + config_.model_id +
                             "' response has no choices[0].message.content",
                         res->body);
    }
  }
  throw BackendError(BackendError::Kind::kUnavailable,
                     "endpoint '" + config_.model_id + "' unavailable after " +
                         std::to_string(config_.max_retries + 1) + " attempts (" + last_error +
                         ")");
}

namespace {

const char* kDefaultSystemPrompt =
    "You are a resume parsing engine. Reply with a single JSON object and nothing else.";

std::string whole_resume_prompt(const ResumeDocument& doc) {
  return
      "Extract these fields from the resume below and reply as one JSON object with keys: "
      "name, email, phone, department, skills (array of strings), experience (array of "
      "objects with title, company, location, start_date, end_date, bullets), education "
      "(array of objects with degree, institution, field_of_study, start_date, end_date). "
      "Use \"N/A\" for anything missing.\n\nResume:\n" +
      doc.raw_text;
}

std::string substitute(std::string templ, const std::string& field, const std::string& document) {
  auto replace_all = [&](const std::string& needle, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = templ.find(needle, pos)) != std::string::npos) {
      templ.replace(pos, needle.size(), value);
      pos += value.size();
    }
  };
  replace_all("{{field}}", field);
  replace_all("{{document}}", document);
  return templ;
}

}  // namespace

HttpExtractor::HttpExtractor(EndpointConfig config) : client_([&] {
  if (config.system_prompt.empty()) config.system_prompt = kDefaultSystemPrompt;
  return std::move(config);
}()) {}

const std::string& HttpExtractor::model_id() const { return client_.config().model_id; }

ModelPrediction HttpExtractor::extract(const ResumeDocument& document) const {
  const auto started = std::chrono::steady_clock::now();
  ModelPrediction out;
  out.model_id = model_id();

  const auto& templates = client_.config().prompt_template_per_field;
  std::string repaired;
  if (templates.empty()) {
    out.raw_response = client_.complete(whole_resume_prompt(document));
    repaired = repair_json(out.raw_response);
  } else {
    // One request per field; each response must contain the field's value.
    json assembled = json::object();
    for (Field f : kAllFields) {
      const std::string name(field_name(f));
      auto it = templates.find(name);
      const std::string prompt = it != templates.end()
                                     ? substitute(it->second, name, document.raw_text)
                                     : substitute("Extract the candidate's {{field}} from the "
                                                  "resume below and reply as a JSON object with "
                                                  "the single key \"{{field}}\".\n\nResume:\n"
                                                  "{{document}}",
                                                  name, document.raw_text);
      const std::string content = client_.complete(prompt);
      if (!out.raw_response.empty()) out.raw_response += "\n";
      out.raw_response += content;
      json piece = json::parse(repair_json(content));
      if (piece.contains(name)) {
        assembled[name] = piece.at(name);
      } else if (piece.is_object() && piece.size() == 1) {
        assembled[name] = piece.begin().value();
      } else {
        throw BackendError(BackendError::Kind::kExtractionFailed,
                           "per-field response for '" + name + "' has no usable value", content);
      }
    }
    repaired = assembled.dump();
  }

  try {
    out.prediction = parse_resume_json(repaired);
  } catch (const Error& e) {
    throw BackendError(BackendError::Kind::kExtractionFailed,
                       "response does not fit the resume schema: " + std::string(e.what()),
                       out.raw_response);
  }
  out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  return out;
}

HttpConsensusDelegate::HttpConsensusDelegate(EndpointConfig config) : client_([&] {
  if (config.system_prompt.empty()) {
    config.system_prompt =
        "You are a resume parsing arbiter. Reply with a single JSON object and nothing else.";
  }
  return std::move(config);
}()) {}

std::string HttpConsensusDelegate::resolve(const ConsensusRequest& request) {
  std::string prompt =
      "Different extractors disagree on the '" + request.field +
      "' section of this resume. Fuse them into the most faithful version, using the resume "
      "text as ground truth. Reply as {\"" + request.field + "\": [...]}.\n\nResume:\n" +
      request.document_text + "\n\nCandidates:\n";
  for (const auto& c : request.candidates) {
    prompt += "- " + c.model_id + " (weight " + std::to_string(c.weight) + "): " +
              c.value_json + "\n";
  }
  const std::string content = client_.complete(prompt);
  json piece = json::parse(repair_json(content));
  if (!piece.contains(request.field) || !piece.at(request.field).is_array()) {
    throw BackendError(BackendError::Kind::kExtractionFailed,
                       "consensus response lacks a '" + request.field + "' array", content);
  }
  return piece.at(request.field).dump();
}

}  // namespace parsemble
