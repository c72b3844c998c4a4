#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "aggregate.hpp"
#include "extractors.hpp"

namespace parsemble {

// Generic chat-completion endpoint description. API keys are read from the
// environment variable named here, never from the config file itself.
struct EndpointConfig {
  std::string model_id;
  std::string base_url;  // e.g. "http://127.0.0.1:8080"
  std::string path = "/v1/chat/completions";
  std::string api_key_env_var;
  std::string model_name;  // request body "model"; defaults to model_id
  std::string system_prompt;
  // When non-empty, one request per field using these templates
  // ({{field}} and {{document}} placeholders); otherwise a single
  // whole-resume request with a field-schema instruction.
  std::map<std::string, std::string> prompt_template_per_field;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 2;

  static EndpointConfig from_json(const nlohmann::json& j);
  void check() const;
};

// Minimal chat-completion client: POST {model, messages}, read
// choices[0].message.content, retry transport errors and 5xx responses.
// Calls are serialized internally, so instances are safe to share.
class ChatClient {
 public:
  explicit ChatClient(EndpointConfig config);
  ~ChatClient();

  // Returns the assistant message content. Throws BackendError.
  std::string complete(const std::string& user_prompt) const;

  const EndpointConfig& config() const { return config_; }

 private:
  EndpointConfig config_;
  mutable std::mutex mutex_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Extractor backed by a chat-completion endpoint; responses go through
// repair_json and must parse against the resume schema.
class HttpExtractor : public ExtractorBackend {
 public:
  explicit HttpExtractor(EndpointConfig config);

  const std::string& model_id() const override;
  ModelPrediction extract(const ResumeDocument& document) const override;

 private:
  ChatClient client_;
};

// Consensus delegate that asks an endpoint to fuse conflicting nested
// sections, using the same endpoint configuration format as extractors.
class HttpConsensusDelegate : public ConsensusDelegate {
 public:
  explicit HttpConsensusDelegate(EndpointConfig config);

  std::string resolve(const ConsensusRequest& request) override;

 private:
  ChatClient client_;
};

}  // namespace parsemble
