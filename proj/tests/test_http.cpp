#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "errors.hpp"
#include "http_backend.hpp"

using namespace parsemble;
using nlohmann::json;

namespace {

// In-process chat-completion stub bound to a loopback port.
class StubServer {
 public:
  explicit StubServer(httplib::Server::Handler handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string chat_body(const std::string& content) {
  json j;
  j["choices"] = json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}});
  return j.dump();
}

EndpointConfig endpoint(const std::string& base_url, int max_retries = 0) {
  EndpointConfig c;
  c.model_id = "remote";
  c.base_url = base_url;
  c.max_retries = max_retries;
  c.timeout = std::chrono::milliseconds(2000);
  return c;
}

const ResumeDocument kDoc{"doc-1", "Ada Lovelace, ada@example.com, skilled in Python 3."};

}  // namespace

TEST_CASE("http extractor parses a fenced response") {
  StubServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(chat_body("```json\n{\"name\":\"Ada Lovelace\",\"email\":"
                              "\"ada@example.com\",\"skills\":[\"Python 3\"]}\n```"),
                    "application/json");
  });
  HttpExtractor extractor(endpoint(server.base_url()));
  ModelPrediction p = extractor.extract(kDoc);
  CHECK(p.model_id == "remote");
  CHECK(p.prediction.name == "Ada Lovelace");
  CHECK(p.prediction.skills == std::vector<std::string>{"Python 3"});
  CHECK(p.prediction.phone == "N/A");  // placeholder-filled
  CHECK(p.raw_response.find("```") != std::string::npos);
}

TEST_CASE("http extractor retries transient server errors") {
  std::atomic<int> calls{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    if (++calls <= 2) {
      res.status = 503;
      return;
    }
    res.set_content(chat_body("{\"name\":\"A\"}"), "application/json");
  });
  HttpExtractor extractor(endpoint(server.base_url(), /*max_retries=*/2));
  ModelPrediction p = extractor.extract(kDoc);
  CHECK(p.prediction.name == "A");
  CHECK(calls == 3);
}

TEST_CASE("http extractor gives up after max_retries") {
  std::atomic<int> calls{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 500;
  });
  HttpExtractor extractor(endpoint(server.base_url(), /*max_retries=*/1));
  try {
    extractor.extract(kDoc);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendError::Kind::kUnavailable);
  }
  CHECK(calls == 2);
}

TEST_CASE("http extractor does not retry client errors") {
  std::atomic<int> calls{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 404;
  });
  HttpExtractor extractor(endpoint(server.base_url(), /*max_retries=*/3));
  CHECK_THROWS_AS(extractor.extract(kDoc), BackendError);
  CHECK(calls == 1);
}

TEST_CASE("unrepairable responses fail with the raw text attached") {
  StubServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(chat_body("I could not find structured data, sorry."), "application/json");
  });
  HttpExtractor extractor(endpoint(server.base_url()));
  try {
    extractor.extract(kDoc);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendError::Kind::kExtractionFailed);
    CHECK(e.raw_response().find("sorry") != std::string::npos);
  }
}

TEST_CASE("schema-breaking responses surface as extraction failures") {
  StubServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(chat_body("{\"skills\":\"Python\"}"), "application/json");
  });
  HttpExtractor extractor(endpoint(server.base_url()));
  try {
    extractor.extract(kDoc);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendError::Kind::kExtractionFailed);
  }
}

TEST_CASE("api key from the configured environment variable") {
  std::string seen_auth;
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    res.set_content(chat_body("{\"name\":\"A\"}"), "application/json");
  });
  setenv("PARSEMBLE_TEST_KEY", "sekrit", 1);
  EndpointConfig c = endpoint(server.base_url());
  c.api_key_env_var = "PARSEMBLE_TEST_KEY";
  HttpExtractor extractor(c);
  extractor.extract(kDoc);
  CHECK(seen_auth == "Bearer sekrit");
  unsetenv("PARSEMBLE_TEST_KEY");
}

TEST_CASE("per-field prompting assembles one resume from seven responses") {
  std::atomic<int> calls{0};
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    json body = json::parse(req.body);
    const std::string prompt = body["messages"].back()["content"].get<std::string>();
    json piece = json::object();
    if (prompt.find("\"name\"") != std::string::npos) {
      piece["name"] = "Ada Lovelace";
    } else if (prompt.find("\"email\"") != std::string::npos) {
      piece["email"] = "ada@example.com";
    } else if (prompt.find("\"phone\"") != std::string::npos) {
      piece["phone"] = "N/A";
    } else if (prompt.find("\"department\"") != std::string::npos) {
      piece["department"] = "Research";
    } else if (prompt.find("\"skills\"") != std::string::npos) {
      piece["skills"] = json::array({"Python 3"});
    } else if (prompt.find("\"experience\"") != std::string::npos) {
      piece["experience"] = json::array();
    } else {
      piece["education"] = json::array();
    }
    res.set_content(chat_body(piece.dump()), "application/json");
  });
  EndpointConfig c = endpoint(server.base_url());
  for (const char* f : {"name", "email", "phone", "department", "skills", "experience",
                        "education"}) {
    c.prompt_template_per_field[f] =
        "Extract \"{{field}}\" as JSON with key \"{{field}}\".\n{{document}}";
  }
  HttpExtractor extractor(c);
  ModelPrediction p = extractor.extract(kDoc);
  CHECK(calls == 7);
  CHECK(p.prediction.name == "Ada Lovelace");
  CHECK(p.prediction.department == "Research");
  CHECK(p.prediction.skills == std::vector<std::string>{"Python 3"});
}

TEST_CASE("http consensus delegate returns the fused array") {
  StubServer server([](const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body);
    const std::string prompt = body["messages"].back()["content"].get<std::string>();
    CHECK(prompt.find("weight") != std::string::npos);       // weights included
    CHECK(prompt.find("Resume:") != std::string::npos);      // document included
    res.set_content(
        chat_body(R"({"experience":[{"title":"Dev","company":"Acme","location":"Austin, TX",
                      "start_date":"2020-01-01","end_date":"present","bullets":["built"]}]})"),
        "application/json");
  });
  EndpointConfig c = endpoint(server.base_url());
  HttpConsensusDelegate delegate(c);
  ConsensusRequest request;
  request.field = "experience";
  request.document_text = kDoc.raw_text;
  request.candidates = {{"a", 3.0, "[]"}, {"b", 2.0, "[{}]"}};
  std::string fused = delegate.resolve(request);
  CHECK(fused.find("Acme") != std::string::npos);

  // Through consensus(): the delegate answer is normalized + validated.
  ConsensusResult res = consensus(request, &delegate, SkillOntology::builtin());
  CHECK_FALSE(res.fallback);
  CHECK(res.value_json.find("Acme") != std::string::npos);
}

TEST_CASE("endpoint config validation") {
  CHECK_THROWS_AS(EndpointConfig::from_json({{"model_id", "x"}}), ConfigError);  // no base_url
  CHECK_THROWS_AS(EndpointConfig::from_json(
                      {{"model_id", "x"}, {"base_url", "http://h"}, {"timeout_ms", 0}}),
                  ConfigError);
  CHECK_THROWS_AS(EndpointConfig::from_json(
                      {{"model_id", "x"}, {"base_url", "http://h"}, {"max_retries", -1}}),
                  ConfigError);
}
