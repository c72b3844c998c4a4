#include <doctest.h>

#include <json.hpp>

#include "errors.hpp"
#include "json_repair.hpp"

using namespace parsemble;

TEST_CASE("repair_json strips code fences") {
  CHECK(repair_json("```json\n{\"name\":\"A\"}\n```") == "{\"name\":\"A\"}");
  CHECK(repair_json("```\n{\"a\":1}\n```") == "{\"a\":1}");
}

TEST_CASE("repair_json strips surrounding prose") {
  CHECK(repair_json("Here is the result: {\"name\":\"A\"}") == "{\"name\":\"A\"}");
  CHECK(repair_json("{\"name\":\"A\"} — hope that helps!") == "{\"name\":\"A\"}");
}

TEST_CASE("repair_json removes trailing commas") {
  CHECK(nlohmann::json::parse(repair_json("{\"a\":1,}")) == nlohmann::json::parse("{\"a\":1}"));
  CHECK(nlohmann::json::parse(repair_json("{\"a\":[1,2,],}")) ==
        nlohmann::json::parse("{\"a\":[1,2]}"));
}

TEST_CASE("repair_json honors braces inside strings") {
  const std::string in = R"({"note":"uses { and } and \" quotes","a":1})";
  CHECK(repair_json("prefix " + in + " suffix") == in);
  // A comma inside a string survives comma stripping.
  const std::string tricky = R"({"note":"a, }","b":2})";
  CHECK(repair_json(tricky) == tricky);
}

TEST_CASE("repair_json returns the first top-level object") {
  CHECK(repair_json("x {\"a\":1} y {\"b\":2}") == "{\"a\":1}");
  // An unbalanced early brace is skipped in favor of the next valid object.
  CHECK(repair_json("{oops {\"a\":1}") == "{\"a\":1}");
}

TEST_CASE("repair_json fails when no object is recoverable") {
  for (const char* in : {"no json here", "", "[1,2,3]", "{broken", "{\"a\":}"}) {
    CAPTURE(in);
    try {
      repair_json(in);
      FAIL("expected BackendError");
    } catch (const BackendError& e) {
      CHECK(e.kind() == BackendError::Kind::kExtractionFailed);
      CHECK(e.raw_response() == in);
    }
  }
}
