#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

// End-to-end checks of the installed CLI binary (path via PARSEMBLE_CLI).

using nlohmann::json;

namespace {

struct Temp {
  std::string dir;
  Temp() {
    char templ[] = "/tmp/parsemble_cli_XXXXXX";
    dir = mkdtemp(templ);
  }
  ~Temp() { std::system(("rm -rf '" + dir + "'").c_str()); }
  std::string file(const std::string& name) const { return dir + "/" + name; }
  void write(const std::string& name, const std::string& content) const {
    std::ofstream out(file(name), std::ios::binary);
    out << content;
  }
  std::string read(const std::string& name) const {
    std::ifstream in(file(name), std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
};

std::string cli() {
  const char* path = std::getenv("PARSEMBLE_CLI");
  REQUIRE_MESSAGE(path != nullptr, "PARSEMBLE_CLI must point at the CLI binary");
  return path;
}

struct RunResult {
  int exit_code;
  std::string output;  // stdout only
};

RunResult run(const std::string& args, const Temp& tmp) {
  const std::string out_file = tmp.dir + "/.stdout";
  const std::string cmd = cli() + " " + args + " > '" + out_file + "' 2> '" + tmp.dir +
                          "/.stderr'";
  int status = std::system(cmd.c_str());
  std::ifstream in(out_file, std::ios::binary);
  std::string output(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>{});
  return {WEXITSTATUS(status), output};
}

const char* kConfig = R"({
  "backends": [
    {"type":"mock","model_id":"alpha","seed":11,"default_error_rate":0.0,
     "default_corruption_kind":"drop"},
    {"type":"mock","model_id":"beta","seed":22,"default_error_rate":0.25,
     "default_corruption_kind":"wrong_value"},
    {"type":"mock","model_id":"gamma","seed":33,"default_error_rate":0.25,
     "default_corruption_kind":"drop"}
  ]
})";

std::size_t count_lines(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("cli synth: deterministic output, usage errors exit 2") {
  Temp tmp;
  auto r1 = run("synth --n 10 --seed 7 --out " + tmp.file("a.jsonl"), tmp);
  CHECK(r1.exit_code == 0);
  CHECK(count_lines(tmp.read("a.jsonl")) == 10);
  CHECK(!tmp.read("a.jsonl.meta.json").empty());

  auto r2 = run("synth --n 10 --seed 7 --out " + tmp.file("b.jsonl"), tmp);
  CHECK(r2.exit_code == 0);
  CHECK(tmp.read("a.jsonl") == tmp.read("b.jsonl"));

  CHECK(run("synth --n 0 --out " + tmp.file("z.jsonl"), tmp).exit_code == 2);
  CHECK(run("synth --n 5", tmp).exit_code == 2);       // missing --out
  CHECK(run("nonsense-subcommand", tmp).exit_code == 2);
  CHECK(run("synth --n 2 --out /nonexistent-dir/x.jsonl", tmp).exit_code == 1);
}

TEST_CASE("cli parse: offline mock run with audit trail") {
  Temp tmp;
  REQUIRE(run("synth --n 12 --seed 3 --out " + tmp.file("c.jsonl"), tmp).exit_code == 0);
  tmp.write("config.json", kConfig);
  tmp.write("weights.json", R"({"alpha":3,"beta":2,"gamma":1})");

  auto r = run("parse --corpus " + tmp.file("c.jsonl") + " --config " + tmp.file("config.json") +
                   " --weights " + tmp.file("weights.json") + " --out " + tmp.file("pred.jsonl") +
                   " --audit " + tmp.file("audit.jsonl"),
               tmp);
  CHECK(r.exit_code == 0);
  CHECK(count_lines(tmp.read("pred.jsonl")) == 12);

  std::istringstream audit(tmp.read("audit.jsonl"));
  std::string line;
  std::size_t audit_lines = 0;
  while (std::getline(audit, line)) {
    if (line.empty()) continue;
    ++audit_lines;
    CHECK(json::parse(line).at("votes").size() == 7);
  }
  CHECK(audit_lines == 12);
}

TEST_CASE("cli parse: unweighted model exits 2 before extraction") {
  Temp tmp;
  REQUIRE(run("synth --n 3 --seed 3 --out " + tmp.file("c.jsonl"), tmp).exit_code == 0);
  tmp.write("config.json", kConfig);
  tmp.write("weights.json", R"({"alpha":3})");
  auto r = run("parse --corpus " + tmp.file("c.jsonl") + " --config " + tmp.file("config.json") +
                   " --weights " + tmp.file("weights.json") + " --out " + tmp.file("p.jsonl"),
               tmp);
  CHECK(r.exit_code == 2);
}

TEST_CASE("cli evaluate: json and table formats; id mismatch exits 2") {
  Temp tmp;
  REQUIRE(run("synth --n 8 --seed 5 --out " + tmp.file("c.jsonl"), tmp).exit_code == 0);
  // A zero-noise single mock reproduces the golds exactly.
  tmp.write("clean.json", R"({"backends":[
    {"type":"mock","model_id":"alpha","seed":1,"default_error_rate":0.0,
     "default_corruption_kind":"drop"}]})");
  tmp.write("w.json", R"({"alpha":1})");
  REQUIRE(run("parse --corpus " + tmp.file("c.jsonl") + " --config " + tmp.file("clean.json") +
                  " --weights " + tmp.file("w.json") + " --out " + tmp.file("pred.jsonl"),
              tmp)
              .exit_code == 0);

  auto js = run("evaluate --pred " + tmp.file("pred.jsonl") + " --gold " + tmp.file("c.jsonl") +
                    " --format json",
                tmp);
  CHECK(js.exit_code == 0);
  json report = json::parse(js.output);
  CHECK(report.at("em").get<double>() == 1.0);
  CHECK(report.at("rs").get<double>() == doctest::Approx(1.0).epsilon(1e-9));

  auto table = run("evaluate --pred " + tmp.file("pred.jsonl") + " --gold " +
                       tmp.file("c.jsonl") + " --format table",
                   tmp);
  CHECK(table.exit_code == 0);
  CHECK(table.output.find("EM (%)") != std::string::npos);
  CHECK(table.output.find("100.00") != std::string::npos);

  // Two prediction files -> two columns.
  auto multi = run("evaluate --pred " + tmp.file("pred.jsonl") + " --pred " +
                       tmp.file("pred.jsonl") + " --gold " + tmp.file("c.jsonl"),
                   tmp);
  CHECK(multi.exit_code == 0);
  CHECK(multi.output.find("pred.jsonl") != std::string::npos);

  // Drop the first prediction line -> missing id listed, exit 2.
  std::string preds = tmp.read("pred.jsonl");
  tmp.write("short.jsonl", preds.substr(preds.find('\n') + 1));
  auto bad = run("evaluate --pred " + tmp.file("short.jsonl") + " --gold " + tmp.file("c.jsonl"),
                 tmp);
  CHECK(bad.exit_code == 2);
}

TEST_CASE("cli calibrate: grid table and result file") {
  Temp tmp;
  REQUIRE(run("synth --n 10 --seed 9 --out " + tmp.file("c.jsonl"), tmp).exit_code == 0);
  tmp.write("config.json", kConfig);
  tmp.write("grid.json", R"([{"alpha":3,"beta":2,"gamma":1},{"alpha":1,"beta":1,"gamma":1}])");
  auto r = run("calibrate --corpus " + tmp.file("c.jsonl") + " --config " +
                   tmp.file("config.json") + " --grid " + tmp.file("grid.json") + " --out " +
                   tmp.file("cal.json"),
               tmp);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("(best)") != std::string::npos);
  json cal = json::parse(tmp.read("cal.json"));
  CHECK(cal.at("grid").size() == 2);
  CHECK(cal.contains("best_weights"));

  tmp.write("bad_grid.json", "{broken");
  CHECK(run("calibrate --corpus " + tmp.file("c.jsonl") + " --config " + tmp.file("config.json") +
                " --grid " + tmp.file("bad_grid.json") + " --out " + tmp.file("cal2.json"),
            tmp)
            .exit_code == 2);
}

TEST_CASE("cli parse: --weights calibrate grid-searches before aggregating") {
  Temp tmp;
  REQUIRE(run("synth --n 8 --seed 13 --out " + tmp.file("c.jsonl"), tmp).exit_code == 0);
  tmp.write("config.json", kConfig);
  auto r = run("parse --corpus " + tmp.file("c.jsonl") + " --config " + tmp.file("config.json") +
                   " --weights calibrate --out " + tmp.file("pred.jsonl"),
               tmp);
  CHECK(r.exit_code == 0);
  CHECK(count_lines(tmp.read("pred.jsonl")) == 8);
}
