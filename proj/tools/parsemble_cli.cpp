// Command-line front end for the parsemble pipeline. Everything goes through
// the public C API in parsemble.h; this file owns flags, files, and exit
// codes only.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parsemble.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

constexpr std::uint64_t kDefaultSeed = 42;

int exit_code_for(parsemble_status status) {
  switch (status) {
    case PARSEMBLE_OK:
      return kExitOk;
    case PARSEMBLE_ERR_PARSE:
    case PARSEMBLE_ERR_SCHEMA:
    case PARSEMBLE_ERR_CONFIG:
    case PARSEMBLE_ERR_INVALID_ARGUMENT:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

int report_error(parsemble_status status) {
  std::cerr << "error: " << parsemble_last_error() << "\n";
  return exit_code_for(status);
}

struct StringDeleter {
  void operator()(char* s) const { parsemble_string_free(s); }
};
using ApiString = std::unique_ptr<char, StringDeleter>;

struct OntologyDeleter {
  void operator()(parsemble_ontology* o) const { parsemble_ontology_free(o); }
};
struct CorpusDeleter {
  void operator()(parsemble_corpus* c) const { parsemble_corpus_free(c); }
};
struct PanelDeleter {
  void operator()(parsemble_panel* p) const { parsemble_panel_free(p); }
};

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return true;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string basename_of(const std::string& path) {
  std::size_t pos = path.find_last_of('/');
  return pos == std::string::npos ? path : path.substr(pos + 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parsemble — ensemble resume parsing pipeline"};
  app.set_version_flag("--version", parsemble_version());
  app.require_subcommand(1);

  // ---- synth ----
  std::uint64_t synth_n = 0;
  std::uint64_t synth_seed = kDefaultSeed;
  std::string synth_out, synth_meta;
  double date_variation = 1.0, synonym_rate = 0.35, omission_rate = 0.05, edge_rate = 0.08;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic resume corpus (JSONL)");
  synth->add_option("--n", synth_n, "Number of resumes")->required()->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "RNG seed (default 42)");
  synth->add_option("--out", synth_out, "Output JSONL path")->required();
  synth->add_option("--meta", synth_meta,
                    "Metadata sidecar path (default: <out>.meta.json)");
  synth->add_option("--date-variation", date_variation, "P(non-ISO date rendering)")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--synonym-rate", synonym_rate, "P(skill rendered as a synonym)")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--omission-rate", omission_rate, "P(optional field omitted)")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--edge-rate", edge_rate, "P(edge-case resume)")
      ->check(CLI::Range(0.0, 1.0));

  // ---- parse ----
  std::string parse_corpus, parse_config, parse_weights, parse_out, parse_audit,
      parse_ontology, parse_rs_weights;
  int parse_parallelism = 1;
  auto* parse = app.add_subcommand("parse", "Run the extraction panel and aggregate");
  parse->add_option("--corpus", parse_corpus, "Corpus JSONL")->required();
  parse->add_option("--config", parse_config, "Backend config JSON")->required();
  parse->add_option("--weights", parse_weights,
                    "Weights JSON file, or 'calibrate' to grid-search on this corpus")
      ->required();
  parse->add_option("--out", parse_out, "Predictions JSONL output path")->required();
  parse->add_option("--audit", parse_audit, "Write per-field vote audit JSONL here");
  parse->add_option("--ontology", parse_ontology, "Skill ontology JSON (default: built-in)");
  parse->add_option("--rs-weights", parse_rs_weights, "RS weights JSON (calibration objective)");
  parse->add_option("--parallelism", parse_parallelism, "Worker threads (default 1)")
      ->check(CLI::PositiveNumber);

  // ---- evaluate ----
  std::vector<std::string> eval_preds;
  std::string eval_gold, eval_rs_weights, eval_format = "table", eval_ontology;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold resumes");
  evaluate->add_option("--pred", eval_preds, "Predictions JSONL (repeatable)")->required();
  evaluate->add_option("--gold", eval_gold, "Gold corpus JSONL")->required();
  evaluate->add_option("--rs-weights", eval_rs_weights, "RS weights JSON file");
  evaluate->add_option("--format", eval_format, "Output format: json or table")
      ->check(CLI::IsMember({"json", "table"}));
  evaluate->add_option("--ontology", eval_ontology, "Skill ontology JSON (default: built-in)");

  // ---- calibrate ----
  std::string cal_corpus, cal_config, cal_grid, cal_out, cal_ontology, cal_rs_weights;
  int cal_parallelism = 1;
  auto* calibrate = app.add_subcommand("calibrate", "Grid-search voting weights on validation data");
  calibrate->add_option("--corpus", cal_corpus, "Validation corpus JSONL")->required();
  calibrate->add_option("--config", cal_config, "Backend config JSON")->required();
  calibrate->add_option("--grid", cal_grid,
                        "Grid JSON file (array of weight objects; default {1,2,3}^k)");
  calibrate->add_option("--out", cal_out, "Calibration result JSON output path")->required();
  calibrate->add_option("--ontology", cal_ontology, "Skill ontology JSON (default: built-in)");
  calibrate->add_option("--rs-weights", cal_rs_weights, "RS weights JSON file");
  calibrate->add_option("--parallelism", cal_parallelism, "Worker threads (default 1)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << parsemble_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  auto load_ontology = [&](const std::string& path,
                           std::unique_ptr<parsemble_ontology, OntologyDeleter>& out) {
    parsemble_ontology* raw = nullptr;
    parsemble_status s = path.empty() ? parsemble_ontology_builtin(&raw)
                                      : parsemble_ontology_load(path.c_str(), &raw);
    out.reset(raw);
    return s;
  };

  if (synth->parsed()) {
    char options[256];
    std::snprintf(options, sizeof(options),
                  "{\"date_format_variation\":%g,\"skill_synonym_rate\":%g,"
                  "\"field_omission_rate\":%g,\"edge_case_rate\":%g}",
                  date_variation, synonym_rate, omission_rate, edge_rate);
    parsemble_corpus* corpus = nullptr;
    parsemble_status s = parsemble_corpus_generate(synth_n, synth_seed, options, &corpus);
    if (s != PARSEMBLE_OK) return report_error(s);
    std::unique_ptr<parsemble_corpus, CorpusDeleter> guard(corpus);
    const std::string meta = synth_meta.empty() ? synth_out + ".meta.json" : synth_meta;
    s = parsemble_corpus_save(corpus, synth_out.c_str(), meta.c_str());
    if (s != PARSEMBLE_OK) return report_error(s);
    std::cerr << "wrote " << synth_n << " resumes to " << synth_out << " (metadata: " << meta
              << ")\n";
    return kExitOk;
  }

  if (parse->parsed()) {
    std::unique_ptr<parsemble_ontology, OntologyDeleter> ontology;
    parsemble_status s = load_ontology(parse_ontology, ontology);
    if (s != PARSEMBLE_OK) return report_error(s);

    parsemble_corpus* corpus = nullptr;
    s = parsemble_corpus_load(parse_corpus.c_str(), ontology.get(), &corpus);
    if (s != PARSEMBLE_OK) return report_error(s);
    std::unique_ptr<parsemble_corpus, CorpusDeleter> corpus_guard(corpus);

    parsemble_panel* panel = nullptr;
    s = parsemble_panel_load(parse_config.c_str(), corpus, ontology.get(), &panel);
    if (s != PARSEMBLE_OK) return report_error(s);
    std::unique_ptr<parsemble_panel, PanelDeleter> panel_guard(panel);

    std::string weights_value;
    if (parse_weights == "calibrate") {
      weights_value = "\"calibrate\"";
    } else {
      if (!read_file(parse_weights, weights_value)) {
        std::cerr << "error: cannot read weights file: " << parse_weights << "\n";
        return kExitUsage;
      }
    }
    std::string rs_weights_value;
    if (!parse_rs_weights.empty() && !read_file(parse_rs_weights, rs_weights_value)) {
      std::cerr << "error: cannot read RS weights file: " << parse_rs_weights << "\n";
      return kExitUsage;
    }

    std::ostringstream options;
    options << "{\"weights\":" << weights_value << ",\"parallelism\":" << parse_parallelism
            << ",\"audit\":" << (parse_audit.empty() ? "false" : "true");
    if (!rs_weights_value.empty()) options << ",\"rs_weights\":" << rs_weights_value;
    options << "}";

    char* predictions = nullptr;
    char* audit = nullptr;
    s = parsemble_run_parse(panel, corpus, options.str().c_str(), &predictions, &audit);
    if (s != PARSEMBLE_OK) return report_error(s);
    ApiString predictions_guard(predictions), audit_guard(audit);

    if (!write_file(parse_out, predictions)) {
      std::cerr << "error: cannot write predictions to " << parse_out << "\n";
      return kExitRuntime;
    }
    if (!parse_audit.empty() && !write_file(parse_audit, audit)) {
      std::cerr << "error: cannot write audit trail to " << parse_audit << "\n";
      return kExitRuntime;
    }

    // Success requires at least one aggregated document: count prediction lines.
    std::istringstream lines(predictions);
    std::string line;
    std::size_t n_success = 0, n_total = 0;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      ++n_total;
      if (line.find("\"prediction\"") != std::string::npos) ++n_success;
    }
    std::cerr << "aggregated " << n_success << "/" << n_total << " documents -> " << parse_out
              << "\n";
    return n_success > 0 ? kExitOk : kExitRuntime;
  }

  if (evaluate->parsed()) {
    std::unique_ptr<parsemble_ontology, OntologyDeleter> ontology;
    parsemble_status s = load_ontology(eval_ontology, ontology);
    if (s != PARSEMBLE_OK) return report_error(s);

    parsemble_corpus* gold = nullptr;
    s = parsemble_corpus_load(eval_gold.c_str(), ontology.get(), &gold);
    if (s != PARSEMBLE_OK) return report_error(s);
    std::unique_ptr<parsemble_corpus, CorpusDeleter> gold_guard(gold);

    std::string rs_weights_value;
    if (!eval_rs_weights.empty() && !read_file(eval_rs_weights, rs_weights_value)) {
      std::cerr << "error: cannot read RS weights file: " << eval_rs_weights << "\n";
      return kExitUsage;
    }

    std::vector<std::pair<std::string, std::string>> reports;  // label, report json
    for (const auto& pred_path : eval_preds) {
      std::string content;
      if (!read_file(pred_path, content)) {
        std::cerr << "error: cannot read predictions file: " << pred_path << "\n";
        return kExitUsage;
      }
      char* report = nullptr;
      s = parsemble_evaluate(content.c_str(), gold, ontology.get(),
                             rs_weights_value.empty() ? nullptr : rs_weights_value.c_str(),
                             &report);
      if (s != PARSEMBLE_OK) return report_error(s);
      ApiString guard(report);
      reports.emplace_back(basename_of(pred_path), report);
    }

    if (eval_format == "json") {
      if (reports.size() == 1) {
        std::cout << reports[0].second << "\n";
      } else {
        std::cout << "[";
        for (std::size_t i = 0; i < reports.size(); ++i) {
          if (i) std::cout << ",";
          std::cout << "{\"label\":\"" << json_escape(reports[i].first)
                    << "\",\"report\":" << reports[i].second << "}";
        }
        std::cout << "]\n";
      }
      return kExitOk;
    }

    std::ostringstream labeled;
    labeled << "[";
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (i) labeled << ",";
      labeled << "{\"label\":\"" << json_escape(reports[i].first)
              << "\",\"report\":" << reports[i].second << "}";
    }
    labeled << "]";
    char* table = nullptr;
    s = parsemble_report_table(labeled.str().c_str(), &table);
    if (s != PARSEMBLE_OK) return report_error(s);
    ApiString table_guard(table);
    std::cout << table;
    return kExitOk;
  }

  if (calibrate->parsed()) {
    std::unique_ptr<parsemble_ontology, OntologyDeleter> ontology;
    parsemble_status s = load_ontology(cal_ontology, ontology);
    if (s != PARSEMBLE_OK) return report_error(s);

    parsemble_corpus* corpus = nullptr;
    s = parsemble_corpus_load(cal_corpus.c_str(), ontology.get(), &corpus);
    if (s != PARSEMBLE_OK) return report_error(s);
    std::unique_ptr<parsemble_corpus, CorpusDeleter> corpus_guard(corpus);

    parsemble_panel* panel = nullptr;
    s = parsemble_panel_load(cal_config.c_str(), corpus, ontology.get(), &panel);
    if (s != PARSEMBLE_OK) return report_error(s);
    std::unique_ptr<parsemble_panel, PanelDeleter> panel_guard(panel);

    std::ostringstream options;
    options << "{\"parallelism\":" << cal_parallelism;
    if (!cal_grid.empty()) {
      std::string grid_value;
      if (!read_file(cal_grid, grid_value)) {
        std::cerr << "error: cannot read grid file: " << cal_grid << "\n";
        return kExitUsage;
      }
      options << ",\"grid\":" << grid_value;
    }
    if (!cal_rs_weights.empty()) {
      std::string rs_value;
      if (!read_file(cal_rs_weights, rs_value)) {
        std::cerr << "error: cannot read RS weights file: " << cal_rs_weights << "\n";
        return kExitUsage;
      }
      options << ",\"rs_weights\":" << rs_value;
    }
    options << "}";

    char* result = nullptr;
    char* table = nullptr;
    s = parsemble_calibrate(panel, corpus, options.str().c_str(), &result, &table);
    if (s != PARSEMBLE_OK) return report_error(s);
    ApiString result_guard(result), table_guard(table);

    if (!write_file(cal_out, std::string(result) + "\n")) {
      std::cerr << "error: cannot write calibration result to " << cal_out << "\n";
      return kExitRuntime;
    }
    std::cout << table;
    return kExitOk;
  }

  return kExitUsage;
}
