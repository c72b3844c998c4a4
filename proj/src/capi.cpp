#include "parsemble.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "calibrate.hpp"
#include "corpus.hpp"
#include "errors.hpp"
#include "json_repair.hpp"
#include "metrics.hpp"
#include "normalize.hpp"
#include "pipeline.hpp"
#include "schema.hpp"

using nlohmann::json;
using nlohmann::ordered_json;

struct parsemble_ontology {
  parsemble::SkillOntology ontology;
};

struct parsemble_corpus {
  parsemble::Corpus corpus;
};

struct parsemble_panel {
  parsemble::BackendSetup setup;
  parsemble::SkillOntology ontology;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

parsemble_status fail(parsemble_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes + last-error text.
template <typename Fn>
parsemble_status guarded(Fn&& fn) {
  try {
    fn();
    return PARSEMBLE_OK;
  } catch (const parsemble::ParseError& e) {
    return fail(PARSEMBLE_ERR_PARSE, e.what());
  } catch (const parsemble::SchemaError& e) {
    return fail(PARSEMBLE_ERR_SCHEMA, e.what());
  } catch (const parsemble::ConfigError& e) {
    return fail(PARSEMBLE_ERR_CONFIG, e.what());
  } catch (const parsemble::IoError& e) {
    return fail(PARSEMBLE_ERR_IO, e.what());
  } catch (const parsemble::BackendError& e) {
    return fail(PARSEMBLE_ERR_BACKEND, e.what());
  } catch (const std::exception& e) {
    return fail(PARSEMBLE_ERR_INTERNAL, e.what());
  }
}

const parsemble::SkillOntology& ontology_or_builtin(const parsemble_ontology* o) {
  return o != nullptr ? o->ontology : parsemble::SkillOntology::builtin();
}

json parse_json_arg(const char* text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw parsemble::ParseError(std::string("malformed ") + what + ": " + e.what(), e.byte);
  }
}

}  // namespace

extern "C" {

const char* parsemble_version(void) { return "0.1.0"; }

const char* parsemble_last_error(void) { return g_last_error.c_str(); }

void parsemble_string_free(char* s) { std::free(s); }

parsemble_status parsemble_ontology_builtin(parsemble_ontology** out) {
  if (out == nullptr) return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    *out = new parsemble_ontology{parsemble::SkillOntology::builtin()};
  });
}

parsemble_status parsemble_ontology_load(const char* path, parsemble_ontology** out) {
  if (path == nullptr || out == nullptr) {
    return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "path/out is NULL");
  }
  return guarded([&] {
    *out = new parsemble_ontology{parsemble::SkillOntology::load(path)};
  });
}

void parsemble_ontology_free(parsemble_ontology* ontology) { delete ontology; }

parsemble_status parsemble_corpus_generate(uint64_t n, uint64_t seed, const char* options_json,
                                           parsemble_corpus** out) {
  if (out == nullptr) return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    parsemble::GenOptions options;
    if (options_json != nullptr && options_json[0] != '\0') {
      options = parsemble::GenOptions::from_json(parse_json_arg(options_json, "generator options"));
    }
    *out = new parsemble_corpus{parsemble::generate_synthetic(
        static_cast<std::size_t>(n), seed, parsemble::default_professions(), options)};
  });
}

parsemble_status parsemble_corpus_load(const char* path, const parsemble_ontology* ontology,
                                       parsemble_corpus** out) {
  if (path == nullptr || out == nullptr) {
    return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "path/out is NULL");
  }
  return guarded([&] {
    *out = new parsemble_corpus{parsemble::load_corpus(path, ontology_or_builtin(ontology))};
  });
}

parsemble_status parsemble_corpus_save(const parsemble_corpus* corpus, const char* path,
                                       const char* metadata_path) {
  if (corpus == nullptr || path == nullptr) {
    return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "corpus/path is NULL");
  }
  return guarded([&] {
    parsemble::save_corpus(corpus->corpus, path,
                           metadata_path != nullptr ? metadata_path : std::string());
  });
}

parsemble_status parsemble_corpus_split(const parsemble_corpus* corpus, const char* split_json,
                                        parsemble_corpus** train, parsemble_corpus** validation,
                                        parsemble_corpus** test) {
  if (corpus == nullptr || train == nullptr || validation == nullptr || test == nullptr) {
    return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "corpus/out is NULL");
  }
  return guarded([&] {
    parsemble::SplitSpec spec;
    if (split_json != nullptr && split_json[0] != '\0') {
      json j = parse_json_arg(split_json, "split spec");
      if (!j.is_object()) throw parsemble::ConfigError("split spec must be a JSON object");
      if (j.contains("train")) spec.train_fraction = j.at("train").get<double>();
      if (j.contains("validation")) spec.validation_fraction = j.at("validation").get<double>();
      if (j.contains("test")) spec.test_fraction = j.at("test").get<double>();
      if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("stratify")) spec.stratify_by_profession = j.at("stratify").get<bool>();
    }
    parsemble::SplitResult result = parsemble::split_corpus(corpus->corpus, spec);
    *train = new parsemble_corpus{std::move(result.train)};
    *validation = new parsemble_corpus{std::move(result.validation)};
    *test = new parsemble_corpus{std::move(result.test)};
  });
}

uint64_t parsemble_corpus_size(const parsemble_corpus* corpus) {
  return corpus == nullptr ? 0 : corpus->corpus.entries.size();
}

void parsemble_corpus_free(parsemble_corpus* corpus) { delete corpus; }

parsemble_status parsemble_panel_create(const char* config_json,
                                        const parsemble_corpus* gold_source,
                                        const parsemble_ontology* ontology,
                                        parsemble_panel** out) {
  if (config_json == nullptr || out == nullptr) {
    return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "config/out is NULL");
  }
  return guarded([&] {
    const auto& onto = ontology_or_builtin(ontology);
    auto setup = parsemble::build_backends(
        parse_json_arg(config_json, "backend config"),
        gold_source != nullptr ? &gold_source->corpus : nullptr, onto);
    *out = new parsemble_panel{std::move(setup), onto};
  });
}

parsemble_status parsemble_panel_load(const char* config_path,
                                      const parsemble_corpus* gold_source,
                                      const parsemble_ontology* ontology,
                                      parsemble_panel** out) {
  if (config_path == nullptr || out == nullptr) {
    return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "config_path/out is NULL");
  }
  return guarded([&] {
    const auto& onto = ontology_or_builtin(ontology);
    auto setup = parsemble::load_backends(
        config_path, gold_source != nullptr ? &gold_source->corpus : nullptr, onto);
    *out = new parsemble_panel{std::move(setup), onto};
  });
}

void parsemble_panel_free(parsemble_panel* panel) { delete panel; }

parsemble_status parsemble_run_parse(const parsemble_panel* panel,
                                     const parsemble_corpus* corpus, const char* options_json,
                                     char** predictions_jsonl, char** audit_jsonl) {
  if (panel == nullptr || corpus == nullptr || options_json == nullptr ||
      predictions_jsonl == nullptr) {
    return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "panel/corpus/options/out is NULL");
  }
  return guarded([&] {
    json j = parse_json_arg(options_json, "parse options");
    if (!j.is_object()) throw parsemble::ConfigError("parse options must be a JSON object");
    parsemble::ParseOptions options;
    if (!j.contains("weights")) {
      throw parsemble::ConfigError("parse options require 'weights' (object or \"calibrate\")");
    }
    if (j.at("weights").is_string()) {
      if (j.at("weights").get<std::string>() != "calibrate") {
        throw parsemble::ConfigError("'weights' must be an object or the string \"calibrate\"");
      }
      options.calibrate = true;
    } else {
      options.weights = parsemble::WeightVector::from_json(j.at("weights"));
    }
    if (j.contains("parallelism")) options.parallelism = j.at("parallelism").get<int>();
    if (options.parallelism < 1) throw parsemble::ConfigError("parallelism must be >= 1");
    if (j.contains("audit")) options.audit = j.at("audit").get<bool>();
    if (j.contains("rs_weights")) {
      options.rs_weights = parsemble::RSWeights::from_json(j.at("rs_weights"));
    }
    parsemble::ParseOutput result =
        parsemble::run_parse(corpus->corpus, panel->setup, options, panel->ontology);
    *predictions_jsonl = dup_string(result.predictions_jsonl);
    if (audit_jsonl != nullptr) *audit_jsonl = dup_string(result.audit_jsonl);
  });
}

parsemble_status parsemble_evaluate(const char* predictions_jsonl, const parsemble_corpus* gold,
                                    const parsemble_ontology* ontology,
                                    const char* rs_weights_json, char** report_json) {
  if (predictions_jsonl == nullptr || gold == nullptr || report_json == nullptr) {
    return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "predictions/gold/out is NULL");
  }
  return guarded([&] {
    parsemble::RSWeights rs = parsemble::RSWeights::defaults();
    if (rs_weights_json != nullptr && rs_weights_json[0] != '\0') {
      rs = parsemble::RSWeights::from_json(parse_json_arg(rs_weights_json, "RS weights"));
    }
    auto predictions =
        parsemble::parse_predictions_jsonl(predictions_jsonl, ontology_or_builtin(ontology));
    parsemble::MetricReport report =
        parsemble::evaluate_predictions(predictions, gold->corpus, rs);
    *report_json = dup_string(parsemble::report_to_json(report).dump());
  });
}

parsemble_status parsemble_report_table(const char* labeled_reports_json, char** table_text) {
  if (labeled_reports_json == nullptr || table_text == nullptr) {
    return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "reports/out is NULL");
  }
  return guarded([&] {
    json j = parse_json_arg(labeled_reports_json, "labeled reports");
    if (!j.is_array() || j.empty()) {
      throw parsemble::ConfigError("labeled reports must be a non-empty array");
    }
    std::vector<std::pair<std::string, parsemble::MetricReport>> runs;
    for (const auto& item : j) {
      runs.emplace_back(item.at("label").get<std::string>(),
                        parsemble::report_from_json(item.at("report")));
    }
    *table_text = dup_string(parsemble::render_report_table(runs));
  });
}

parsemble_status parsemble_calibrate(const parsemble_panel* panel,
                                     const parsemble_corpus* validation,
                                     const char* options_json, char** result_json,
                                     char** table_text) {
  if (panel == nullptr || validation == nullptr || result_json == nullptr) {
    return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "panel/validation/out is NULL");
  }
  return guarded([&] {
    parsemble::CalibrateOptions options;
    if (options_json != nullptr && options_json[0] != '\0') {
      json j = parse_json_arg(options_json, "calibrate options");
      if (!j.is_object()) throw parsemble::ConfigError("calibrate options must be a JSON object");
      if (j.contains("grid")) {
        if (!j.at("grid").is_array()) {
          throw parsemble::ConfigError("'grid' must be an array of weight objects");
        }
        for (const auto& point : j.at("grid")) {
          options.grid.push_back(parsemble::WeightVector::from_json(point));
        }
      }
      if (j.contains("rs_weights")) {
        options.rs_weights = parsemble::RSWeights::from_json(j.at("rs_weights"));
      }
      if (j.contains("parallelism")) options.parallelism = j.at("parallelism").get<int>();
      if (options.parallelism < 1) throw parsemble::ConfigError("parallelism must be >= 1");
    }
    parsemble::CalibrationResult result =
        parsemble::run_calibration(validation->corpus, panel->setup, options, panel->ontology);
    *result_json = dup_string(parsemble::calibration_result_to_json(result).dump());
    if (table_text != nullptr) {
      *table_text = dup_string(parsemble::render_grid_table(result));
    }
  });
}

parsemble_status parsemble_normalize_resume(const char* resume_json,
                                            const parsemble_ontology* ontology,
                                            char** normalized_json) {
  if (resume_json == nullptr || normalized_json == nullptr) {
    return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "resume/out is NULL");
  }
  return guarded([&] {
    parsemble::ParsedResume r = parsemble::parse_resume_json(resume_json);
    r = parsemble::normalize_fields(r, ontology_or_builtin(ontology));
    *normalized_json = dup_string(parsemble::serialize_resume(r));
  });
}

parsemble_status parsemble_repair_json(const char* raw, char** repaired) {
  if (raw == nullptr || repaired == nullptr) {
    return fail(PARSEMBLE_ERR_INVALID_ARGUMENT, "raw/out is NULL");
  }
  return guarded([&] { *repaired = dup_string(parsemble::repair_json(raw)); });
}

}  // extern "C"
