#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace parsemble {

// Base class for all library errors. Every error carries a stable category
// used by the C API to map onto status codes.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string message) : std::runtime_error(std::move(message)) {}
};

// Malformed input text (JSON, JSONL). Carries the byte offset when known.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t byte_offset = 0)
      : Error(std::move(message)), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Structurally valid JSON that does not fit the resume schema. Names the field.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, std::string message)
      : Error(std::move(message)), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Invalid configuration: bad weights, unweighted model, malformed config file,
// invalid ontology, out-of-range options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Filesystem problems.
class IoError : public Error {
 public:
  using Error::Error;
};

// Extractor backend failures.
class BackendError : public Error {
 public:
  enum class Kind { kUnavailable, kExtractionFailed };

  BackendError(Kind kind, std::string message, std::string raw_response = {})
      : Error(std::move(message)), kind_(kind), raw_response_(std::move(raw_response)) {}

  Kind kind() const { return kind_; }
  const std::string& raw_response() const { return raw_response_; }

 private:
  Kind kind_;
  std::string raw_response_;
};

}  // namespace parsemble
