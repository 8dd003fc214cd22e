#pragma once

#include <json.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hypshadow {

enum class ErrorKind {
  parse,
  dimension,
  domain,
  hypothesis,
  numeric,
  usage,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(ErrorKind::parse, message + " at byte " + std::to_string(offset)), detail_(message), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t offset_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message) : Error(ErrorKind::dimension, message) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error(ErrorKind::domain, message) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message) : Error(ErrorKind::numeric, message) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message) : Error(ErrorKind::usage, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::io, message) {}
};

// An input fails a hypothesis of the shadow construction. `stage` is one of
// smoothness, pointedness, compactness, quasi-concavity, hyperbolicity,
// coverage, and `witness` carries the certificate that shows it.
class HypothesisViolation : public Error {
 public:
  HypothesisViolation(std::string stage, const std::string& message, nlohmann::json witness = {})
      : Error(ErrorKind::hypothesis, message), stage_(std::move(stage)), witness_(std::move(witness)) {}
  const std::string& stage() const noexcept { return stage_; }
  const nlohmann::json& witness() const noexcept { return witness_; }

 private:
  std::string stage_;
  nlohmann::json witness_;
};

inline void require_dims(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) + ", got " +
                         std::to_string(got));
}

}  // namespace hypshadow
