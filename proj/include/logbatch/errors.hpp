#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace logbatch {

/// Invalid or unknown configuration value. `key()` names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Input file does not have the expected shape (missing column, bad row).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The LLM backend could not produce a reply after all retries.
class BackendUnavailable : public std::runtime_error {
 public:
  BackendUnavailable(const std::string& what, int attempts)
      : std::runtime_error(what), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

/// Ground truth does not cover every evaluated record.
class CoverageError : public std::runtime_error {
 public:
  CoverageError(const std::string& what, std::vector<std::size_t> missing)
      : std::runtime_error(what), missing_(std::move(missing)) {}
  const std::vector<std::size_t>& missing_line_ids() const noexcept { return missing_; }

 private:
  std::vector<std::size_t> missing_;
};

}  // namespace logbatch
