#pragma once

#include <stdexcept>
#include <string>

namespace forge {

// Process exit codes shared by the CLI and the pipeline driver.
enum class ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kStageFailure = 3,
  kDataQuality = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ExitCode::kConfigError, what) {}
};

class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(ExitCode::kStageFailure, stage + ": " + what),
        stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class DataQualityError : public Error {
 public:
  explicit DataQualityError(const std::string& what)
      : Error(ExitCode::kDataQuality, what) {}
};

}  // namespace forge
