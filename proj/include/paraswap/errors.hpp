#pragma once

#include <stdexcept>
#include <string>

namespace paraswap {

/// Base class for every error raised by the library. `code()` is a stable
/// machine-readable tag used by the CLI in its error report.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain_error", what) {}
};

class NoSignChange : public Error {
 public:
  explicit NoSignChange(const std::string& what) : Error("no_sign_change", what) {}
};

class DegeneracyError : public Error {
 public:
  explicit DegeneracyError(const std::string& what) : Error("label_degeneracy", what) {}
};

class IntegrationError : public Error {
 public:
  explicit IntegrationError(const std::string& what) : Error("integration_error", what) {}
};

class RankDeficient : public Error {
 public:
  explicit RankDeficient(const std::string& what) : Error("rank_deficient", what) {}
};

class FitError : public Error {
 public:
  explicit FitError(const std::string& what) : Error("fit_error", what) {}
};

class CalibrationError : public Error {
 public:
  explicit CalibrationError(const std::string& what) : Error("calibration_error", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};

}  // namespace paraswap
