#pragma once

#include <stdexcept>
#include <string>

namespace dtseq {

enum class ErrorKind {
  EmptyInput,
  InvalidInput,
  ConfigError,
  IoError,
  SingularModel,
  EmptyGraph,
  NotInVocabulary,
  EmptyTrajectory,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of a numerical procedure rather than bad input.
  bool numerical() const noexcept { return kind_ == ErrorKind::SingularModel; }

 private:
  ErrorKind kind_;
};

}  // namespace dtseq
