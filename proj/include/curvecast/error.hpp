#ifndef CURVECAST_ERROR_HPP
#define CURVECAST_ERROR_HPP

#include <stdexcept>
#include <string>

namespace curvecast {

enum class ErrorCode {
  MalformedSeries,
  ZeroTotal,
  BadGranularity,
  MalformedCurve,
  GranularityMismatch,
  BadPrefix,
  EmptyInput,
  EmptyModel,
  UnknownCluster,
  BadTotal,
  BadTolerance,
  Complete,
  MalformedActual,
  NoActuals,
  BadParams,
  DuplicateProject,
  BadDuration,
  ParseError,
  UnsupportedVersion,
};

const char* to_string(ErrorCode code);

/// Raised for invalid inputs: bad files, bad flags, violated preconditions.
/// The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const { return code_; }

  /// Message without the code prefix, for rewrapping with more context.
  const std::string& detail() const { return detail_; }

private:
  ErrorCode code_;
  std::string detail_;
};

/// Raised when a computed result violates one of the library's own
/// invariants. The CLI maps these to exit code 3.
class InternalError : public std::logic_error {
public:
  explicit InternalError(const std::string& message)
      : std::logic_error("internal invariant violation: " + message) {}
};

}  // namespace curvecast

#endif
