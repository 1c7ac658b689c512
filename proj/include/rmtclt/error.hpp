#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rmtclt {

enum class ErrorCode {
  InvalidSpec,
  InvalidArgument,
  UnsupportedAspect,
  UnsupportedDistribution,
  Unsupported,
  Domain,
  EigensolverFailure,
  Accuracy,
  NotInHs,
  DegenerateSample,
  Io,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec: return "invalid-spec";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::UnsupportedAspect: return "unsupported-aspect";
    case ErrorCode::UnsupportedDistribution: return "unsupported-distribution";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::EigensolverFailure: return "eigensolver-failure";
    case ErrorCode::Accuracy: return "accuracy";
    case ErrorCode::NotInHs: return "not-in-hs";
    case ErrorCode::DegenerateSample: return "degenerate-sample";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

/// Base class of every error raised by the library. The code lets callers
/// (the CLI in particular) map failures to exit statuses without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures of the numerics rather than of the inputs.
  bool is_numeric() const noexcept {
    return code_ == ErrorCode::EigensolverFailure || code_ == ErrorCode::Accuracy ||
           code_ == ErrorCode::DegenerateSample;
  }

 private:
  ErrorCode code_;
};

/// Raised when the QL iteration does not converge; carries what is needed to
/// regenerate the offending matrix.
class EigensolverFailure : public Error {
 public:
  EigensolverFailure(const std::string& what, std::uint64_t seed, std::int64_t replicate)
      : Error(ErrorCode::EigensolverFailure,
              what + " (seed=" + std::to_string(seed) + ", replicate=" + std::to_string(replicate) + ")"),
        seed_(seed),
        replicate_(replicate) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::int64_t replicate() const noexcept { return replicate_; }

 private:
  std::uint64_t seed_;
  std::int64_t replicate_;
};

/// Raised when a quadrature does not meet its tolerance. The best estimate
/// reached is kept so callers may still report it.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double estimate, double achieved_error)
      : Error(ErrorCode::Accuracy, what + " (estimate=" + std::to_string(estimate) +
                                       ", error=" + std::to_string(achieved_error) + ")"),
        estimate_(estimate),
        achieved_error_(achieved_error) {}

  double estimate() const noexcept { return estimate_; }
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double estimate_;
  double achieved_error_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace rmtclt
