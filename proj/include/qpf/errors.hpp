#pragma once

#include <stdexcept>
#include <string>

namespace qpf {

// Base for everything thrown by the library. Callers that only want a
// pass/fail can catch this; tests usually catch the concrete type.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainExit final : Error { using Error::Error; };
struct InverseOutOfRange final : Error { using Error::Error; };
struct NotInvariant final : Error { using Error::Error; };
struct NoBasinBoundary final : Error { using Error::Error; };
struct GridMismatch final : Error { using Error::Error; };
struct NoValidL final : Error { using Error::Error; };
struct NotAdmissible final : Error { using Error::Error; };
struct NotMonotone final : Error { using Error::Error; };
struct TargetUnreachable final : Error { using Error::Error; };
struct NoCrossing final : Error { using Error::Error; };
struct SolveFailed final : Error { using Error::Error; };
struct EBelowThreshold final : Error { using Error::Error; };
struct ChainTooShort final : Error { using Error::Error; };
struct Inconclusive final : Error { using Error::Error; };
struct TooManyPoints final : Error { using Error::Error; };
struct ConfigError final : Error { using Error::Error; };

}  // namespace qpf
