#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace facmon {

// Names are part of the wire format (ApiError.code); keep them stable.
#define FACMON_ERROR_CODES(X)  \
  X(EMPTY_BARCODE)             \
  X(INVALID_CHARS)             \
  X(TOO_LONG)                  \
  X(ILLEGAL_TRANSITION)        \
  X(DUPLICATE_CODE)            \
  X(UNKNOWN_PARENT)            \
  X(ALREADY_SEEDED)            \
  X(DUPLICATE_BARCODE)         \
  X(UNKNOWN_REFERENCE)         \
  X(INVALID_WARRANTY_RANGE)    \
  X(UNKNOWN_ITEM)              \
  X(EMPTY_PAYLOAD)             \
  X(UNSUPPORTED_MEDIA_TYPE)    \
  X(UNKNOWN_LOCATION)          \
  X(SAME_LOCATION)             \
  X(TERMINAL_ITEM)             \
  X(NOT_DAMAGED)               \
  X(REPAIR_ALREADY_OPEN)       \
  X(UNKNOWN_REPAIR)            \
  X(ALREADY_COMPLETED)         \
  X(INVALID_DATE_ORDER)        \
  X(EMPTY_FINDING)             \
  X(UNKNOWN_RECORD)            \
  X(WRONG_STATE)               \
  X(INVALID_PERIOD)            \
  X(DUPLICATE_USERNAME)        \
  X(INVALID_USERNAME)          \
  X(WEAK_PASSWORD)             \
  X(MISSING_WORK_UNIT)         \
  X(UNKNOWN_USER)              \
  X(INVALID_CREDENTIALS)       \
  X(ACCOUNT_INACTIVE)          \
  X(UNAUTHENTICATED)           \
  X(FORBIDDEN)                 \
  X(CONFLICT)                  \
  X(CONSTRAINT_VIOLATION)      \
  X(UNKNOWN_BLOB)              \
  X(INVALID_RANGE)             \
  X(INVALID_ARGUMENT)          \
  X(INVALID_REQUEST)           \
  X(UNKNOWN_ROUTE)             \
  X(HEADER_MISMATCH)           \
  X(PAYLOAD_TOO_LARGE)         \
  X(CONFIG_ERROR)              \
  X(BIND_FAILURE)              \
  X(DATA_DIR_UNWRITABLE)       \
  X(DATA_DIR_LOCKED)           \
  X(CORRUPT_STORE)             \
  X(INTERNAL)

enum class ErrorCode {
#define FACMON_ENUM_ENTRY(name) name,
  FACMON_ERROR_CODES(FACMON_ENUM_ENTRY)
#undef FACMON_ENUM_ENTRY
};

std::string_view to_string(ErrorCode code) noexcept;
std::optional<ErrorCode> parse_error_code(std::string_view name) noexcept;

/// Every error code, in declaration order.
std::span<const ErrorCode> all_error_codes() noexcept;

/// Domain failure. `code` is machine-readable, `what()` is the human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  explicit Error(ErrorCode code)
      : std::runtime_error(std::string(to_string(code))), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace facmon
