#include "facmon/error.hpp"

#include <array>

namespace facmon {

namespace {

constexpr std::string_view kNames[] = {
#define FACMON_NAME_ENTRY(name) #name,
    FACMON_ERROR_CODES(FACMON_NAME_ENTRY)
#undef FACMON_NAME_ENTRY
};

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  auto idx = static_cast<std::size_t>(code);
  if (idx >= std::size(kNames)) return "INTERNAL";
  return kNames[idx];
}

std::optional<ErrorCode> parse_error_code(std::string_view name) noexcept {
  for (std::size_t i = 0; i < std::size(kNames); ++i) {
    if (kNames[i] == name) return static_cast<ErrorCode>(i);
  }
  return std::nullopt;
}

std::span<const ErrorCode> all_error_codes() noexcept {
  static constexpr ErrorCode codes[] = {
#define FACMON_LIST_ENTRY(name) ErrorCode::name,
      FACMON_ERROR_CODES(FACMON_LIST_ENTRY)
#undef FACMON_LIST_ENTRY
  };
  return codes;
}

}  // namespace facmon
