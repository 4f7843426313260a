#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace enumkit {

/// Simulated wall clock: seconds since the Unix epoch. Always passed in
/// explicitly; nothing in the library reads ambient time.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerDay = 86400;

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_iso8601(Timestamp t);
Timestamp parse_iso8601(std::string_view text);

} // namespace enumkit
