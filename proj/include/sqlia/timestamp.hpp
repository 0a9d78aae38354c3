#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace sqlia {

using Timestamp = std::chrono::sys_seconds;
using Clock = std::function<Timestamp()>;

Timestamp utc_now();

// "2024-01-01T00:00:00Z"
std::string format_utc(Timestamp t);
// Accepts exactly the format produced by format_utc.
std::optional<Timestamp> parse_utc(std::string_view text);

}  // namespace sqlia
