#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace dtseq {

using Instant = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

/// Parses "2024-05-01T08:01:23Z", "2024-05-01 08:01:23", an optional
/// "+hh:mm"/"-hh:mm" offset, a bare date, or integer epoch seconds.
/// Returns nullopt on anything malformed.
std::optional<Instant> parse_instant(std::string_view text);

/// ISO-8601 UTC with a trailing Z.
std::string format_instant(Instant t);
std::string format_date(Date d);

inline Date utc_date(Instant t) { return std::chrono::floor<std::chrono::days>(t); }

inline Instant from_epoch(std::int64_t s) { return Instant{std::chrono::seconds{s}}; }
inline std::int64_t to_epoch(Instant t) { return t.time_since_epoch().count(); }

}  // namespace dtseq
