#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dtseq/model.hpp"

namespace dtseq {

enum class LogFormat { Csv, Jsonl };

/// Picks JSONL for ".jsonl"/".ndjson" extensions, CSV otherwise.
LogFormat format_from_path(const std::filesystem::path& path);

struct IngestReport {
  std::int64_t rows_read = 0;
  std::int64_t rows_rejected = 0;
  std::int64_t users = 0;
  std::map<std::string, std::int64_t> platform_counts;
  std::optional<Instant> min_time;
  std::optional<Instant> max_time;

  // Sequence length statistics, filled by summarize().
  double length_mean = 0.0;
  std::int64_t length_max = 0;
  double length_p25 = 0.0;
  double length_p50 = 0.0;
  double length_p75 = 0.0;
  double length_p90 = 0.0;
  /// Number of users per count of distinct platforms.
  std::map<int, std::int64_t> multiplicity;

  std::int64_t accepted() const { return rows_read - rows_rejected; }
};

struct IngestResult {
  std::vector<UserSequence> sequences;
  IngestReport report;
};

/// Parses an event log. Bad rows are counted and skipped; an unreadable file
/// throws IoError. CSV needs a header naming user_id, timestamp, platform,
/// activity and (optionally) content, in any column order.
IngestResult read_events(const std::filesystem::path& path, LogFormat format);
IngestResult read_events(std::istream& in, LogFormat format);

/// Descriptive statistics over already-built sequences. rows_read counts
/// events; nothing is rejected.
IngestReport summarize(std::span<const UserSequence> sequences);

/// Writes the five-column schema, users in the given order.
void write_events_csv(std::ostream& out, std::span<const UserSequence> sequences);
void write_events_jsonl(std::ostream& out, std::span<const UserSequence> sequences);

}  // namespace dtseq
