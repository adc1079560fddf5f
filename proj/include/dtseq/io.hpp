#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dtseq {

/// Incremental RFC 4180 reader: quoted fields, doubled quotes, embedded
/// newlines, CRLF or LF line ends.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  /// `ok` is set false when a quoted field is left unterminated.
  bool next(std::vector<std::string>& fields, bool& ok);

 private:
  std::istream& in_;
};

/// Quotes a field only when it contains a comma, quote or line break.
std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal form that round-trips.
std::string fmt_double(double v);

/// Writes through a temporary sibling file and renames it into place.
/// Throws IoError on failure.
void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

}  // namespace dtseq
