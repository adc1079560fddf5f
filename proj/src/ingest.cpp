#include "dtseq/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dtseq/error.hpp"
#include "dtseq/io.hpp"
#include "dtseq/stats.hpp"

namespace dtseq {

namespace {

struct RowParser {
  std::vector<Event> events;
  IngestReport report;

  void accept(Event e) {
    if (e.user_id.empty() || (e.platform.name().empty() && e.activity.empty())) {
      ++report.rows_rejected;
      return;
    }
    ++report.platform_counts[e.platform.name()];
    if (!report.min_time || e.timestamp < *report.min_time) report.min_time = e.timestamp;
    if (!report.max_time || e.timestamp > *report.max_time) report.max_time = e.timestamp;
    events.push_back(std::move(e));
  }

  IngestResult finish() {
    IngestResult out;
    out.sequences = group_by_user(std::move(events));
    out.report = report;
    out.report.users = static_cast<std::int64_t>(out.sequences.size());
    return out;
  }
};

void read_csv(std::istream& in, RowParser& parser) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  bool ok = true;
  if (!reader.next(fields, ok)) return;
  int col_user = -1, col_time = -1, col_platform = -1, col_activity = -1, col_content = -1;
  for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
    std::string name = fields[static_cast<std::size_t>(i)];
    if (i == 0 && name.rfind("\xEF\xBB\xBF", 0) == 0) name.erase(0, 3);
    if (name == "user_id") col_user = i;
    else if (name == "timestamp") col_time = i;
    else if (name == "platform") col_platform = i;
    else if (name == "activity") col_activity = i;
    else if (name == "content") col_content = i;
  }
  if (col_user < 0 || col_time < 0 || col_platform < 0 || col_activity < 0)
    throw Error(ErrorKind::IoError, "CSV header must name user_id, timestamp, platform, activity");
  const int needed = std::max({col_user, col_time, col_platform, col_activity});

  while (reader.next(fields, ok)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    ++parser.report.rows_read;
    if (!ok || static_cast<int>(fields.size()) <= needed) {
      ++parser.report.rows_rejected;
      continue;
    }
    auto at = [&](int c) -> const std::string& { return fields[static_cast<std::size_t>(c)]; };
    auto ts = parse_instant(at(col_time));
    if (!ts) {
      ++parser.report.rows_rejected;
      continue;
    }
    Event e;
    e.user_id = at(col_user);
    e.timestamp = *ts;
    e.platform = at(col_platform).empty() ? Platform::parse("") : Platform::parse(at(col_platform));
    e.activity = at(col_activity);
    if (col_content >= 0 && col_content < static_cast<int>(fields.size()) && !at(col_content).empty())
      e.content = at(col_content);
    parser.accept(std::move(e));
  }
}

std::optional<std::string> json_string(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  return std::nullopt;
}

void read_jsonl(std::istream& in, RowParser& parser) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++parser.report.rows_read;
    auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      ++parser.report.rows_rejected;
      continue;
    }
    auto user = json_string(obj, "user_id");
    auto time = json_string(obj, "timestamp");
    auto platform = json_string(obj, "platform");
    auto activity = json_string(obj, "activity");
    std::optional<Instant> ts = time ? parse_instant(*time) : std::nullopt;
    if (!user || !ts || !platform || !activity) {
      ++parser.report.rows_rejected;
      continue;
    }
    Event e{*user, *ts, Platform::parse(*platform), *activity, json_string(obj, "content")};
    if (e.content && e.content->empty()) e.content.reset();
    parser.accept(std::move(e));
  }
}

}  // namespace

LogFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".ndjson") ? LogFormat::Jsonl : LogFormat::Csv;
}

IngestResult read_events(std::istream& in, LogFormat format) {
  RowParser parser;
  if (format == LogFormat::Csv) read_csv(in, parser);
  else read_jsonl(in, parser);
  return parser.finish();
}

IngestResult read_events(const std::filesystem::path& path, LogFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  return read_events(in, format);
}

IngestReport summarize(std::span<const UserSequence> sequences) {
  IngestReport r;
  r.users = static_cast<std::int64_t>(sequences.size());
  std::vector<double> lengths;
  lengths.reserve(sequences.size());
  for (const auto& s : sequences) {
    lengths.push_back(static_cast<double>(s.size()));
    r.rows_read += static_cast<std::int64_t>(s.size());
    r.length_max = std::max<std::int64_t>(r.length_max, static_cast<std::int64_t>(s.size()));
    std::set<std::string> platforms;
    for (const auto& e : s.events()) {
      platforms.insert(e.platform.name());
      ++r.platform_counts[e.platform.name()];
      if (!r.min_time || e.timestamp < *r.min_time) r.min_time = e.timestamp;
      if (!r.max_time || e.timestamp > *r.max_time) r.max_time = e.timestamp;
    }
    if (!platforms.empty()) ++r.multiplicity[static_cast<int>(platforms.size())];
  }
  if (!lengths.empty()) {
    r.length_mean = stats::mean(lengths);
    r.length_p25 = stats::percentile(lengths, 25);
    r.length_p50 = stats::percentile(lengths, 50);
    r.length_p75 = stats::percentile(lengths, 75);
    r.length_p90 = stats::percentile(lengths, 90);
  }
  return r;
}

void write_events_csv(std::ostream& out, std::span<const UserSequence> sequences) {
  out << "user_id,timestamp,platform,activity,content\n";
  for (const auto& s : sequences)
    for (const auto& e : s.events())
      write_csv_row(out, {e.user_id, format_instant(e.timestamp), e.platform.name(), e.activity,
                          e.content.value_or("")});
}

void write_events_jsonl(std::ostream& out, std::span<const UserSequence> sequences) {
  for (const auto& s : sequences)
    for (const auto& e : s.events()) {
      nlohmann::ordered_json j;
      j["user_id"] = e.user_id;
      j["timestamp"] = format_instant(e.timestamp);
      j["platform"] = e.platform.name();
      j["activity"] = e.activity;
      if (e.content) j["content"] = *e.content;
      out << j.dump() << '\n';
    }
}

}  // namespace dtseq
