#include "dtseq/preprocess.hpp"

#include "dtseq/error.hpp"
#include "dtseq/stats.hpp"

namespace dtseq {

namespace {

std::vector<Session> collapse(const UserSequence& seq, int window_minutes, LexiconMode mode) {
  if (window_minutes <= 0) throw Error(ErrorKind::ConfigError, "session window must be positive");
  const std::chrono::seconds window{std::int64_t{window_minutes} * 60};
  std::vector<Session> out;
  for (const auto& e : seq.events()) {
    Descriptor d = Descriptor::of(e, mode);
    if (!out.empty()) {
      Session& last = out.back();
      if (last.descriptor == d && e.timestamp - last.end <= window) {
        last.end = e.timestamp;
        ++last.count;
        continue;
      }
    }
    out.push_back(Session{seq.user_id(), std::move(d), e.timestamp, e.timestamp, 1});
  }
  return out;
}

}  // namespace

std::vector<Session> collapse_sessions(const UserSequence& seq, int window_minutes) {
  return collapse(seq, window_minutes, LexiconMode::PlatformActivity);
}

std::vector<Session> collapse_platform_sessions(const UserSequence& seq, int window_minutes) {
  return collapse(seq, window_minutes, LexiconMode::Platform);
}

std::vector<std::size_t> percentile_keep(std::span<const std::size_t> lengths, double lo, double hi) {
  if (lengths.empty()) throw Error(ErrorKind::EmptyInput, "percentile filter on no sequences");
  if (!(lo >= 0.0 && lo < hi && hi <= 100.0))
    throw Error(ErrorKind::ConfigError, "percentile bounds must satisfy 0 <= lo < hi <= 100");
  std::vector<double> values(lengths.begin(), lengths.end());
  const double p_lo = stats::percentile(values, lo);
  const double p_hi = stats::percentile(values, hi);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < lengths.size(); ++i)
    if (values[i] >= p_lo && values[i] <= p_hi) keep.push_back(i);
  return keep;
}

std::vector<DailySequence> split_daily(const UserSequence& seq) {
  std::vector<DailySequence> out;
  std::vector<Event> current;
  Date day{};
  for (const auto& e : seq.events()) {
    const Date d = utc_date(e.timestamp);
    if (!current.empty() && d != day) {
      out.push_back({day, UserSequence(seq.user_id(), std::move(current))});
      current.clear();
    }
    day = d;
    current.push_back(e);
  }
  if (!current.empty()) out.push_back({day, UserSequence(seq.user_id(), std::move(current))});
  return out;
}

std::vector<DailySessions> split_daily(std::span<const Session> sessions) {
  std::vector<DailySessions> out;
  for (const auto& s : sessions) {
    const Date d = utc_date(s.start);
    if (out.empty() || out.back().date != d || out.back().user_id != s.user_id)
      out.push_back({s.user_id, d, {}});
    out.back().sessions.push_back(s);
  }
  return out;
}

}  // namespace dtseq
