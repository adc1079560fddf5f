#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "dtseq/model.hpp"

namespace dtseq {

/// Merges consecutive events with the same platform_activity while each gap
/// to the previous event is at most `window_minutes`. The window bounds the
/// gap, not the session span. Throws ConfigError for a zero window.
std::vector<Session> collapse_sessions(const UserSequence& seq, int window_minutes);

/// Same rule, merging on platform only.
std::vector<Session> collapse_platform_sessions(const UserSequence& seq, int window_minutes);

/// Keeps the indices whose length lies in [P_lo, P_hi] (inclusive, linear
/// interpolation percentiles). Throws EmptyInput / ConfigError.
std::vector<std::size_t> percentile_keep(std::span<const std::size_t> lengths, double lo, double hi);

template <class Seq>
std::vector<Seq> percentile_filter(std::span<const Seq> sequences, double lo, double hi) {
  std::vector<std::size_t> lengths;
  lengths.reserve(sequences.size());
  for (const auto& s : sequences) lengths.push_back(s.size());
  std::vector<Seq> out;
  for (std::size_t i : percentile_keep(lengths, lo, hi)) out.push_back(sequences[i]);
  return out;
}

template <class Seq>
std::vector<Seq> percentile_filter(const std::vector<Seq>& sequences, double lo, double hi) {
  return percentile_filter(std::span<const Seq>(sequences), lo, hi);
}

struct DailySequence {
  Date date;
  UserSequence sequence;
};

/// Splits by UTC date; concatenating the parts in order gives back `seq`.
std::vector<DailySequence> split_daily(const UserSequence& seq);

struct DailySessions {
  std::string user_id;
  Date date;
  std::vector<Session> sessions;
};

/// Groups sessions by the UTC date of their start.
std::vector<DailySessions> split_daily(std::span<const Session> sessions);

}  // namespace dtseq
