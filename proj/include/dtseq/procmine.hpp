#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dtseq/model.hpp"

namespace dtseq {

inline constexpr const char* kStartNode = "START";
inline constexpr const char* kEndNode = "END";
inline constexpr const char* kSwitchNode = "PLATFORM_SWITCH";

/// One process instance: a user-day (or a whole user history) of sessions.
struct Case {
  std::string id;
  std::vector<Session> steps;
};

/// Groups each user's sessions into cases by UTC day of session start, or one
/// case per user for WholePeriod.
std::vector<Case> make_cases(std::span<const std::vector<Session>> sessions_per_user, TimeWindow window);

struct EdgeStats {
  std::int64_t frequency = 0;
  std::int64_t timed = 0;
  double total_seconds = 0.0;

  std::optional<double> mean_seconds() const {
    if (timed == 0) return std::nullopt;
    return total_seconds / static_cast<double>(timed);
  }
};

using NodePair = std::pair<std::string, std::string>;

struct DirectlyFollowsGraph {
  std::int64_t cases = 0;
  std::map<std::string, std::int64_t> nodes;
  std::map<NodePair, EdgeStats> edges;
  /// Gaps of platform switches, keyed by (from platform, to platform).
  std::map<NodePair, EdgeStats> switch_times;
};

/// START -> first, consecutive pairs, last -> END per case. A platform change
/// between consecutive steps routes through PLATFORM_SWITCH; those edges carry
/// no time, and the gap (next start - previous end) goes to `switch_times`.
/// Throws EmptyInput for no cases.
DirectlyFollowsGraph build_dfg(std::span<const Case> cases);

/// Mean gap (next start - previous end) between consecutive steps, by
/// platform pair, within a case. Cells without transitions are nullopt.
struct TransitionTimes {
  std::vector<std::string> platforms;
  std::vector<std::vector<std::optional<double>>> mean_seconds;
  std::vector<std::vector<std::int64_t>> counts;
};

/// `platforms` fixes the row/column order; empty uses every platform seen,
/// sorted by name.
TransitionTimes transition_time_matrix(std::span<const Case> cases, std::vector<std::string> platforms = {});

struct Variant {
  std::vector<std::string> path;
  std::int64_t cases = 0;
};

struct VariantTable {
  std::vector<Variant> rows;
  std::int64_t total_cases = 0;
};

std::vector<std::string> activity_path(const Case& c);

/// The `k` most frequent activity paths; ties ordered lexicographically.
/// Throws ConfigError for k < 1.
VariantTable top_variants(std::span<const Case> cases, std::size_t k);

/// Cases whose path is one of the table's variants.
std::vector<Case> filter_cases(std::span<const Case> cases, const VariantTable& variants);

void write_dfg_dot(std::ostream& out, const DirectlyFollowsGraph& dfg);
void write_variants_csv(std::ostream& out, const VariantTable& table);
void write_transition_times_csv(std::ostream& out, const TransitionTimes& times);

}  // namespace dtseq
