#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtseq/model.hpp"

namespace dtseq {

struct ActivitySpec {
  std::string name;
  double weight = 1.0;
  /// Activities carrying content (searches, watched URLs) draw it from the
  /// platform's topic pool.
  bool has_content = false;
};

struct PlatformSpec {
  Platform platform;
  std::vector<ActivitySpec> activities;
  /// Relative popularity when choosing which platforms a user donates.
  double popularity = 1.0;
  /// Mean in-session gap between events, seconds.
  double gap_mean_seconds = 60.0;
  /// Overrides SynthConfig::p_stay for walks currently on this platform.
  std::optional<double> p_stay;
  std::vector<std::string> topics;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  std::int64_t n_users = 309;
  /// Users donating from exactly 1, 2, 3, 4 platforms.
  std::array<std::int64_t, 4> multiplicity{208, 67, 26, 8};
  /// Log-normal sequence length; median = exp(mu).
  double length_mu = 6.684611727667927;  // ln 800
  double length_sigma = 1.9;
  std::int64_t min_length = 2;
  std::int64_t max_length = 83372;
  Date start = Date{std::chrono::year{2024} / 5 / 1};
  Date end = Date{std::chrono::year{2024} / 8 / 1};
  double p_stay = 0.9;
  /// Probability that a gap is a break between sittings.
  double p_break = 0.02;
  double break_mean_seconds = 6.0 * 3600.0;
  /// Probability a content-bearing event uses the user's preferred topic.
  double topic_loyalty = 0.8;
  int terms_per_topic = 4;
  std::vector<PlatformSpec> platforms = default_platforms();

  /// Facebook, Instagram, TikTok, YouTube with 13 activities in total.
  static std::vector<PlatformSpec> default_platforms();

  /// Throws ConfigError on an infeasible configuration.
  void validate() const;
};

/// Per-user draw made before the walk: which platforms and how many events.
struct UserPlan {
  std::string user_id;
  std::vector<std::size_t> platforms;  // indices into SynthConfig::platforms
  std::int64_t length = 0;
};

/// Lengths come from stratified log-normal quantiles, one stratum per user,
/// so corpus-level moments are stable across seeds.
std::vector<UserPlan> plan_users(const SynthConfig& config);

/// Deterministic for a fixed config. Timestamps strictly increase within a
/// user. Output is sorted by user id.
std::vector<UserSequence> generate(const SynthConfig& config);

}  // namespace dtseq
