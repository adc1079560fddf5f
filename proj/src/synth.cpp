#include "dtseq/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "dtseq/error.hpp"

namespace dtseq {

std::vector<PlatformSpec> SynthConfig::default_platforms() {
  std::vector<PlatformSpec> out(4);
  out[0].platform = Platform(Platform::Kind::Facebook);
  out[0].activities = {{"likes", 0.45, false}, {"comments", 0.25, false}, {"searches", 0.30, true}};
  out[0].popularity = 117;
  out[0].gap_mean_seconds = 50;
  out[0].topics = {"local events", "regional news", "flat hunting"};

  out[1].platform = Platform(Platform::Kind::Instagram);
  out[1].activities = {{"likes", 0.45, false},
                       {"comments", 0.15, false},
                       {"shares", 0.25, false},
                       {"saves", 0.15, false}};
  out[1].popularity = 140;
  out[1].gap_mean_seconds = 40;
  out[1].topics = {"fitness", "travel", "food"};

  out[2].platform = Platform(Platform::Kind::TikTok);
  out[2].activities = {{"watch_history", 0.60, true}, {"likes", 0.25, false}, {"favorites", 0.15, false}};
  out[2].popularity = 54;
  out[2].gap_mean_seconds = 25;
  out[2].topics = {"dance", "comedy", "pop music"};

  out[3].platform = Platform(Platform::Kind::YouTube);
  out[3].activities = {{"watch_history", 0.60, true}, {"searches", 0.25, true}, {"comments", 0.15, false}};
  out[3].popularity = 141;
  out[3].gap_mean_seconds = 240;
  out[3].topics = {"tutorials", "gaming", "documentaries"};
  return out;
}

void SynthConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); };
  if (n_users < 0) fail("n_users must be non-negative");
  if (std::accumulate(multiplicity.begin(), multiplicity.end(), std::int64_t{0}) != n_users)
    fail("multiplicity counts must sum to n_users");
  for (std::size_t m = 0; m < multiplicity.size(); ++m) {
    if (multiplicity[m] < 0) fail("negative multiplicity count");
    if (multiplicity[m] > 0 && m + 1 > platforms.size())
      fail("multiplicity " + std::to_string(m + 1) + " exceeds the number of platforms");
    if (multiplicity[m] > 0 && static_cast<std::int64_t>(m + 1) > max_length)
      fail("max_length is shorter than a user's platform count");
  }
  if (!(p_stay > 0.0 && p_stay < 1.0)) fail("p_stay must lie in (0, 1)");
  if (!(length_sigma > 0.0)) fail("length_sigma must be positive");
  if (min_length < 1 || max_length < min_length) fail("need 1 <= min_length <= max_length");
  if (end <= start) fail("empty date range");
  const auto span_s = std::chrono::duration_cast<std::chrono::seconds>(end - start).count();
  if (max_length > span_s) fail("date range too short for max_length strictly increasing timestamps");
  if (p_break < 0.0 || p_break >= 1.0) fail("p_break must lie in [0, 1)");
  if (topic_loyalty < 0.0 || topic_loyalty > 1.0) fail("topic_loyalty must lie in [0, 1]");
  for (const auto& p : platforms) {
    if (p.activities.empty()) fail("platform " + p.platform.name() + " has no activities");
    if (!(p.gap_mean_seconds > 0.0)) fail("gap_mean_seconds must be positive");
    if (p.popularity <= 0.0) fail("popularity must be positive");
    if (p.p_stay && !(*p.p_stay > 0.0 && *p.p_stay < 1.0)) fail("platform p_stay must lie in (0, 1)");
    double total = 0.0;
    bool content = false;
    for (const auto& a : p.activities) {
      if (a.weight < 0.0) fail("negative activity weight");
      total += a.weight;
      content = content || a.has_content;
    }
    if (total <= 0.0) fail("activity weights of " + p.platform.name() + " sum to zero");
    if (content && p.topics.empty()) fail("platform " + p.platform.name() + " needs topics for content");
  }
  if (terms_per_topic < 1) fail("terms_per_topic must be positive");
}

namespace {

std::mt19937_64 user_rng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), 0x5eedu};
  return std::mt19937_64(seq);
}

std::string user_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u%04zu", i + 1);
  return buf;
}

}  // namespace

std::vector<UserPlan> plan_users(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const auto n = static_cast<std::size_t>(config.n_users);

  std::vector<int> mult;
  for (std::size_t m = 0; m < config.multiplicity.size(); ++m)
    mult.insert(mult.end(), static_cast<std::size_t>(config.multiplicity[m]), static_cast<int>(m + 1));
  std::shuffle(mult.begin(), mult.end(), rng);

  std::vector<std::size_t> strata(n);
  std::iota(strata.begin(), strata.end(), 0);
  std::shuffle(strata.begin(), strata.end(), rng);

  boost::math::normal_distribution<double> std_normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<UserPlan> plans(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& plan = plans[i];
    plan.user_id = user_name(i);

    // Weighted sampling without replacement by popularity.
    std::vector<double> weights;
    for (const auto& p : config.platforms) weights.push_back(p.popularity);
    for (int k = 0; k < mult[i]; ++k) {
      std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
      const std::size_t chosen = pick(rng);
      plan.platforms.push_back(chosen);
      weights[chosen] = 0.0;
    }
    std::sort(plan.platforms.begin(), plan.platforms.end());

    double q = (static_cast<double>(strata[i]) + unit(rng)) / static_cast<double>(n);
    q = std::clamp(q, 1e-12, 1.0 - 1e-12);
    const double len = std::exp(config.length_mu + config.length_sigma * boost::math::quantile(std_normal, q));
    plan.length = std::clamp(static_cast<std::int64_t>(std::llround(std::min(len, 1e15))), config.min_length,
                             config.max_length);
    plan.length = std::max<std::int64_t>(plan.length, static_cast<std::int64_t>(plan.platforms.size()));
  }
  return plans;
}

namespace {

UserSequence walk(const SynthConfig& config, const UserPlan& plan, std::size_t index) {
  auto rng = user_rng(config.seed, index);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n = static_cast<std::size_t>(plan.length);

  // Preferred topic per platform.
  std::vector<std::size_t> favourite(config.platforms.size(), 0);
  for (std::size_t p : plan.platforms) {
    const auto& topics = config.platforms[p].topics;
    if (!topics.empty()) favourite[p] = std::uniform_int_distribution<std::size_t>(0, topics.size() - 1)(rng);
  }

  std::vector<std::size_t> platform_of(n);
  std::vector<double> gaps(n, 0.0);
  std::size_t cur = std::uniform_int_distribution<std::size_t>(0, plan.platforms.size() - 1)(rng);
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0 && plan.platforms.size() > 1) {
      const auto& spec = config.platforms[plan.platforms[cur]];
      const double stay = spec.p_stay.value_or(config.p_stay);
      if (unit(rng) >= stay) {
        std::size_t next = std::uniform_int_distribution<std::size_t>(0, plan.platforms.size() - 2)(rng);
        if (next >= cur) ++next;
        cur = next;
      }
    }
    platform_of[t] = plan.platforms[cur];
    if (t > 0) {
      const auto& spec = config.platforms[platform_of[t]];
      const double mean = unit(rng) < config.p_break ? config.break_mean_seconds : spec.gap_mean_seconds;
      gaps[t] = std::exponential_distribution<double>(1.0 / mean)(rng);
    }
  }

  // Short walks can miss a planned platform; give it one event taken from a
  // platform that occurs more than once.
  std::map<std::size_t, std::size_t> seen;
  for (std::size_t p : platform_of) ++seen[p];
  for (std::size_t p : plan.platforms) {
    if (seen.count(p)) continue;
    std::vector<std::size_t> donors;
    for (std::size_t t = 0; t < n; ++t)
      if (seen[platform_of[t]] > 1) donors.push_back(t);
    const std::size_t t = donors[std::uniform_int_distribution<std::size_t>(0, donors.size() - 1)(rng)];
    --seen[platform_of[t]];
    platform_of[t] = p;
    seen[p] = 1;
  }

  // Fit the walk into the date range: every gap is at least one second.
  const std::int64_t range = std::chrono::duration_cast<std::chrono::seconds>(config.end - config.start).count() - 1;
  const double raw_total = std::accumulate(gaps.begin(), gaps.end(), 0.0);
  const double budget = static_cast<double>(range - static_cast<std::int64_t>(n > 0 ? n - 1 : 0));
  const double scale = raw_total > budget && raw_total > 0.0 ? budget / raw_total : 1.0;
  std::vector<std::int64_t> igaps(n, 0);
  std::int64_t total = 0;
  for (std::size_t t = 1; t < n; ++t) {
    igaps[t] = 1 + static_cast<std::int64_t>(std::floor(gaps[t] * scale));
    total += igaps[t];
  }
  const std::int64_t slack = std::max<std::int64_t>(0, range - total);
  std::int64_t offset = std::uniform_int_distribution<std::int64_t>(0, slack)(rng);
  Instant t0 = Instant{config.start} + std::chrono::seconds{offset};

  std::vector<std::discrete_distribution<std::size_t>> pick_activity;
  for (const auto& spec : config.platforms) {
    std::vector<double> w;
    for (const auto& a : spec.activities) w.push_back(a.weight);
    pick_activity.emplace_back(w.begin(), w.end());
  }

  std::vector<Event> events;
  events.reserve(n);
  Instant now = t0;
  for (std::size_t t = 0; t < n; ++t) {
    now += std::chrono::seconds{igaps[t]};
    const auto& spec = config.platforms[platform_of[t]];
    const auto& act = spec.activities[pick_activity[platform_of[t]](rng)];
    Event e{plan.user_id, now, spec.platform, act.name, std::nullopt};
    if (act.has_content) {
      std::size_t topic = favourite[platform_of[t]];
      if (unit(rng) >= config.topic_loyalty)
        topic = std::uniform_int_distribution<std::size_t>(0, spec.topics.size() - 1)(rng);
      const int term = std::uniform_int_distribution<int>(1, config.terms_per_topic)(rng);
      e.content = spec.topics[topic] + " " + std::to_string(term);
    }
    events.push_back(std::move(e));
  }
  return UserSequence(plan.user_id, std::move(events));
}

}  // namespace

std::vector<UserSequence> generate(const SynthConfig& config) {
  const auto plans = plan_users(config);
  std::vector<UserSequence> out;
  out.reserve(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) out.push_back(walk(config, plans[i], i));
  return out;
}

}  // namespace dtseq
