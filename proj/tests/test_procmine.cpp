#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "dtseq/error.hpp"
#include "dtseq/procmine.hpp"
#include "fixtures.hpp"

using namespace dtseq;

namespace {

const char* kPlat[] = {"FB", "IG", "TT"};
const char* kAct[] = {"likes", "searches"};

std::vector<Case> random_cases(int count, unsigned seed, int max_steps) {
  std::mt19937 rng(seed);
  std::vector<Case> out;
  for (int c = 0; c < count; ++c) {
    Case k{"c" + std::to_string(c), {}};
    std::int64_t t = 0;
    const int steps = std::uniform_int_distribution<int>(1, max_steps)(rng);
    for (int s = 0; s < steps; ++s) {
      const std::int64_t start = t + std::uniform_int_distribution<int>(1, 500)(rng);
      const std::int64_t end = start + std::uniform_int_distribution<int>(0, 300)(rng);
      k.steps.push_back(fx::sess("u", kPlat[std::uniform_int_distribution<int>(0, 2)(rng)],
                                 kAct[std::uniform_int_distribution<int>(0, 1)(rng)], start, end));
      t = end;
    }
    out.push_back(k);
  }
  return out;
}

}  // namespace

TEST_SUITE("procmine") {

TEST_CASE("single-step case") {
  std::vector<Case> cases{{"c", {fx::sess("u", "IG", "like", 0, 10)}}};
  auto g = build_dfg(cases);
  CHECK(g.edges.size() == 2);
  CHECK(g.edges.at({kStartNode, "Instagram_like"}).frequency == 1);
  CHECK(g.edges.at({"Instagram_like", kEndNode}).frequency == 1);
}

TEST_CASE("platform change routes through the switch node") {
  std::vector<Case> cases{{"c", {fx::sess("u", "IG", "like", 0, 10), fx::sess("u", "FB", "search", 40, 50)}}};
  auto g = build_dfg(cases);
  CHECK(g.edges.at({"Instagram_like", kSwitchNode}).frequency == 1);
  CHECK(g.edges.at({kSwitchNode, "Facebook_search"}).frequency == 1);
  CHECK(g.edges.count({"Instagram_like", "Facebook_search"}) == 0);
  CHECK(g.switch_times.at({"Instagram", "Facebook"}).mean_seconds() == 30.0);
  CHECK_FALSE(g.edges.at({kSwitchNode, "Facebook_search"}).mean_seconds());
}

TEST_CASE("fifteen-case fixture matches brute-force pair counts") {
  auto cases = random_cases(15, 19, 8);
  std::map<NodePair, std::int64_t> want;
  std::map<NodePair, double> want_time;
  for (const auto& c : cases) {
    std::vector<std::pair<std::string, std::string>> items;  // (label, platform)
    for (const auto& s : c.steps) items.emplace_back(s.descriptor.label(), s.descriptor.platform.name());
    ++want[{"START", items.front().first}];
    ++want[{items.back().first, "END"}];
    for (std::size_t i = 1; i < items.size(); ++i) {
      if (items[i].second != items[i - 1].second) {
        ++want[{items[i - 1].first, "PLATFORM_SWITCH"}];
        ++want[{"PLATFORM_SWITCH", items[i].first}];
      } else {
        ++want[{items[i - 1].first, items[i].first}];
        want_time[{items[i - 1].first, items[i].first}] +=
            static_cast<double>(to_epoch(c.steps[i].start) - to_epoch(c.steps[i - 1].end));
      }
    }
  }
  auto g = build_dfg(cases);
  std::map<NodePair, std::int64_t> got;
  for (const auto& [e, st] : g.edges) got[e] = st.frequency;
  CHECK(got == want);
  for (const auto& [e, total] : want_time) CHECK(g.edges.at(e).total_seconds == total);
  CHECK(g.cases == 15);
  CHECK(g.nodes.at(kStartNode) == 15);
  CHECK(g.nodes.at(kEndNode) == 15);
}

TEST_CASE("empty log") {
  std::vector<Case> none;
  CHECK_THROWS_AS(build_dfg(none), Error);
}

TEST_CASE("transition time matrix means") {
  std::vector<Case> cases{{"a", {fx::sess("u", "FB", "x", 0, 100), fx::sess("u", "IG", "x", 12340, 12400)}}};
  auto tt = transition_time_matrix(cases);
  REQUIRE(tt.platforms == std::vector<std::string>{"Facebook", "Instagram"});
  CHECK(tt.mean_seconds[0][1] == 12240.0);
  CHECK_FALSE(tt.mean_seconds[1][0]);

  std::vector<Case> back{{"b", {fx::sess("u", "FB", "x", 0, 60), fx::sess("u", "FB", "y", 300, 400)}}};
  CHECK(transition_time_matrix(back).mean_seconds[0][0] == 240.0);

  std::vector<Case> two{{"a", {fx::sess("u", "FB", "x", 0, 10), fx::sess("u", "IG", "x", 110, 120)}},
                        {"b", {fx::sess("u", "FB", "x", 0, 10), fx::sess("u", "IG", "x", 310, 320)}}};
  auto m = transition_time_matrix(two, {"Facebook", "Instagram", "TikTok"});
  CHECK(m.mean_seconds[0][1] == 200.0);
  CHECK(m.counts[0][1] == 2);
  CHECK_FALSE(m.mean_seconds[2][2]);
}

TEST_CASE("identical cases form one variant") {
  std::vector<Case> cases(4, Case{"c", {fx::sess("u", "IG", "like", 0, 1), fx::sess("u", "IG", "share", 5, 6)}});
  auto t = top_variants(cases, 10);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].cases == 4);
  CHECK(t.total_cases == 4);
  CHECK_THROWS_AS(top_variants(cases, 0), Error);
}

TEST_CASE("thirty-case fixture matches exhaustive grouping") {
  auto cases = random_cases(30, 23, 3);
  std::vector<std::vector<std::string>> paths;
  std::vector<std::int64_t> counts;
  for (const auto& c : cases) {
    std::vector<std::string> p;
    for (const auto& s : c.steps) p.push_back(s.descriptor.label());
    bool found = false;
    for (std::size_t i = 0; i < paths.size(); ++i)
      if (paths[i] == p) {
        ++counts[i];
        found = true;
      }
    if (!found) {
      paths.push_back(p);
      counts.push_back(1);
    }
  }
  std::vector<std::size_t> order(paths.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return paths[a] < paths[b];
  });
  auto all = top_variants(cases, 1000);
  REQUIRE(all.rows.size() == paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    CHECK(all.rows[i].path == paths[order[i]]);
    CHECK(all.rows[i].cases == counts[order[i]]);
  }
  auto top = top_variants(cases, 10);
  CHECK(top.rows.size() == std::min<std::size_t>(10, paths.size()));
  std::int64_t sum = 0;
  for (const auto& r : top.rows) sum += r.cases;
  CHECK(sum <= top.total_cases);
  auto kept = filter_cases(cases, top);
  CHECK(static_cast<std::int64_t>(kept.size()) == sum);
}

TEST_CASE("daily cases split by session start") {
  std::vector<std::vector<Session>> users{{fx::sess("u", "IG", "x", 1714521600 - 100, 1714521600 - 50),
                                           fx::sess("u", "IG", "x", 1714521600 + 10, 1714521600 + 20)}};
  auto daily = make_cases(users, {TimeWindow::Kind::Daily});
  REQUIRE(daily.size() == 2);
  CHECK(daily[0].id == "u/2024-04-30");
  CHECK(daily[1].id == "u/2024-05-01");
  auto whole = make_cases(users, {TimeWindow::Kind::WholePeriod});
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].steps.size() == 2);
}

}  // TEST_SUITE
