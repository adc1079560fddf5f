#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dtseq/error.hpp"
#include "dtseq/ingest.hpp"
#include "dtseq/synth.hpp"
#include "fixtures.hpp"

using namespace dtseq;

TEST_SUITE("ingest") {

TEST_CASE("header only gives no sequences") {
  std::istringstream in("user_id,timestamp,platform,activity,content\n");
  auto r = read_events(in, LogFormat::Csv);
  CHECK(r.sequences.empty());
  CHECK(r.report.rows_read == 0);
}

TEST_CASE("rows out of order come back sorted") {
  std::istringstream in(
      "user_id,timestamp,platform,activity\n"
      "u1,2024-05-01T10:00:00Z,Instagram,likes\n"
      "u1,2024-05-01T08:00:00Z,Facebook,likes\n"
      "u1,2024-05-01T09:00:00Z,TikTok,likes\n");
  auto r = read_events(in, LogFormat::Csv);
  REQUIRE(r.sequences.size() == 1);
  REQUIRE(r.sequences[0].size() == 3);
  CHECK(r.sequences[0][0].platform.name() == "Facebook");
  CHECK(r.sequences[0][1].platform.name() == "TikTok");
  CHECK(r.sequences[0][2].platform.name() == "Instagram");
}

TEST_CASE("one bad timestamp among ten rows") {
  std::ostringstream body;
  body << "platform,activity,timestamp,user_id,content\n";
  for (int i = 0; i < 10; ++i) {
    const std::string ts = i == 6 ? "2024-05-01T25:61:00Z" : "2024-05-01T08:0" + std::to_string(i) + ":00Z";
    body << "YouTube,watch_history," << ts << ",u" << (i % 3) << ",\"clip, part " << i << "\"\n";
  }
  std::istringstream in(body.str());
  auto r = read_events(in, LogFormat::Csv);
  CHECK(r.report.rows_read == 10);
  CHECK(r.report.rows_rejected == 1);
  CHECK(r.report.accepted() == 9);
  std::size_t total = 0;
  for (const auto& s : r.sequences) total += s.size();
  CHECK(total == 9);
  CHECK(r.sequences[0][0].content == std::optional<std::string>("clip, part 0"));
}

TEST_CASE("missing required column is an io error") {
  std::istringstream in("user,timestamp,platform,activity\nu,1,IG,x\n");
  CHECK_THROWS_AS(read_events(in, LogFormat::Csv), Error);
}

TEST_CASE("unreadable file is an io error") {
  try {
    read_events("/nonexistent/dir/log.csv", LogFormat::Csv);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
  }
}

TEST_CASE("jsonl with a malformed line") {
  std::istringstream in(
      "{\"user_id\":\"a\",\"timestamp\":\"2024-05-01T08:00:00Z\",\"platform\":\"tiktok\",\"activity\":\"likes\"}\n"
      "not json\n"
      "{\"user_id\":\"a\",\"timestamp\":\"2024-05-01T08:05:00Z\",\"platform\":\"tiktok\",\"activity\":\"favorites\","
      "\"content\":\"dance\"}\n");
  auto r = read_events(in, LogFormat::Jsonl);
  CHECK(r.report.rows_read == 3);
  CHECK(r.report.rows_rejected == 1);
  REQUIRE(r.sequences.size() == 1);
  CHECK(r.sequences[0][1].content == std::optional<std::string>("dance"));
}

TEST_CASE("csv and jsonl writers round trip") {
  SynthConfig cfg;
  cfg.n_users = 6;
  cfg.multiplicity = {2, 2, 1, 1};
  cfg.length_mu = 3.0;
  cfg.length_sigma = 0.5;
  const auto corpus = generate(cfg);
  for (auto fmt : {LogFormat::Csv, LogFormat::Jsonl}) {
    std::stringstream io;
    if (fmt == LogFormat::Csv) write_events_csv(io, corpus);
    else write_events_jsonl(io, corpus);
    auto back = read_events(io, fmt);
    CHECK(back.report.rows_rejected == 0);
    CHECK(back.sequences == corpus);
  }
}

TEST_CASE("summary of a single five-event user") {
  std::vector<Event> evs;
  for (int i = 0; i < 5; ++i) evs.push_back(fx::ev_s("u", 1000 + i, "IG", "likes"));
  auto seqs = group_by_user(evs);
  auto rep = summarize(seqs);
  CHECK(rep.users == 1);
  CHECK(rep.length_p50 == 5);
  CHECK(rep.multiplicity == std::map<int, std::int64_t>{{1, 1}});
}

TEST_CASE("length quartile under linear interpolation") {
  std::vector<UserSequence> seqs;
  int u = 0;
  for (int len : {2, 4, 6, 8}) {
    std::vector<Event> evs;
    const std::string id = "u" + std::to_string(u++);
    for (int i = 0; i < len; ++i) evs.push_back(fx::ev_s(id, i, "FB", "likes"));
    seqs.emplace_back(id, evs);
  }
  auto rep = summarize(seqs);
  CHECK(rep.length_p25 == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(rep.length_mean == 5);
  CHECK(rep.length_max == 8);
}

}  // TEST_SUITE

TEST_SUITE("synth") {

TEST_CASE("fixed seed gives identical corpora") {
  SynthConfig cfg;
  cfg.n_users = 20;
  cfg.multiplicity = {10, 5, 3, 2};
  cfg.length_mu = 4.0;
  std::ostringstream a, b;
  write_events_csv(a, generate(cfg));
  write_events_csv(b, generate(cfg));
  CHECK(a.str() == b.str());
  cfg.seed = 2;
  std::ostringstream c;
  write_events_csv(c, generate(cfg));
  CHECK(a.str() != c.str());
}

TEST_CASE("default configuration matches the donation histogram") {
  SynthConfig cfg;
  const auto plans = plan_users(cfg);
  CHECK(plans.size() == 309);
  std::map<int, std::int64_t> hist;
  for (const auto& p : plans) ++hist[static_cast<int>(p.platforms.size())];
  CHECK(hist == std::map<int, std::int64_t>{{1, 208}, {2, 67}, {3, 26}, {4, 8}});
  for (const auto& p : plans) {
    CHECK(p.length >= cfg.min_length);
    CHECK(p.length <= cfg.max_length);
  }
}

TEST_CASE("summarize reproduces the configured multiplicities") {
  SynthConfig cfg;
  cfg.length_mu = 2.5;
  cfg.length_sigma = 0.3;
  cfg.min_length = 8;
  auto corpus = generate(cfg);
  auto rep = summarize(corpus);
  CHECK(rep.users == 309);
  CHECK(rep.multiplicity == std::map<int, std::int64_t>{{1, 208}, {2, 67}, {3, 26}, {4, 8}});
}

TEST_CASE("same-platform adjacency tracks p_stay") {
  SynthConfig cfg;
  cfg.n_users = 1;
  cfg.multiplicity = {0, 0, 0, 1};
  cfg.min_length = cfg.max_length = 10000;
  auto corpus = generate(cfg);
  REQUIRE(corpus.size() == 1);
  const auto& s = corpus[0];
  REQUIRE(s.size() == 10000);
  std::int64_t same = 0;
  for (std::size_t i = 1; i < s.size(); ++i) same += s[i].platform == s[i - 1].platform;
  const double frac = static_cast<double>(same) / 9999.0;
  // 3 sigma of a Bernoulli(0.9) mean over 9999 draws is about 0.009.
  CHECK(frac >= 0.88);
  CHECK(frac <= 0.92);
}

TEST_CASE("timestamps increase strictly and stay in range") {
  SynthConfig cfg;
  cfg.n_users = 12;
  cfg.multiplicity = {3, 3, 3, 3};
  cfg.length_mu = 5.0;
  for (const auto& s : generate(cfg)) {
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].timestamp > s[i - 1].timestamp);
    CHECK(s[0].timestamp >= cfg.start);
    CHECK(s[s.size() - 1].timestamp < cfg.end);
  }
}

TEST_CASE("infeasible configurations are rejected") {
  SynthConfig cfg;
  cfg.end = cfg.start;
  CHECK_THROWS_AS(cfg.validate(), Error);
  SynthConfig c2;
  c2.multiplicity = {1, 1, 1, 1};
  CHECK_THROWS_AS(generate(c2), Error);
  SynthConfig c3;
  c3.p_stay = 1.0;
  CHECK_THROWS_AS(c3.validate(), Error);
}

}  // TEST_SUITE
