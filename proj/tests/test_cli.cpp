#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dtseq/ingest.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string("DTSEQ_LOG=quiet ") + DTSEQ_BIN + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json summary(const Result& r) {
  auto nl = r.out.find('\n');
  return nlohmann::json::parse(r.out.substr(0, nl));
}

fs::path scratch(const std::string& name) {
  auto d = fs::path("cli_scratch") / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

const char* kSmall = "--multiplicity 6,4,3,2 --median-length 120 --sigma 0.8";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synth twice gives identical files") {
  auto d = scratch("synth");
  auto a = run("synth --seed 7 " + std::string(kSmall) + " --out " + (d / "a.csv").string());
  auto b = run("synth --seed 7 " + std::string(kSmall) + " --out " + (d / "b.csv").string());
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(slurp(d / "a.csv") == slurp(d / "b.csv"));
  auto s = summary(a);
  CHECK(s["status"] == "ok");
  CHECK(s["users"] == 15);
  CHECK_FALSE(fs::exists(d / "a.csv.tmp"));
}

TEST_CASE("unknown flag is a usage error") {
  CHECK(run("synth --bogus 3 --out x.csv").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("missing input is an input error") {
  auto r = run("report --in does/not/exist.csv");
  CHECK(r.code == 2);
  CHECK(summary(r)["kind"] == "IoError");
}

TEST_CASE("report agrees with the library summary") {
  auto d = scratch("report");
  auto corpus = (d / "corpus.csv").string();
  REQUIRE(run("synth --seed 3 " + std::string(kSmall) + " --out " + corpus).code == 0);
  const auto before = slurp(corpus);
  auto r = run("report --in " + corpus);
  REQUIRE(r.code == 0);
  auto lib = dtseq::read_events(corpus, dtseq::LogFormat::Csv);
  auto rep = dtseq::summarize(lib.sequences);
  auto s = summary(r);
  CHECK(s["users"] == rep.users);
  CHECK(s["events"] == rep.rows_read);
  CHECK(s["multiplicity"]["4"] == 2);
  CHECK(slurp(corpus) == before);
}

TEST_CASE("survival writes one curve per platform plus the Cox table") {
  auto d = scratch("survival");
  auto corpus = (d / "corpus.csv").string();
  REQUIRE(run("synth --seed 5 --multiplicity 10,20,10,10 --median-length 300 --sigma 0.5 --out " + corpus).code == 0);
  auto r = run("survival --in " + corpus + " --window 10 --out " + (d / "curves").string());
  REQUIRE(r.code == 0);
  for (const char* p : {"Facebook", "Instagram", "TikTok", "YouTube"}) CHECK(fs::exists(d / "curves" / ("km_" + std::string(p) + ".csv")));
  CHECK(fs::exists(d / "curves" / "cox.csv"));
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(d / "curves")) ++files;
  CHECK(files == 5);
}

TEST_CASE("singular Cox model exits with the numerical code") {
  auto d = scratch("singular");
  std::ofstream log(d / "log.csv");
  log << "user_id,timestamp,platform,activity\n";
  for (int u = 0; u < 4; ++u) {
    const int day = 10 + u;
    log << "u" << u << ",2024-05-" << day << "T08:00:00Z,YouTube,watch_history\n";
    log << "u" << u << ",2024-05-" << day << "T09:00:00Z,Facebook,likes\n";
    log << "u" << u << ",2024-05-" << day << "T09:01:00Z,Facebook,likes\n";
  }
  log.close();
  auto r = run("survival --in " + (d / "log.csv").string() + " --out " + (d / "out").string());
  CHECK(r.code == 3);
  CHECK(summary(r)["kind"] == "SingularModel");
}

TEST_CASE("config file supplies defaults and flags override") {
  auto d = scratch("config");
  auto corpus = (d / "corpus.csv").string();
  REQUIRE(run("synth --seed 2 " + std::string(kSmall) + " --out " + corpus).code == 0);
  {
    std::ofstream cfg(d / "run.ini");
    cfg << "[sessions]\nwindow=1\n";
  }
  auto narrow = run("--config " + (d / "run.ini").string() + " sessions --in " + corpus + " --out " + (d / "s1.csv").string());
  auto wide = run("--config " + (d / "run.ini").string() + " sessions --in " + corpus + " --window 60 --out " +
                  (d / "s2.csv").string());
  auto dflt = run("sessions --in " + corpus + " --out " + (d / "s3.csv").string());
  REQUIRE(narrow.code == 0);
  REQUIRE(wide.code == 0);
  REQUIRE(dflt.code == 0);
  const int n1 = summary(narrow)["sessions"], n2 = summary(wide)["sessions"], n3 = summary(dflt)["sessions"];
  CHECK(n1 > n3);
  CHECK(n3 > n2);
}

TEST_CASE("bad option values are input errors") {
  auto d = scratch("badvals");
  auto corpus = (d / "corpus.csv").string();
  REQUIRE(run("synth --seed 2 " + std::string(kSmall) + " --out " + corpus).code == 0);
  CHECK(run("sessions --in " + corpus + " --window 0 --out " + (d / "s.csv").string()).code == 2);
  CHECK(run("cluster --in " + corpus + " -k 500 --out " + (d / "c").string()).code == 2);
  CHECK(run("synth --multiplicity 1,2 --out " + (d / "x.csv").string()).code == 2);
}

}  // TEST_SUITE
