#include <doctest.h>

#include <random>
#include <sstream>

#include <json.hpp>

#include "dtseq/error.hpp"
#include "dtseq/hmm.hpp"
#include "oracles.hpp"

using namespace dtseq;

namespace {

using Rows = std::vector<std::vector<double>>;

std::vector<SymbolSequence> sample_hmm(const std::vector<double>& pi, const Rows& a, const Rows& b, int count, int length,
                                       unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<SymbolSequence> out;
  for (int s = 0; s < count; ++s) {
    SymbolSequence seq;
    int state = std::discrete_distribution<int>(pi.begin(), pi.end())(rng);
    for (int t = 0; t < length; ++t) {
      const auto& e = b[static_cast<std::size_t>(state)];
      seq.push_back(std::discrete_distribution<int>(e.begin(), e.end())(rng));
      const auto& tr = a[static_cast<std::size_t>(state)];
      state = std::discrete_distribution<int>(tr.begin(), tr.end())(rng);
    }
    out.push_back(seq);
  }
  return out;
}

HmmModel to_model(const std::vector<double>& pi, const Rows& a, const Rows& b) {
  HmmModel m;
  const auto k = static_cast<Eigen::Index>(pi.size()), s = static_cast<Eigen::Index>(b[0].size());
  m.initial.resize(k);
  m.transition.resize(k, k);
  m.emission.resize(k, s);
  for (Eigen::Index i = 0; i < k; ++i) {
    m.initial(i) = pi[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < k; ++j) m.transition(i, j) = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    for (Eigen::Index j = 0; j < s; ++j) m.emission(i, j) = b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

}  // namespace

TEST_SUITE("hmm") {

TEST_CASE("parameter count") {
  CHECK(hmm_parameter_count(4, 13) == 63);
  CHECK(hmm_parameter_count(1, 5) == 4);
}

TEST_CASE("one state recovers symbol frequencies") {
  std::vector<SymbolSequence> seqs{{0, 1, 1, 2}, {1, 1, 0, 1, 2, 2}};
  HmmOptions opts;
  opts.restarts = 2;
  auto m = fit_hmm(seqs, 1, opts);
  CHECK(m.transition(0, 0) == doctest::Approx(1.0));
  CHECK(m.emission(0, 0) == doctest::Approx(2.0 / 10.0).epsilon(1e-6));
  CHECK(m.emission(0, 1) == doctest::Approx(5.0 / 10.0).epsilon(1e-6));
  CHECK(m.emission(0, 2) == doctest::Approx(3.0 / 10.0).epsilon(1e-6));
}

TEST_CASE("forward likelihood equals path summation") {
  const std::vector<double> pi{0.6, 0.4};
  const Rows a{{0.7, 0.3}, {0.2, 0.8}}, b{{0.5, 0.4, 0.1}, {0.1, 0.3, 0.6}};
  SymbolSequence obs{0, 2, 1, 2, 0};
  double total = 0.0;
  for (int code = 0; code < 32; ++code) {
    int prev = code & 1;
    double p = pi[static_cast<std::size_t>(prev)] * b[static_cast<std::size_t>(prev)][0];
    for (int t = 1; t < 5; ++t) {
      const int s = code >> t & 1;
      p *= a[static_cast<std::size_t>(prev)][static_cast<std::size_t>(s)] *
           b[static_cast<std::size_t>(s)][static_cast<std::size_t>(obs[static_cast<std::size_t>(t)])];
      prev = s;
    }
    total += p;
  }
  std::vector<SymbolSequence> seqs{obs};
  CHECK(hmm_log_likelihood(to_model(pi, a, b), seqs) == doctest::Approx(std::log(total)).epsilon(1e-12));
}

TEST_CASE("viterbi equals exhaustive path search") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 3, m = 4;
    auto model = random_hmm(k, m, static_cast<std::uint64_t>(trial + 1));
    std::vector<double> pi(k);
    Rows a(k, std::vector<double>(k)), b(k, std::vector<double>(m));
    for (int i = 0; i < k; ++i) {
      pi[static_cast<std::size_t>(i)] = model.initial(i);
      for (int j = 0; j < k; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = model.transition(i, j);
      for (int j = 0; j < m; ++j) b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = model.emission(i, j);
    }
    std::vector<int> obs(6);
    for (auto& o : obs) o = std::uniform_int_distribution<int>(0, m - 1)(rng);
    SymbolSequence sym(obs.begin(), obs.end());
    CHECK(viterbi(model, sym) == oracle::viterbi_enumerate(pi, a, b, obs));
  }
}

TEST_CASE("viterbi trivial cases") {
  auto one = to_model({1.0}, {{1.0}}, {{0.5, 0.5}});
  SymbolSequence s{0, 1, 1, 0};
  CHECK(viterbi(one, s) == std::vector<int>{0, 0, 0, 0});
  auto two = to_model({0.5, 0.5}, {{0.5, 0.5}, {0.5, 0.5}}, {{0.999, 0.001}, {0.001, 0.999}});
  CHECK(viterbi(two, s) == std::vector<int>{0, 1, 1, 0});
  SymbolSequence bad{0, 2};
  CHECK_THROWS_AS(viterbi(two, bad), Error);
}

TEST_CASE("Baum-Welch never lowers the likelihood") {
  const std::vector<double> pi{0.5, 0.3, 0.2};
  const Rows a{{0.8, 0.1, 0.1}, {0.2, 0.7, 0.1}, {0.1, 0.2, 0.7}};
  const Rows b{{0.6, 0.2, 0.1, 0.1}, {0.1, 0.6, 0.2, 0.1}, {0.1, 0.1, 0.2, 0.6}};
  auto seqs = sample_hmm(pi, a, b, 20, 40, 5);
  HmmOptions opts;
  opts.max_iterations = 200;
  opts.tolerance = 1e-10;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto m = baum_welch(random_hmm(3, 4, seed), seqs, opts);
    REQUIRE(m.trace.size() >= 2);
    for (std::size_t i = 1; i < m.trace.size(); ++i)
      CHECK(m.trace[i] >= m.trace[i - 1] - 1e-9 * std::abs(m.trace[i - 1]));
  }
}

TEST_CASE("two-state model is recovered") {
  const std::vector<double> pi{0.5, 0.5};
  const Rows a{{0.9, 0.1}, {0.15, 0.85}};
  const Rows b{{0.7, 0.2, 0.05, 0.05}, {0.05, 0.05, 0.3, 0.6}};
  auto seqs = sample_hmm(pi, a, b, 200, 50, 42);
  HmmOptions opts;
  opts.seed = 3;
  auto m = fit_hmm(seqs, 2, opts, 4);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& perm : oracle::permutations(2)) {
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
      const auto pi_ = perm[static_cast<std::size_t>(i)];
      for (int j = 0; j < 2; ++j)
        worst = std::max(worst, std::abs(m.transition(pi_, perm[static_cast<std::size_t>(j)]) -
                                         a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
      for (int j = 0; j < 4; ++j)
        worst = std::max(worst, std::abs(m.emission(pi_, j) - b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
    }
    best = std::min(best, worst);
  }
  CHECK(best < 0.05);
}

TEST_CASE("iid data selects one state") {
  int hits = 0;
  const int seeds = 10;
  for (int seed = 0; seed < seeds; ++seed) {
    std::mt19937 rng(static_cast<unsigned>(seed + 100));
    std::vector<SymbolSequence> seqs(30, SymbolSequence(30));
    for (auto& s : seqs)
      for (auto& x : s) x = std::uniform_int_distribution<int>(0, 4)(rng);
    std::vector<int> cand{1, 2, 3};
    HmmOptions opts;
    opts.seed = static_cast<std::uint64_t>(seed);
    opts.restarts = 3;
    opts.max_iterations = 200;
    auto sel = select_states(seqs, cand, opts, 5);
    hits += sel.chosen == 1;
  }
  CHECK(hits >= 9);
}

TEST_CASE("fit is deterministic and thread-count independent") {
  const std::vector<double> pi{0.5, 0.5};
  const Rows a{{0.9, 0.1}, {0.1, 0.9}}, b{{0.8, 0.2}, {0.2, 0.8}};
  auto seqs = sample_hmm(pi, a, b, 20, 30, 1);
  HmmOptions o1;
  o1.seed = 9;
  auto m1 = fit_hmm(seqs, 2, o1);
  auto m2 = fit_hmm(seqs, 2, o1);
  HmmOptions o3 = o1;
  o3.threads = 3;
  auto m3 = fit_hmm(seqs, 2, o3);
  CHECK(m1.transition == m2.transition);
  CHECK(m1.emission == m3.emission);
  CHECK(m1.restart == m3.restart);
}

TEST_CASE("invalid state counts") {
  std::vector<SymbolSequence> seqs{{0, 1}};
  CHECK_THROWS_AS(fit_hmm(seqs, 3), Error);
  CHECK_THROWS_AS(fit_hmm(seqs, 0), Error);
  std::vector<SymbolSequence> none;
  CHECK_THROWS_AS(fit_hmm(none, 1), Error);
  HmmOptions o;
  o.candidates = 0;
  CHECK_THROWS_AS(fit_hmm(seqs, 1, o), Error);
}

TEST_CASE("screened fits keep one continuous trace") {
  const std::vector<double> pi{0.5, 0.5};
  const Rows a{{0.9, 0.1}, {0.2, 0.8}}, b{{0.8, 0.1, 0.1}, {0.1, 0.1, 0.8}};
  auto seqs = sample_hmm(pi, a, b, 30, 40, 21);
  HmmOptions o;
  o.candidates = 4;
  o.screen_iterations = 3;
  auto m = fit_hmm(seqs, 3, o, 3);
  CHECK(m.iterations + 1 == static_cast<int>(m.trace.size()));
  for (std::size_t i = 1; i < m.trace.size(); ++i) CHECK(m.trace[i] >= m.trace[i - 1] - 1e-9 * std::abs(m.trace[i - 1]));
  CHECK(m.trace.back() == m.log_likelihood);
  o.threads = 3;
  auto t = fit_hmm(seqs, 3, o, 3);
  CHECK(t.transition == m.transition);
  CHECK(t.emission == m.emission);
}

TEST_CASE("model json carries labelled matrices") {
  auto m = to_model({1.0}, {{1.0}}, {{0.25, 0.75}});
  std::vector<std::string> labels{"A", "B"};
  std::ostringstream out;
  write_hmm_json(out, m, labels);
  auto j = nlohmann::json::parse(out.str());
  CHECK(j["states"] == 1);
  CHECK(j["symbols"] == nlohmann::json(labels));
  CHECK(j["emission"][0][1] == 0.75);
}

}  // TEST_SUITE
