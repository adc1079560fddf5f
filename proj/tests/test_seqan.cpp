#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "dtseq/error.hpp"
#include "dtseq/seqan.hpp"
#include "oracles.hpp"

using namespace dtseq;

namespace {

std::vector<int> random_seq(std::mt19937& rng, int max_len, int alphabet) {
  std::vector<int> s(static_cast<std::size_t>(std::uniform_int_distribution<int>(1, max_len)(rng)));
  for (auto& x : s) x = std::uniform_int_distribution<int>(0, alphabet - 1)(rng);
  return s;
}

struct NaiveMerge {
  std::size_t a, b;
  double height;
};

// Average linkage recomputed from the original matrix over explicit member
// sets at every step; ties go to the pair with the smallest (min a, min b).
std::vector<NaiveMerge> naive_average_linkage(const Eigen::MatrixXd& d, std::size_t k, std::vector<int>& labels) {
  std::vector<std::set<std::size_t>> clusters;
  for (std::size_t i = 0; i < static_cast<std::size_t>(d.rows()); ++i) clusters.push_back({i});
  std::vector<NaiveMerge> merges;
  while (clusters.size() > k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double s = 0.0;
        for (auto x : clusters[i])
          for (auto y : clusters[j]) s += d(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
        s /= static_cast<double>(clusters[i].size() * clusters[j].size());
        if (s < best - 1e-12) {
          best = s;
          bi = i;
          bj = j;
        }
      }
    merges.push_back({*clusters[bi].begin(), *clusters[bj].begin(), best});
    clusters[bi].insert(clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    std::sort(clusters.begin(), clusters.end(), [](const auto& x, const auto& y) { return *x.begin() < *y.begin(); });
  }
  labels.assign(static_cast<std::size_t>(d.rows()), -1);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (auto x : clusters[c]) labels[x] = static_cast<int>(c);
  return merges;
}

}  // namespace

TEST_SUITE("seqan") {

TEST_CASE("om distance basics") {
  std::vector<Symbol> a{0, 1, 2}, b{0, 1, 3};
  CHECK(om_distance(a, a) == 0.0);
  CostScheme raw;
  raw.normalization = CostScheme::Normalization::None;
  std::vector<Symbol> ab{0, 1}, ac{0, 2};
  CHECK(om_distance(ab, ac, raw) == 2.0);
  CHECK(om_distance(a, b) == doctest::Approx(2.0 / 3.0));
  std::vector<Symbol> empty;
  CHECK_THROWS_AS(om_distance(empty, a), Error);
  CostScheme bad;
  bad.substitution = 3.0;
  CHECK_THROWS_AS(om_distance(a, b, bad), Error);
}

TEST_CASE("om distance equals exhaustive alignment search") {
  std::mt19937 rng(2024);
  CostScheme raw;
  raw.normalization = CostScheme::Normalization::None;
  CostScheme cheap{1.5, 1.0, CostScheme::Normalization::None};
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_seq(rng, 8, 4), b = random_seq(rng, 8, 4);
    std::vector<Symbol> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    CHECK(om_distance(sa, sb, raw) == oracle::edit_cost_exhaustive(a, b, 2.0, 1.0));
    CHECK(om_distance(sa, sb, cheap) == oracle::edit_cost_exhaustive(a, b, 1.5, 1.0));
  }
}

TEST_CASE("om distance is a symmetric normalized dissimilarity") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_seq(rng, 12, 3), b = random_seq(rng, 12, 3);
    std::vector<Symbol> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    const double d = om_distance(sa, sb);
    CHECK(d == om_distance(sb, sa));
    CHECK(d >= 0.0);
    CHECK(d <= 2.0);
  }
}

TEST_CASE("threaded distance matrix equals serial") {
  std::mt19937 rng(9);
  std::vector<SymbolSequence> seqs;
  for (int i = 0; i < 25; ++i) {
    auto s = random_seq(rng, 20, 5);
    seqs.emplace_back(s.begin(), s.end());
  }
  CHECK(distance_matrix(seqs, {}, 1) == distance_matrix(seqs, {}, 3));
}

TEST_CASE("k equal to n leaves singletons") {
  Eigen::MatrixXd d(3, 3);
  d << 0, 1, 2, 1, 0, 3, 2, 3, 0;
  auto c = cluster_users(d, 3);
  CHECK(c.labels == std::vector<int>{0, 1, 2});
  CHECK(c.merges.empty());
}

TEST_CASE("two separated blobs") {
  const int n = 10;
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = i == j ? 0.0 : ((i % 2) == (j % 2) ? 0.1 : 10.0);
  auto c = cluster_users(d, 2);
  for (int i = 0; i < n; ++i) CHECK(c.labels[static_cast<std::size_t>(i)] == i % 2);
}

TEST_CASE("eight-point fixture follows step-by-step average linkage") {
  const double pts[8][2] = {{0, 0}, {1, 0.2}, {0.4, 1.1}, {5, 5}, {5.5, 6}, {9, 0}, {9.3, 0.9}, {4.6, 4.1}};
  Eigen::MatrixXd d(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) d(i, j) = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
  for (std::size_t k = 1; k <= 8; ++k) {
    std::vector<int> want_labels;
    auto want = naive_average_linkage(d, k, want_labels);
    auto got = cluster_users(d, k);
    CHECK(got.labels == want_labels);
    REQUIRE(got.merges.size() == want.size());
    for (std::size_t m = 0; m < want.size(); ++m) {
      CHECK(got.merges[m].a == want[m].a);
      CHECK(got.merges[m].b == want[m].b);
      CHECK(got.merges[m].height == doctest::Approx(want[m].height).epsilon(1e-12));
    }
  }
}

TEST_CASE("clustering input validation") {
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(cluster_users(asym, 1), Error);
  Eigen::MatrixXd rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(cluster_users(rect, 1), Error);
  Eigen::MatrixXd ok = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(cluster_users(ok, 3), Error);
}

TEST_CASE("bigram of a repeated symbol") {
  std::vector<SymbolSequence> s{{0, 0, 0}};
  std::vector<int> orders{2};
  auto t = mine_motifs(s, orders);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].observed == 2);
  CHECK(t.slots[0] == 2);
  std::vector<int> bad{1};
  CHECK_THROWS_AS(mine_motifs(s, bad), Error);
}

TEST_CASE("motif counts on a fifty-session corpus equal brute force") {
  std::mt19937 rng(77);
  std::vector<std::vector<int>> raw;
  int total = 0;
  while (total < 50) {
    int len = std::min(std::uniform_int_distribution<int>(1, 9)(rng), 50 - total);
    std::vector<int> s(static_cast<std::size_t>(len));
    for (auto& x : s) x = std::uniform_int_distribution<int>(0, 3)(rng);
    total += len;
    raw.push_back(s);
  }
  std::vector<SymbolSequence> seqs;
  for (const auto& s : raw) seqs.emplace_back(s.begin(), s.end());
  std::vector<int> orders{2, 3, 4};
  auto table = mine_motifs(seqs, orders);
  std::vector<double> marg(4, 0.0);
  for (const auto& s : raw)
    for (int x : s) marg[static_cast<std::size_t>(x)] += 1.0 / 50.0;
  for (int n : orders) {
    auto want = oracle::ngram_counts(raw, n);
    std::map<std::vector<int>, std::int64_t> got;
    for (const auto& r : table.rows)
      if (r.order == n) {
        got[std::vector<int>(r.ngram.begin(), r.ngram.end())] = r.observed;
        double p = 1.0;
        for (int x : r.ngram) p *= marg[static_cast<std::size_t>(x)];
        const auto idx = static_cast<std::size_t>(n - 2);
        CHECK(r.expected == doctest::Approx(static_cast<double>(table.slots[idx]) * p).epsilon(1e-12));
      }
    CHECK(got == want);
  }
}

TEST_CASE("motif rows are ordered by count within each order") {
  std::vector<SymbolSequence> seqs{{0, 1, 0, 1, 0, 1, 2, 2}, {1, 0, 2}};
  std::vector<int> orders{2, 3};
  auto t = mine_motifs(seqs, orders);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    if (t.rows[i].order != t.rows[i - 1].order) {
      CHECK(t.rows[i].order > t.rows[i - 1].order);
      continue;
    }
    CHECK(t.rows[i].observed <= t.rows[i - 1].observed);
  }
}

TEST_CASE("planted repeat is flagged significant") {
  std::mt19937 rng(3);
  std::vector<SymbolSequence> seqs;
  for (int u = 0; u < 40; ++u) {
    SymbolSequence s;
    for (int i = 0; i < 50; ++i) {
      if (i % 10 == 0) {
        s.insert(s.end(), {0, 1, 2});
        continue;
      }
      s.push_back(std::uniform_int_distribution<int>(0, 5)(rng));
    }
    seqs.push_back(s);
  }
  std::vector<int> orders{3};
  auto t = mine_motifs(seqs, orders);
  REQUIRE_FALSE(t.rows.empty());
  CHECK(t.rows[0].ngram == std::vector<Symbol>{0, 1, 2});
  CHECK(t.rows[0].significant);
}

TEST_CASE("uniform corpora rarely yield motifs") {
  int clean = 0;
  const int seeds = 40;
  for (int seed = 0; seed < seeds; ++seed) {
    std::mt19937 rng(static_cast<unsigned>(1000 + seed));
    std::vector<SymbolSequence> seqs(100);
    for (auto& s : seqs) {
      s.resize(100);
      for (auto& x : s) x = std::uniform_int_distribution<int>(0, 5)(rng);
    }
    std::vector<int> orders{2, 3};
    auto t = mine_motifs(seqs, orders, 1e-4);
    clean += std::none_of(t.rows.begin(), t.rows.end(), [](const MotifRow& r) { return r.significant; });
  }
  CHECK(clean >= 38);
}

TEST_CASE("matrix csv layout") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 0.5, 0.5, 0;
  std::vector<std::string> names{"u1", "u,2"};
  std::ostringstream out;
  write_matrix_csv(out, m, names);
  CHECK(out.str() == ",u1,\"u,2\"\nu1,0,0.5\n\"u,2\",0.5,0\n");
}

}  // TEST_SUITE
