#include "dtseq/seqan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include "dtseq/error.hpp"
#include "dtseq/io.hpp"
#include "dtseq/stats.hpp"

namespace dtseq {

void CostScheme::validate() const {
  if (!(substitution > 0.0) || !(indel > 0.0)) throw Error(ErrorKind::ConfigError, "OM costs must be positive");
  if (substitution > 2.0 * indel) throw Error(ErrorKind::ConfigError, "substitution cost exceeds two indels");
}

double om_distance(std::span<const Symbol> a, std::span<const Symbol> b, const CostScheme& scheme) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyInput, "OM distance of an empty sequence");
  scheme.validate();
  const std::size_t n = a.size(), m = b.size();
  std::vector<double> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<double>(j) * scheme.indel;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<double>(i) * scheme.indel;
    for (std::size_t j = 1; j <= m; ++j) {
      const double sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0.0 : scheme.substitution);
      cur[j] = std::min({sub, prev[j] + scheme.indel, cur[j - 1] + scheme.indel});
    }
    std::swap(prev, cur);
  }
  double d = prev[m];
  if (scheme.normalization == CostScheme::Normalization::ByLongerLength)
    d /= scheme.indel * static_cast<double>(std::max(n, m));
  return d;
}

Eigen::MatrixXd distance_matrix(std::span<const SymbolSequence> seqs, const CostScheme& scheme, unsigned threads) {
  const auto n = static_cast<Eigen::Index>(seqs.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  auto rows = [&](Eigen::Index begin, Eigen::Index step) {
    for (Eigen::Index i = begin; i < n; i += step)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double v = om_distance(seqs[static_cast<std::size_t>(i)], seqs[static_cast<std::size_t>(j)], scheme);
        d(i, j) = v;
        d(j, i) = v;
      }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    rows(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(rows, static_cast<Eigen::Index>(t), threads);
    for (auto& th : pool) th.join();
  }
  return d;
}

Clustering cluster_users(const Eigen::MatrixXd& distances, std::size_t k) {
  if (distances.rows() != distances.cols()) throw Error(ErrorKind::InvalidInput, "distance matrix is not square");
  const auto n = static_cast<std::size_t>(distances.rows());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (distances(ii, ii) != 0.0) throw Error(ErrorKind::InvalidInput, "distance matrix diagonal is not zero");
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      if (distances(ii, jj) != distances(jj, ii)) throw Error(ErrorKind::InvalidInput, "distance matrix is not symmetric");
    }
  }
  if (k < 1 || k > n) throw Error(ErrorKind::ConfigError, "cluster count must lie in [1, n]");

  // Cluster c is alive while rep[c] == c; rep is the smallest member index.
  Eigen::MatrixXd d = distances;
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> alive(n, true);
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;

  Clustering out;
  std::size_t clusters = n;
  while (clusters > k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        const double v = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    // Lance-Williams update for average linkage; bi survives as the merged cluster.
    const double wi = static_cast<double>(size[bi]), wj = static_cast<double>(size[bj]);
    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c] || c == bi || c == bj) continue;
      const auto cc = static_cast<Eigen::Index>(c);
      const double v = (wi * d(cc, static_cast<Eigen::Index>(bi)) + wj * d(cc, static_cast<Eigen::Index>(bj))) / (wi + wj);
      d(cc, static_cast<Eigen::Index>(bi)) = v;
      d(static_cast<Eigen::Index>(bi), cc) = v;
    }
    size[bi] += size[bj];
    alive[bj] = false;
    parent[bj] = bi;
    out.merges.push_back({bi, bj, best, size[bi]});
    --clusters;
  }

  auto root = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i];
    return i;
  };
  std::map<std::size_t, int> ids;
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = root(i);
    auto it = ids.find(r);
    if (it == ids.end()) it = ids.emplace(r, static_cast<int>(ids.size())).first;
    out.labels[i] = it->second;
  }
  return out;
}

MotifTable mine_motifs(std::span<const SymbolSequence> seqs, std::span<const int> orders, double alpha) {
  for (int order : orders)
    if (order < 2) throw Error(ErrorKind::ConfigError, "motif order must be at least 2");

  std::map<Symbol, std::int64_t> marginal;
  std::int64_t total = 0;
  for (const auto& s : seqs)
    for (Symbol x : s) {
      ++marginal[x];
      ++total;
    }

  MotifTable table;
  for (int order : orders) {
    const auto n = static_cast<std::size_t>(order);
    std::map<std::vector<Symbol>, std::int64_t> counts;
    std::int64_t slots = 0;
    for (const auto& s : seqs) {
      if (s.size() < n) continue;
      for (std::size_t i = 0; i + n <= s.size(); ++i) {
        ++counts[std::vector<Symbol>(s.begin() + static_cast<std::ptrdiff_t>(i),
                                     s.begin() + static_cast<std::ptrdiff_t>(i + n))];
        ++slots;
      }
    }
    const auto tests = static_cast<std::int64_t>(counts.size());
    std::vector<MotifRow> rows;
    for (const auto& [gram, observed] : counts) {
      double p = 1.0;
      for (Symbol x : gram) p *= static_cast<double>(marginal[x]) / static_cast<double>(total);
      MotifRow row;
      row.order = order;
      row.ngram = gram;
      row.observed = observed;
      row.expected = static_cast<double>(slots) * p;
      row.p_value = stats::binomial_upper_tail(observed, slots, p);
      row.adjusted_p = std::min(1.0, row.p_value * static_cast<double>(tests));
      row.significant = row.adjusted_p < alpha;
      rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const MotifRow& a, const MotifRow& b) { return a.observed > b.observed; });
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    table.orders.push_back(order);
    table.slots.push_back(slots);
    table.tests.push_back(tests);
  }
  return table;
}

void write_motif_csv(std::ostream& out, const MotifTable& table, const Lexicon& lexicon) {
  out << "order,subsequence,observed,expected,p_value,adjusted_p,significant\n";
  for (const auto& r : table.rows) {
    std::string gram;
    for (std::size_t i = 0; i < r.ngram.size(); ++i) {
      if (i) gram += " > ";
      gram += lexicon.label(r.ngram[i]);
    }
    write_csv_row(out, {std::to_string(r.order), gram, std::to_string(r.observed), fmt_double(r.expected),
                        fmt_double(r.p_value), fmt_double(r.adjusted_p), r.significant ? "true" : "false"});
  }
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m, std::span<const std::string> names) {
  std::vector<std::string> header{""};
  header.insert(header.end(), names.begin(), names.end());
  write_csv_row(out, header);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row{names[static_cast<std::size_t>(i)]};
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(fmt_double(m(i, j)));
    write_csv_row(out, row);
  }
}

}  // namespace dtseq
