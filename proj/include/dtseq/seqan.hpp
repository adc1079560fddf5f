#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dtseq/model.hpp"

namespace dtseq {

struct CostScheme {
  enum class Normalization { None, ByLongerLength };

  double substitution = 2.0;
  double indel = 1.0;
  Normalization normalization = Normalization::ByLongerLength;

  /// Throws ConfigError unless costs are positive and sub <= 2 * indel.
  void validate() const;
};

/// Optimal-matching edit distance with constant costs. With ByLongerLength
/// the raw cost is divided by indel * max(|a|, |b|).
double om_distance(std::span<const Symbol> a, std::span<const Symbol> b, const CostScheme& scheme = {});

/// Pairwise OM distances; `threads` > 1 splits rows across workers.
Eigen::MatrixXd distance_matrix(std::span<const SymbolSequence> seqs, const CostScheme& scheme = {},
                                unsigned threads = 1);

struct Merge {
  std::size_t a;  // representative (smallest member) of each side
  std::size_t b;
  double height;
  std::size_t size;
};

struct Clustering {
  /// Cluster id per item, numbered 0..k-1 by smallest member.
  std::vector<int> labels;
  std::vector<Merge> merges;
};

/// Average-linkage agglomeration stopped at `k` clusters. Ties pick the
/// lowest (i, j) pair. Throws InvalidInput for non-square, asymmetric or
/// non-zero-diagonal input, ConfigError for k outside [1, n].
Clustering cluster_users(const Eigen::MatrixXd& distances, std::size_t k);

struct MotifRow {
  int order = 0;
  std::vector<Symbol> ngram;
  std::int64_t observed = 0;
  double expected = 0.0;
  double p_value = 1.0;
  double adjusted_p = 1.0;
  bool significant = false;
};

struct MotifTable {
  std::vector<MotifRow> rows;
  /// Number of n-gram slots per order, same order as `orders`.
  std::vector<int> orders;
  std::vector<std::int64_t> slots;
  std::vector<std::int64_t> tests;
};

/// Contiguous within-sequence n-grams tested against the product of symbol
/// marginals with a one-sided exact binomial test and Bonferroni correction
/// over the distinct n-grams of each order. Rows: by order, then observed
/// count descending, then n-gram. Throws ConfigError for order < 2.
MotifTable mine_motifs(std::span<const SymbolSequence> seqs, std::span<const int> orders, double alpha = 1e-4);

void write_motif_csv(std::ostream& out, const MotifTable& table, const Lexicon& lexicon);
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m, std::span<const std::string> names);

}  // namespace dtseq
