#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dtseq/model.hpp"

namespace dtseq {

/// Directed adjacency counts between lexicon symbols.
class TransitionGraph {
 public:
  TransitionGraph() = default;
  TransitionGraph(std::vector<std::string> labels, std::vector<std::string> platforms);

  std::size_t nodes() const { return labels_.size(); }
  const std::string& label(std::size_t v) const { return labels_[v]; }
  const std::string& platform(std::size_t v) const { return platforms_[v]; }

  void add(std::size_t from, std::size_t to, std::int64_t weight = 1);

  /// Edges keyed by (from, to), iterated in ascending order.
  const std::map<std::pair<std::size_t, std::size_t>, std::int64_t>& edges() const { return edges_; }
  std::int64_t weight(std::size_t from, std::size_t to) const;
  std::int64_t total_weight() const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::string> platforms_;
  std::map<std::pair<std::size_t, std::size_t>, std::int64_t> edges_;
};

/// Every consecutive pair within a sequence adds one to from -> to. Nodes are
/// all lexicon symbols.
TransitionGraph build_graph(std::span<const SymbolSequence> seqs, const Lexicon& lexicon);

struct NodeCentrality {
  double in_strength = 0.0;
  double out_strength = 0.0;
  /// (reachable / (n-1)) * (reachable / sum of distances); equals
  /// (n-1) / sum of distances when every node is reachable.
  double closeness = 0.0;
  /// Sum of 1/distance over reachable nodes, divided by n-1.
  double harmonic = 0.0;
  std::size_t reachable = 0;
};

/// Dijkstra from `source` with edge length 1/weight; unreachable = +inf.
std::vector<double> shortest_distances(const TransitionGraph& graph, std::size_t source);

std::vector<NodeCentrality> centralities(const TransitionGraph& graph);

struct Communities {
  /// Community id per node, numbered by smallest member.
  std::vector<int> membership;
  std::size_t count = 0;
  double modularity = 0.0;
};

/// Symmetrized adjacency: A[u][v] = w(u,v) + w(v,u) for u != v; a self-loop
/// contributes 2 * w(u,u) to A[u][u].
std::vector<std::vector<double>> symmetrized_adjacency(const TransitionGraph& graph);

/// Newman modularity of `membership` on the symmetrized graph.
double modularity(const TransitionGraph& graph, std::span<const int> membership);

/// Clauset-Newman-Moore greedy agglomeration on the symmetrized graph:
/// merge the connected pair with the largest modularity gain while it is
/// positive, ties to the lowest pair. Throws EmptyGraph without edges.
Communities communities(const TransitionGraph& graph);

void write_graph_dot(std::ostream& out, const TransitionGraph& graph, std::span<const int> membership = {});
void write_edge_csv(std::ostream& out, const TransitionGraph& graph);

}  // namespace dtseq
