#include "dtseq/graph.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <queue>

#include "dtseq/error.hpp"
#include "dtseq/io.hpp"

namespace dtseq {

TransitionGraph::TransitionGraph(std::vector<std::string> labels, std::vector<std::string> platforms)
    : labels_(std::move(labels)), platforms_(std::move(platforms)) {
  platforms_.resize(labels_.size());
}

void TransitionGraph::add(std::size_t from, std::size_t to, std::int64_t weight) {
  if (from >= nodes() || to >= nodes()) throw Error(ErrorKind::InvalidInput, "edge endpoint outside graph");
  if (weight < 1) throw Error(ErrorKind::InvalidInput, "edge weight must be positive");
  edges_[{from, to}] += weight;
}

std::int64_t TransitionGraph::weight(std::size_t from, std::size_t to) const {
  auto it = edges_.find({from, to});
  return it == edges_.end() ? 0 : it->second;
}

std::int64_t TransitionGraph::total_weight() const {
  std::int64_t total = 0;
  for (const auto& [_, w] : edges_) total += w;
  return total;
}

TransitionGraph build_graph(std::span<const SymbolSequence> seqs, const Lexicon& lexicon) {
  std::vector<std::string> labels(lexicon.labels().begin(), lexicon.labels().end());
  std::vector<std::string> platforms;
  for (std::size_t s = 0; s < lexicon.size(); ++s) platforms.push_back(lexicon.decode(static_cast<Symbol>(s)).platform.name());
  TransitionGraph g(std::move(labels), std::move(platforms));
  for (const auto& seq : seqs)
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
      g.add(static_cast<std::size_t>(seq[i]), static_cast<std::size_t>(seq[i + 1]));
  return g;
}

std::vector<double> shortest_distances(const TransitionGraph& graph, std::size_t source) {
  const std::size_t n = graph.nodes();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const auto& [e, w] : graph.edges())
    if (e.first != e.second) adj[e.first].push_back({e.second, 1.0 / static_cast<double>(w)});

  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (auto [v, len] : adj[u])
      if (d + len < dist[v]) {
        dist[v] = d + len;
        queue.push({dist[v], v});
      }
  }
  return dist;
}

std::vector<NodeCentrality> centralities(const TransitionGraph& graph) {
  const std::size_t n = graph.nodes();
  std::vector<NodeCentrality> out(n);
  for (const auto& [e, w] : graph.edges()) {
    out[e.first].out_strength += static_cast<double>(w);
    out[e.second].in_strength += static_cast<double>(w);
  }
  if (n < 2) return out;
  const double others = static_cast<double>(n - 1);
  for (std::size_t u = 0; u < n; ++u) {
    const auto dist = shortest_distances(graph, u);
    double sum = 0.0, harmonic = 0.0;
    std::size_t reach = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (v == u || dist[v] == std::numeric_limits<double>::infinity()) continue;
      sum += dist[v];
      harmonic += 1.0 / dist[v];
      ++reach;
    }
    out[u].reachable = reach;
    out[u].harmonic = harmonic / others;
    if (reach > 0 && sum > 0.0) {
      const double r = static_cast<double>(reach);
      out[u].closeness = (r / others) * (r / sum);
    }
  }
  return out;
}

std::vector<std::vector<double>> symmetrized_adjacency(const TransitionGraph& graph) {
  const std::size_t n = graph.nodes();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& [e, w] : graph.edges()) {
    const auto wd = static_cast<double>(w);
    if (e.first == e.second) {
      a[e.first][e.first] += 2.0 * wd;
    } else {
      a[e.first][e.second] += wd;
      a[e.second][e.first] += wd;
    }
  }
  return a;
}

double modularity(const TransitionGraph& graph, std::span<const int> membership) {
  const auto a = symmetrized_adjacency(graph);
  const std::size_t n = graph.nodes();
  if (membership.size() != n) throw Error(ErrorKind::InvalidInput, "membership size differs from node count");
  std::vector<double> degree(n, 0.0);
  double two_m = 0.0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) degree[u] += a[u][v];
  for (double d : degree) two_m += d;
  if (two_m == 0.0) throw Error(ErrorKind::EmptyGraph, "modularity of an edgeless graph");
  double q = 0.0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (membership[u] == membership[v]) q += a[u][v] - degree[u] * degree[v] / two_m;
  return q / two_m;
}

Communities communities(const TransitionGraph& graph) {
  if (graph.edges().empty()) throw Error(ErrorKind::EmptyGraph, "community detection on an edgeless graph");
  const std::size_t n = graph.nodes();
  auto e = symmetrized_adjacency(graph);
  double two_m = 0.0;
  std::vector<double> a(n, 0.0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) a[u] += e[u][v];
  for (double d : a) two_m += d;
  for (auto& row : e)
    for (double& x : row) x /= two_m;
  for (double& x : a) x /= two_m;

  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::vector<bool> alive(n, true);
  for (;;) {
    double best = 0.0;
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j] || e[i][j] <= 0.0) continue;
        const double dq = 2.0 * (e[i][j] - a[i] * a[j]);
        if (dq > best) {
          best = dq;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n) break;
    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c] || c == bi || c == bj) continue;
      e[bi][c] += e[bj][c];
      e[c][bi] = e[bi][c];
    }
    e[bi][bi] += e[bj][bj] + 2.0 * e[bi][bj];
    a[bi] += a[bj];
    alive[bj] = false;
    parent[bj] = bi;
  }

  Communities out;
  out.membership.resize(n);
  std::vector<int> id(n, -1);
  int next = 0;
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t r = v;
    while (parent[r] != r) r = parent[r];
    if (id[r] < 0) id[r] = next++;
    out.membership[v] = id[r];
  }
  out.count = static_cast<std::size_t>(next);
  out.modularity = modularity(graph, out.membership);
  return out;
}

void write_graph_dot(std::ostream& out, const TransitionGraph& graph, std::span<const int> membership) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  out << "digraph transitions {\n";
  for (std::size_t v = 0; v < graph.nodes(); ++v) {
    out << "  n" << v << " [label=" << quote(graph.label(v)) << ", platform=" << quote(graph.platform(v));
    if (!membership.empty()) out << ", community=" << membership[v];
    out << "];\n";
  }
  for (const auto& [e, w] : graph.edges())
    out << "  n" << e.first << " -> n" << e.second << " [weight=" << w << ", label=\"" << w << "\"];\n";
  out << "}\n";
}

void write_edge_csv(std::ostream& out, const TransitionGraph& graph) {
  out << "src,dst,weight\n";
  for (const auto& [e, w] : graph.edges())
    write_csv_row(out, {graph.label(e.first), graph.label(e.second), std::to_string(w)});
}

}  // namespace dtseq
