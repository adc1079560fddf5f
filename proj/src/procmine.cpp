#include "dtseq/procmine.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>

#include "dtseq/error.hpp"
#include "dtseq/io.hpp"
#include "dtseq/preprocess.hpp"

namespace dtseq {

namespace {

double gap_seconds(const Session& prev, const Session& next) {
  return static_cast<double>((next.start - prev.end).count());
}

}  // namespace

std::vector<Case> make_cases(std::span<const std::vector<Session>> sessions_per_user, TimeWindow window) {
  std::vector<Case> out;
  for (const auto& sessions : sessions_per_user) {
    if (sessions.empty()) continue;
    if (window.kind == TimeWindow::Kind::WholePeriod) {
      out.push_back({sessions.front().user_id, sessions});
      continue;
    }
    for (auto& day : split_daily(std::span<const Session>(sessions)))
      out.push_back({day.user_id + "/" + format_date(day.date), std::move(day.sessions)});
  }
  return out;
}

DirectlyFollowsGraph build_dfg(std::span<const Case> cases) {
  if (cases.empty()) throw Error(ErrorKind::EmptyInput, "no cases to mine");
  DirectlyFollowsGraph g;
  auto edge = [&](const std::string& a, const std::string& b) -> EdgeStats& { return g.edges[{a, b}]; };
  for (const auto& c : cases) {
    if (c.steps.empty()) continue;
    ++g.cases;
    ++g.nodes[kStartNode];
    ++g.nodes[kEndNode];
    std::string prev_label = c.steps.front().descriptor.label();
    ++g.nodes[prev_label];
    ++edge(kStartNode, prev_label).frequency;
    for (std::size_t i = 1; i < c.steps.size(); ++i) {
      const Session& a = c.steps[i - 1];
      const Session& b = c.steps[i];
      const std::string label = b.descriptor.label();
      ++g.nodes[label];
      if (a.descriptor.platform != b.descriptor.platform) {
        ++g.nodes[kSwitchNode];
        ++edge(prev_label, kSwitchNode).frequency;
        ++edge(kSwitchNode, label).frequency;
        auto& st = g.switch_times[{a.descriptor.platform.name(), b.descriptor.platform.name()}];
        ++st.frequency;
        ++st.timed;
        st.total_seconds += gap_seconds(a, b);
      } else {
        auto& st = edge(prev_label, label);
        ++st.frequency;
        ++st.timed;
        st.total_seconds += gap_seconds(a, b);
      }
      prev_label = label;
    }
    ++edge(prev_label, kEndNode).frequency;
  }
  if (g.cases == 0) throw Error(ErrorKind::EmptyInput, "all cases are empty");
  return g;
}

TransitionTimes transition_time_matrix(std::span<const Case> cases, std::vector<std::string> platforms) {
  if (platforms.empty()) {
    std::set<std::string> seen;
    for (const auto& c : cases)
      for (const auto& s : c.steps) seen.insert(s.descriptor.platform.name());
    platforms.assign(seen.begin(), seen.end());
  }
  const std::size_t p = platforms.size();
  std::vector<std::vector<double>> sums(p, std::vector<double>(p, 0.0));
  TransitionTimes out;
  out.counts.assign(p, std::vector<std::int64_t>(p, 0));
  auto index = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(platforms.begin(), platforms.end(), name);
    if (it == platforms.end()) return std::nullopt;
    return static_cast<std::size_t>(it - platforms.begin());
  };
  for (const auto& c : cases)
    for (std::size_t k = 1; k < c.steps.size(); ++k) {
      auto i = index(c.steps[k - 1].descriptor.platform.name());
      auto j = index(c.steps[k].descriptor.platform.name());
      if (!i || !j) continue;
      sums[*i][*j] += gap_seconds(c.steps[k - 1], c.steps[k]);
      ++out.counts[*i][*j];
    }
  out.mean_seconds.assign(p, std::vector<std::optional<double>>(p));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      if (out.counts[i][j] > 0) out.mean_seconds[i][j] = sums[i][j] / static_cast<double>(out.counts[i][j]);
  out.platforms = std::move(platforms);
  return out;
}

std::vector<std::string> activity_path(const Case& c) {
  std::vector<std::string> path;
  path.reserve(c.steps.size());
  for (const auto& s : c.steps) path.push_back(s.descriptor.label());
  return path;
}

VariantTable top_variants(std::span<const Case> cases, std::size_t k) {
  if (k < 1) throw Error(ErrorKind::ConfigError, "top-k needs k >= 1");
  std::map<std::vector<std::string>, std::int64_t> counts;
  VariantTable table;
  for (const auto& c : cases) {
    if (c.steps.empty()) continue;
    ++counts[activity_path(c)];
    ++table.total_cases;
  }
  for (auto& [path, n] : counts) table.rows.push_back({path, n});
  // std::map iteration is already lexicographic, so a stable sort on count suffices.
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const Variant& a, const Variant& b) { return a.cases > b.cases; });
  if (table.rows.size() > k) table.rows.resize(k);
  return table;
}

std::vector<Case> filter_cases(std::span<const Case> cases, const VariantTable& variants) {
  std::set<std::vector<std::string>> keep;
  for (const auto& v : variants.rows) keep.insert(v.path);
  std::vector<Case> out;
  for (const auto& c : cases)
    if (keep.count(activity_path(c))) out.push_back(c);
  return out;
}

namespace {

std::string human_seconds(double s) {
  char buf[32];
  if (s < 60.0) std::snprintf(buf, sizeof buf, "%.0fs", s);
  else if (s < 3600.0) std::snprintf(buf, sizeof buf, "%.1fm", s / 60.0);
  else std::snprintf(buf, sizeof buf, "%.1fh", s / 3600.0);
  return buf;
}

std::string dot_quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c;
  }
  return q + "\"";
}

}  // namespace

void write_dfg_dot(std::ostream& out, const DirectlyFollowsGraph& dfg) {
  out << "digraph dfg {\n  rankdir=LR;\n";
  for (const auto& [name, freq] : dfg.nodes) {
    const bool artificial = name == kStartNode || name == kEndNode || name == kSwitchNode;
    out << "  " << dot_quote(name) << " [label=" << dot_quote(name + " (" + std::to_string(freq) + ")")
        << (artificial ? ", shape=box" : "") << "];\n";
  }
  for (const auto& [e, st] : dfg.edges) {
    std::string label = std::to_string(st.frequency);
    if (auto m = st.mean_seconds()) label += " / " + human_seconds(*m);
    out << "  " << dot_quote(e.first) << " -> " << dot_quote(e.second) << " [label=" << dot_quote(label) << "];\n";
  }
  out << "}\n";
}

void write_variants_csv(std::ostream& out, const VariantTable& table) {
  out << "rank,path,cases\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::string path;
    for (std::size_t j = 0; j < table.rows[i].path.size(); ++j) {
      if (j) path += " > ";
      path += table.rows[i].path[j];
    }
    write_csv_row(out, {std::to_string(i + 1), path, std::to_string(table.rows[i].cases)});
  }
}

void write_transition_times_csv(std::ostream& out, const TransitionTimes& times) {
  out << "from,to,mean_seconds,transitions\n";
  for (std::size_t i = 0; i < times.platforms.size(); ++i)
    for (std::size_t j = 0; j < times.platforms.size(); ++j) {
      const auto& m = times.mean_seconds[i][j];
      write_csv_row(out, {times.platforms[i], times.platforms[j], m ? fmt_double(*m) : "NA",
                          std::to_string(times.counts[i][j])});
    }
}

}  // namespace dtseq
