// dtseq command-line front end. Every subcommand reads an event log (or
// writes one, for synth), runs one engine and writes its artifacts through
// write_atomic, then prints a one-line JSON summary on stdout.
//
// Exit codes: 0 ok, 2 usage or input error, 3 numerical failure.
// DTSEQ_LOG=quiet|info|debug controls stderr chatter (default info).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtseq/embed.hpp"
#include "dtseq/error.hpp"
#include "dtseq/graph.hpp"
#include "dtseq/hmm.hpp"
#include "dtseq/ingest.hpp"
#include "dtseq/io.hpp"
#include "dtseq/preprocess.hpp"
#include "dtseq/procmine.hpp"
#include "dtseq/seqan.hpp"
#include "dtseq/survival.hpp"
#include "dtseq/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace dtseq;

namespace {

int log_level() {
  static const int level = [] {
    const char* v = std::getenv("DTSEQ_LOG");
    if (!v) return 1;
    const std::string s(v);
    if (s == "quiet" || s == "0") return 0;
    if (s == "debug" || s == "2") return 2;
    return 1;
  }();
  return level;
}

void info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "dtseq: " << msg << '\n';
}

void debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "dtseq: " << msg << '\n';
}

struct Common {
  std::string in;
  std::string out;
  int window = 10;
  std::string level = "activity";
  unsigned threads = 1;
  std::uint64_t seed = 1;
};

IngestResult load(const std::string& path) {
  auto r = read_events(path, format_from_path(path));
  info("read " + std::to_string(r.report.rows_read) + " rows from " + path + ", rejected " +
       std::to_string(r.report.rows_rejected));
  if (r.sequences.empty()) throw Error(ErrorKind::EmptyInput, "no valid events in " + path);
  return r;
}

bool platform_level(const std::string& level) {
  if (level == "platform") return true;
  if (level == "activity") return false;
  throw Error(ErrorKind::ConfigError, "level must be platform or activity, got " + level);
}

std::vector<std::vector<Session>> sessionize(std::span<const UserSequence> seqs, const Common& c) {
  const bool plat = platform_level(c.level);
  std::vector<std::vector<Session>> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) out.push_back(plat ? collapse_platform_sessions(s, c.window) : collapse_sessions(s, c.window));
  return out;
}

SymbolSequence intern_all(Lexicon& lex, std::span<const Session> sessions) {
  SymbolSequence out;
  out.reserve(sessions.size());
  for (const auto& s : sessions) out.push_back(lex.intern(s.descriptor));
  return out;
}

fs::path in_dir(const std::string& dir, const std::string& name) { return fs::path(dir) / name; }

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body, json& files) {
  write_atomic(path, body);
  files.push_back(path.string());
  debug("wrote " + path.string());
}

void write_sessions_csv(std::ostream& out, const std::vector<std::vector<Session>>& users) {
  out << "user_id,platform,activity,start,end,count\n";
  for (const auto& sessions : users)
    for (const auto& s : sessions)
      write_csv_row(out, {s.user_id, s.descriptor.platform.name(), s.descriptor.activity, format_instant(s.start),
                          format_instant(s.end), std::to_string(s.count)});
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const int a = std::stoi(item.substr(0, dash)), b = std::stoi(item.substr(dash + 1));
        for (int k = a; k <= b; ++k) out.push_back(k);
      } else {
        out.push_back(std::stoi(item));
      }
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigError, "bad integer list: " + text);
    }
  }
  if (out.empty()) throw Error(ErrorKind::ConfigError, "empty integer list");
  return out;
}

std::string sanitize(const std::string& name) {
  std::string s = name;
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  return s;
}

// ---- subcommands -------------------------------------------------------

struct SynthArgs {
  std::string multiplicity = "208,67,26,8";
  double median_length = 800.0;
  double sigma = 1.9;
  std::int64_t min_length = 2;
  std::int64_t max_length = 83372;
  double p_stay = 0.9;
  std::string start = "2024-05-01";
  std::string end = "2024-08-01";
};

json run_synth(const Common& c, const SynthArgs& a, json& files) {
  SynthConfig cfg;
  cfg.seed = c.seed;
  auto m = parse_int_list(a.multiplicity);
  if (m.size() != 4) throw Error(ErrorKind::ConfigError, "multiplicity needs four counts");
  cfg.n_users = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    cfg.multiplicity[i] = m[i];
    cfg.n_users += m[i];
  }
  if (!(a.median_length > 0)) throw Error(ErrorKind::ConfigError, "median-length must be positive");
  cfg.length_mu = std::log(a.median_length);
  cfg.length_sigma = a.sigma;
  cfg.min_length = a.min_length;
  cfg.max_length = a.max_length;
  cfg.p_stay = a.p_stay;
  auto s = parse_instant(a.start), e = parse_instant(a.end);
  if (!s || !e) throw Error(ErrorKind::ConfigError, "bad start or end date");
  cfg.start = utc_date(*s);
  cfg.end = utc_date(*e);
  const auto corpus = generate(cfg);
  const auto fmt = format_from_path(c.out);
  write_file(c.out, [&](std::ostream& o) {
    if (fmt == LogFormat::Jsonl) write_events_jsonl(o, corpus);
    else write_events_csv(o, corpus);
  }, files);
  std::int64_t events = 0;
  for (const auto& u : corpus) events += static_cast<std::int64_t>(u.size());
  return {{"users", corpus.size()}, {"events", events}};
}

json report_json(const IngestReport& r) {
  json j;
  j["rows_read"] = r.rows_read;
  j["rows_rejected"] = r.rows_rejected;
  j["users"] = r.users;
  j["events"] = r.accepted();
  j["platform_counts"] = r.platform_counts;
  j["first_event"] = r.min_time ? format_instant(*r.min_time) : "";
  j["last_event"] = r.max_time ? format_instant(*r.max_time) : "";
  j["length_mean"] = r.length_mean;
  j["length_max"] = r.length_max;
  j["length_percentiles"] = {{"p25", r.length_p25}, {"p50", r.length_p50}, {"p75", r.length_p75}, {"p90", r.length_p90}};
  json mult = json::object();
  for (const auto& [k, v] : r.multiplicity) mult[std::to_string(k)] = v;
  j["multiplicity"] = mult;
  return j;
}

IngestReport full_report(const IngestResult& r) {
  IngestReport rep = summarize(r.sequences);
  rep.rows_read = r.report.rows_read;
  rep.rows_rejected = r.report.rows_rejected;
  return rep;
}

json run_ingest(const Common& c, json& files) {
  auto r = load(c.in);
  const auto fmt = format_from_path(c.out);
  write_file(c.out, [&](std::ostream& o) {
    if (fmt == LogFormat::Jsonl) write_events_jsonl(o, r.sequences);
    else write_events_csv(o, r.sequences);
  }, files);
  return report_json(full_report(r));
}

json run_report(const Common& c, json& files) {
  auto r = load(c.in);
  json j = report_json(full_report(r));
  if (!c.out.empty()) write_file(c.out, [&](std::ostream& o) { o << j.dump(2) << '\n'; }, files);
  return j;
}

json run_sessions(const Common& c, json& files) {
  auto r = load(c.in);
  auto users = sessionize(r.sequences, c);
  std::int64_t n = 0;
  for (const auto& u : users) n += static_cast<std::int64_t>(u.size());
  write_file(c.out, [&](std::ostream& o) { write_sessions_csv(o, users); }, files);
  return {{"users", users.size()}, {"sessions", n}};
}

struct SeqArgs {
  double lo = 25.0;
  double hi = 75.0;
  std::string orders = "2,3,4";
  double alpha = 1e-4;
  std::size_t clusters = 20;
  double substitution = 2.0;
  double indel = 1.0;
  bool normalize = true;
};

struct Prepared {
  std::vector<std::string> users;
  std::vector<SymbolSequence> seqs;
  Lexicon lexicon;
};

Prepared prepare_users(const Common& c, const SeqArgs& a) {
  auto r = load(c.in);
  auto users = sessionize(r.sequences, c);
  auto kept = percentile_filter(users, a.lo, a.hi);
  Prepared p{{}, {}, Lexicon(platform_level(c.level) ? LexiconMode::Platform : LexiconMode::PlatformActivity)};
  for (const auto& s : kept) {
    if (s.empty()) continue;
    p.users.push_back(s.front().user_id);
    p.seqs.push_back(intern_all(p.lexicon, s));
  }
  info("kept " + std::to_string(p.seqs.size()) + " of " + std::to_string(users.size()) + " users after percentile filter");
  return p;
}

json run_motifs(const Common& c, const SeqArgs& a, json& files) {
  auto p = prepare_users(c, a);
  auto orders = parse_int_list(a.orders);
  auto table = mine_motifs(p.seqs, orders, a.alpha);
  write_file(c.out, [&](std::ostream& o) { write_motif_csv(o, table, p.lexicon); }, files);
  std::int64_t sig = 0;
  for (const auto& r : table.rows) sig += r.significant;
  return {{"users", p.seqs.size()}, {"ngrams", table.rows.size()}, {"significant", sig}};
}

json run_cluster(const Common& c, const SeqArgs& a, json& files) {
  auto p = prepare_users(c, a);
  CostScheme scheme{a.substitution, a.indel,
                    a.normalize ? CostScheme::Normalization::ByLongerLength : CostScheme::Normalization::None};
  auto d = distance_matrix(p.seqs, scheme, c.threads);
  auto cl = cluster_users(d, a.clusters);
  write_file(in_dir(c.out, "distances.csv"), [&](std::ostream& o) { write_matrix_csv(o, d, p.users); }, files);
  write_file(in_dir(c.out, "clusters.csv"), [&](std::ostream& o) {
    o << "user_id,cluster,length\n";
    for (std::size_t i = 0; i < p.users.size(); ++i)
      write_csv_row(o, {p.users[i], std::to_string(cl.labels[i]), std::to_string(p.seqs[i].size())});
  }, files);
  write_file(in_dir(c.out, "merges.csv"), [&](std::ostream& o) {
    o << "step,a,b,height,size\n";
    for (std::size_t i = 0; i < cl.merges.size(); ++i) {
      const auto& m = cl.merges[i];
      write_csv_row(o, {std::to_string(i + 1), p.users[m.a], p.users[m.b], fmt_double(m.height), std::to_string(m.size)});
    }
  }, files);
  return {{"users", p.users.size()}, {"clusters", a.clusters}};
}

struct SurvivalArgs {
  bool exclude_single = false;
  std::string baseline = "YouTube";
};

json run_survival(const Common& c, const SurvivalArgs& a, json& files) {
  auto r = load(c.in);
  std::vector<std::vector<Session>> users;
  for (const auto& s : r.sequences) users.push_back(collapse_platform_sessions(s, c.window));
  auto d = build_durations(users, a.exclude_single ? SinglePlatformPolicy::Exclude : SinglePlatformPolicy::IncludeCensored);
  if (d.zero_adjusted > 0) info(std::to_string(d.zero_adjusted) + " zero durations raised to one second");
  auto curves = kaplan_meier_by_platform(d.records);
  for (const auto& curve : curves) {
    if (curve.no_events) info("warning: no events for " + curve.group + "; curve is flat");
    write_file(in_dir(c.out, "km_" + sanitize(curve.group) + ".csv"), [&](std::ostream& o) { write_curve_csv(o, curve); },
               files);
  }
  auto fit = cox_fit_platforms(d.records, a.baseline);
  if (!fit.converged) info("warning: Cox fit did not converge; reporting the best iterate");
  write_file(in_dir(c.out, "cox.csv"), [&](std::ostream& o) { write_cox_csv(o, fit); }, files);
  std::int64_t events = 0;
  for (const auto& rec : d.records) events += rec.event_observed;
  json coef = json::object();
  for (std::size_t i = 0; i < fit.names.size(); ++i) coef[fit.names[i]] = fit.coef(static_cast<Eigen::Index>(i));
  return {{"records", d.records.size()}, {"events", events}, {"zero_adjusted", d.zero_adjusted},
          {"converged", fit.converged}, {"coefficients", coef}};
}

struct HmmArgs {
  std::string states = "1-6";
  int restarts = 5;
  int candidates = 10;
  double tolerance = 1e-6;
  int max_iterations = 500;
  double lo = 25.0;
  double hi = 90.0;
};

json run_hmm(const Common& c, const HmmArgs& a, json& files) {
  auto r = load(c.in);
  auto users = sessionize(r.sequences, c);
  Lexicon lex(platform_level(c.level) ? LexiconMode::Platform : LexiconMode::PlatformActivity);
  std::vector<SymbolSequence> days;
  for (const auto& u : users)
    for (const auto& d : split_daily(std::span<const Session>(u))) days.push_back(intern_all(lex, d.sessions));
  auto kept = percentile_filter(days, a.lo, a.hi);
  info("fitting on " + std::to_string(kept.size()) + " of " + std::to_string(days.size()) + " user-days");
  HmmOptions opts;
  opts.seed = c.seed;
  opts.restarts = a.restarts;
  opts.candidates = a.candidates;
  opts.tolerance = a.tolerance;
  opts.max_iterations = a.max_iterations;
  opts.threads = c.threads;
  auto cand = parse_int_list(a.states);
  auto table = select_states(kept, cand, opts, static_cast<int>(lex.size()));
  if (table.disagreement) info("AIC prefers K=" + std::to_string(table.aic_choice) + ", BIC prefers K=" + std::to_string(table.chosen));
  write_file(in_dir(c.out, "selection.csv"), [&](std::ostream& o) { write_selection_csv(o, table); }, files);
  const HmmModel* chosen = nullptr;
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    if (table.rows[i].states == table.chosen) chosen = &table.models[i];
  write_file(in_dir(c.out, "hmm.json"), [&](std::ostream& o) { write_hmm_json(o, *chosen, lex.labels()); }, files);
  return {{"sequences", kept.size()}, {"symbols", lex.size()}, {"chosen_states", table.chosen},
          {"aic_states", table.aic_choice}, {"log_likelihood", chosen->log_likelihood}};
}

json run_network(const Common& c, json& files) {
  auto r = load(c.in);
  auto users = sessionize(r.sequences, c);
  Lexicon lex(platform_level(c.level) ? LexiconMode::Platform : LexiconMode::PlatformActivity);
  std::vector<SymbolSequence> seqs;
  for (const auto& u : users) seqs.push_back(intern_all(lex, u));
  auto g = build_graph(seqs, lex);
  auto comm = communities(g);
  auto cent = centralities(g);
  write_file(in_dir(c.out, "graph.dot"), [&](std::ostream& o) { write_graph_dot(o, g, comm.membership); }, files);
  write_file(in_dir(c.out, "edges.csv"), [&](std::ostream& o) { write_edge_csv(o, g); }, files);
  write_file(in_dir(c.out, "nodes.csv"), [&](std::ostream& o) {
    o << "node,platform,in_strength,out_strength,closeness,harmonic,community\n";
    for (std::size_t v = 0; v < g.nodes(); ++v)
      write_csv_row(o, {g.label(v), g.platform(v), fmt_double(cent[v].in_strength), fmt_double(cent[v].out_strength),
                        fmt_double(cent[v].closeness), fmt_double(cent[v].harmonic), std::to_string(comm.membership[v])});
  }, files);
  return {{"nodes", g.nodes()}, {"edges", g.edges().size()}, {"total_weight", g.total_weight()},
          {"communities", comm.count}, {"modularity", comm.modularity}};
}

struct ProcArgs {
  std::size_t top = 10;
  bool whole_period = false;
};

json run_procmine(const Common& c, const ProcArgs& a, json& files) {
  auto r = load(c.in);
  auto users = sessionize(r.sequences, c);
  auto cases = make_cases(users, {a.whole_period ? TimeWindow::Kind::WholePeriod : TimeWindow::Kind::Daily});
  auto dfg = build_dfg(cases);
  auto variants = top_variants(cases, a.top);
  auto top_cases = filter_cases(cases, variants);
  auto times = transition_time_matrix(cases);
  write_file(in_dir(c.out, "dfg.dot"), [&](std::ostream& o) { write_dfg_dot(o, dfg); }, files);
  write_file(in_dir(c.out, "dfg_top.dot"), [&](std::ostream& o) { write_dfg_dot(o, build_dfg(top_cases)); }, files);
  write_file(in_dir(c.out, "variants.csv"), [&](std::ostream& o) { write_variants_csv(o, variants); }, files);
  write_file(in_dir(c.out, "transition_times.csv"), [&](std::ostream& o) { write_transition_times_csv(o, times); }, files);
  std::int64_t covered = 0;
  for (const auto& v : variants.rows) covered += v.cases;
  return {{"cases", dfg.cases}, {"nodes", dfg.nodes.size()}, {"edges", dfg.edges.size()},
          {"variants", variants.rows.size()}, {"top_cases", covered}};
}

struct EmbedArgs {
  SgnsConfig sgns;
  std::size_t neighbors = 10;
};

json run_embed(const Common& c, EmbedArgs a, json& files) {
  auto r = load(c.in);
  auto corpus = build_corpus(r.sequences);
  a.sgns.seed = c.seed;
  SgnsTrainer trainer(corpus.sentences, a.sgns);
  double loss = 0.0;
  for (int e = 0; e < a.sgns.epochs; ++e) {
    loss = trainer.epoch();
    debug("epoch " + std::to_string(e + 1) + " loss " + fmt_double(loss));
  }
  const auto& space = trainer.space();
  write_file(in_dir(c.out, "embeddings.txt"), [&](std::ostream& o) { write_embeddings_text(o, space); }, files);
  write_file(in_dir(c.out, "neighbors.csv"), [&](std::ostream& o) {
    o << "token,rank,neighbor,cosine\n";
    for (std::size_t i = 0; i < space.size(); ++i) {
      auto nb = neighbors(space, space.token(i), a.neighbors);
      for (std::size_t k = 0; k < nb.size(); ++k)
        write_csv_row(o, {space.token(i), std::to_string(k + 1), nb[k].token, fmt_double(nb[k].cosine)});
    }
  }, files);
  std::size_t empty = 0;
  write_file(in_dir(c.out, "trajectories.csv"), [&](std::ostream& o) {
    o << "user_id,entropy_bits,radius_of_gyration,tokens,dropped\n";
    for (std::size_t u = 0; u < corpus.sentences.size(); ++u) {
      try {
        auto t = trajectory_metrics(space, corpus.sentences[u], r.sequences[u].user_id());
        write_csv_row(o, {t.user_id, fmt_double(t.entropy_bits), fmt_double(t.radius_of_gyration), std::to_string(t.tokens),
                          std::to_string(t.dropped)});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::EmptyTrajectory) throw;
        ++empty;
      }
    }
  }, files);
  if (empty > 0) info(std::to_string(empty) + " users have no in-vocabulary tokens");
  return {{"vocabulary", space.size()}, {"dimensions", space.dimensions()}, {"final_loss", loss}};
}

EmbeddingSpace read_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  std::size_t v = 0;
  int d = 0;
  if (!(in >> v >> d) || d <= 0) throw Error(ErrorKind::InvalidInput, "bad embeddings header in " + path);
  std::vector<std::string> tokens(v);
  EmbeddingSpace::Matrix m(static_cast<Eigen::Index>(v), d);
  for (std::size_t i = 0; i < v; ++i) {
    if (!(in >> tokens[i])) throw Error(ErrorKind::InvalidInput, "truncated embeddings file " + path);
    for (int j = 0; j < d; ++j) {
      std::string num;
      if (!(in >> num)) throw Error(ErrorKind::InvalidInput, "truncated embeddings file " + path);
      m(static_cast<Eigen::Index>(i), j) = std::strtod(num.c_str(), nullptr);
    }
  }
  EmbeddingSpace space(tokens, std::vector<std::int64_t>(v, 0), d);
  space.input = m;
  return space;
}

struct ProjectArgs {
  std::string embeddings;
  std::string method = "tsne";
  TsneConfig tsne;
};

json run_project(const Common& c, const ProjectArgs& a, json& files) {
  auto space = read_embeddings(a.embeddings);
  std::map<std::string, TokenInfo> info_map;
  if (!c.in.empty()) {
    auto r = load(c.in);
    for (auto& [tok, ti] : build_corpus(r.sequences).info) {
      std::string t = tok;
      std::replace_if(t.begin(), t.end(), [](char ch) { return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r'; }, '_');
      info_map.try_emplace(t, ti);
    }
  }
  ProjectionMethod method;
  if (a.method == "tsne") method = ProjectionMethod::Tsne;
  else if (a.method == "pca") method = ProjectionMethod::Pca;
  else throw Error(ErrorKind::ConfigError, "method must be tsne or pca");
  Eigen::MatrixXd pts = space.input;
  auto proj = project_2d(pts, method, a.tsne);
  write_file(c.out, [&](std::ostream& o) { write_projection_csv(o, space, proj.coords, info_map); }, files);
  return {{"points", space.size()}, {"method", proj.method == ProjectionMethod::Tsne ? "tsne" : "pca"},
          {"fell_back", proj.fell_back}, {"perplexity", proj.perplexity}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequence analysis toolkit for multi-platform digital trace logs"};
  app.set_config("--config", "", "Key-value run configuration; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  app.add_option("--threads", c.threads, "Worker threads for distance matrices and HMM restarts")->capture_default_str();

  auto add_in = [&](CLI::App* s, bool required = true) {
    auto* o = s->add_option("--in", c.in, "Event log (.csv or .jsonl)");
    if (required) o->required();
  };
  auto add_out = [&](CLI::App* s, const char* what) { s->add_option("--out", c.out, what)->required(); };
  auto add_window = [&](CLI::App* s) {
    s->add_option("--window", c.window, "Session window in minutes")->capture_default_str()->check(CLI::PositiveNumber);
  };
  auto add_level = [&](CLI::App* s) {
    s->add_option("--level", c.level, "Symbol level")->capture_default_str()->check(CLI::IsMember({"activity", "platform"}));
  };
  auto add_seed = [&](CLI::App* s) { s->add_option("--seed", c.seed, "Random seed")->capture_default_str(); };

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic multi-platform event log");
  add_out(synth, "Output log (.csv or .jsonl)");
  add_seed(synth);
  synth->add_option("--multiplicity", synth_args.multiplicity, "Users donating 1,2,3,4 platforms")->capture_default_str();
  synth->add_option("--median-length", synth_args.median_length, "Median events per user")->capture_default_str();
  synth->add_option("--sigma", synth_args.sigma, "Log-normal length spread")->capture_default_str();
  synth->add_option("--min-length", synth_args.min_length)->capture_default_str();
  synth->add_option("--max-length", synth_args.max_length)->capture_default_str();
  synth->add_option("--p-stay", synth_args.p_stay, "Probability the next event stays on the platform")->capture_default_str();
  synth->add_option("--start", synth_args.start, "First day (UTC)")->capture_default_str();
  synth->add_option("--end", synth_args.end, "Day after the last (UTC)")->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Validate and normalize an event log");
  add_in(ingest);
  add_out(ingest, "Normalized log (.csv or .jsonl)");

  auto* report = app.add_subcommand("report", "Descriptive summary of an event log");
  add_in(report);
  report->add_option("--out", c.out, "Also write the summary JSON here");

  auto* sessions = app.add_subcommand("sessions", "Collapse repeated activities into sessions");
  add_in(sessions);
  add_out(sessions, "Sessions CSV");
  add_window(sessions);
  add_level(sessions);

  SeqArgs seq_args;
  auto add_band = [&](CLI::App* s) {
    s->add_option("--lo", seq_args.lo, "Lower length percentile kept")->capture_default_str();
    s->add_option("--hi", seq_args.hi, "Upper length percentile kept")->capture_default_str();
  };
  auto* motifs = app.add_subcommand("motifs", "Over-represented n-grams of session sequences");
  add_in(motifs);
  add_out(motifs, "Motif CSV");
  add_window(motifs);
  add_level(motifs);
  add_band(motifs);
  motifs->add_option("--orders", seq_args.orders, "N-gram orders")->capture_default_str();
  motifs->add_option("--alpha", seq_args.alpha, "Family-wise significance level")->capture_default_str();

  auto* cluster = app.add_subcommand("cluster", "Optimal-matching distances and average-linkage clusters");
  add_in(cluster);
  add_out(cluster, "Output directory");
  add_window(cluster);
  add_level(cluster);
  add_band(cluster);
  cluster->add_option("-k,--clusters", seq_args.clusters, "Number of clusters")->capture_default_str();
  cluster->add_option("--substitution", seq_args.substitution)->capture_default_str();
  cluster->add_option("--indel", seq_args.indel)->capture_default_str();
  cluster->add_flag("!--no-normalize", seq_args.normalize, "Use raw edit costs");

  SurvivalArgs surv_args;
  auto* survival = app.add_subcommand("survival", "Time until platform switch: Kaplan-Meier and Cox");
  add_in(survival);
  add_out(survival, "Output directory");
  add_window(survival);
  survival->add_flag("--exclude-single", surv_args.exclude_single, "Drop single-platform users");
  survival->add_option("--baseline", surv_args.baseline, "Reference platform for the Cox model")->capture_default_str();

  HmmArgs hmm_args;
  auto* hmm = app.add_subcommand("hmm", "Hidden Markov models of daily session sequences");
  add_in(hmm);
  add_out(hmm, "Output directory");
  add_window(hmm);
  add_level(hmm);
  add_seed(hmm);
  hmm->add_option("--states", hmm_args.states, "Candidate state counts, e.g. 1-6 or 2,4")->capture_default_str();
  hmm->add_option("--restarts", hmm_args.restarts)->capture_default_str();
  hmm->add_option("--candidates", hmm_args.candidates, "Random starts screened per restart")->capture_default_str();
  hmm->add_option("--tolerance", hmm_args.tolerance, "Stop when the log-likelihood gain falls below this")->capture_default_str();
  hmm->add_option("--max-iterations", hmm_args.max_iterations)->capture_default_str();
  hmm->add_option("--lo", hmm_args.lo)->capture_default_str();
  hmm->add_option("--hi", hmm_args.hi)->capture_default_str();

  auto* network = app.add_subcommand("network", "Transition graph, centralities and communities");
  add_in(network);
  add_out(network, "Output directory");
  add_window(network);
  add_level(network);

  ProcArgs proc_args;
  auto* procmine = app.add_subcommand("procmine", "Directly-follows graph, variants and transition times");
  add_in(procmine);
  add_out(procmine, "Output directory");
  add_window(procmine);
  add_level(procmine);
  procmine->add_option("--top", proc_args.top, "Number of variants kept")->capture_default_str();
  procmine->add_flag("--whole-period", proc_args.whole_period, "One case per user instead of per user-day");

  EmbedArgs emb_args;
  auto* embed = app.add_subcommand("embed", "Skip-gram embeddings of synthetic words");
  add_in(embed);
  add_out(embed, "Output directory");
  add_seed(embed);
  embed->add_option("--dimensions", emb_args.sgns.dimensions)->capture_default_str();
  embed->add_option("--context", emb_args.sgns.window, "Context window")->capture_default_str();
  embed->add_option("--negatives", emb_args.sgns.negatives)->capture_default_str();
  embed->add_option("--epochs", emb_args.sgns.epochs)->capture_default_str();
  embed->add_option("--learning-rate", emb_args.sgns.learning_rate)->capture_default_str();
  embed->add_option("--min-count", emb_args.sgns.min_count)->capture_default_str();
  embed->add_option("--neighbors", emb_args.neighbors, "Neighbours listed per token")->capture_default_str();

  ProjectArgs proj_args;
  auto* project = app.add_subcommand("project", "2-D projection of an embeddings file");
  project->add_option("--embeddings", proj_args.embeddings, "Embeddings text file")->required();
  add_in(project, false);
  add_out(project, "Coordinates CSV");
  project->add_option("--method", proj_args.method)->capture_default_str()->check(CLI::IsMember({"tsne", "pca"}));
  project->add_option("--perplexity", proj_args.tsne.perplexity)->capture_default_str();
  project->add_option("--iterations", proj_args.tsne.iterations)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  json files = json::array();
  json summary;
  summary["command"] = name;
  try {
    json result;
    if (name == "synth") result = run_synth(c, synth_args, files);
    else if (name == "ingest") result = run_ingest(c, files);
    else if (name == "report") result = run_report(c, files);
    else if (name == "sessions") result = run_sessions(c, files);
    else if (name == "motifs") result = run_motifs(c, seq_args, files);
    else if (name == "cluster") result = run_cluster(c, seq_args, files);
    else if (name == "survival") result = run_survival(c, surv_args, files);
    else if (name == "hmm") result = run_hmm(c, hmm_args, files);
    else if (name == "network") result = run_network(c, files);
    else if (name == "procmine") result = run_procmine(c, proc_args, files);
    else if (name == "embed") result = run_embed(c, emb_args, files);
    else if (name == "project") result = run_project(c, proj_args, files);
    summary["status"] = "ok";
    summary.update(result);
    summary["outputs"] = files;
    std::cout << summary.dump() << std::endl;
    return 0;
  } catch (const Error& e) {
    summary["status"] = "error";
    summary["kind"] = to_string(e.kind());
    summary["message"] = e.what();
    std::cerr << "dtseq " << name << ": " << e.what() << '\n';
    std::cout << summary.dump() << std::endl;
    return e.numerical() ? 3 : 2;
  } catch (const std::exception& e) {
    summary["status"] = "error";
    summary["kind"] = "InvalidInput";
    summary["message"] = e.what();
    std::cerr << "dtseq " << name << ": " << e.what() << '\n';
    std::cout << summary.dump() << std::endl;
    return 2;
  }
}
