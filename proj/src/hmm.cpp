#include "dtseq/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "dtseq/error.hpp"

namespace dtseq {

namespace {

/// Flat row-major working copy of a model for the inner loops.
struct Params {
  std::size_t k = 0, m = 0;
  std::vector<double> pi;     // k
  std::vector<double> a;      // k*k, a[i*k+j]
  std::vector<double> b_t;    // m*k, emission transposed: b_t[o*k+i]

  explicit Params(const HmmModel& model)
      : k(static_cast<std::size_t>(model.states())), m(static_cast<std::size_t>(model.symbols())),
        pi(k), a(k * k), b_t(m * k) {
    for (std::size_t i = 0; i < k; ++i) {
      pi[i] = model.initial(static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < k; ++j) a[i * k + j] = model.transition(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      for (std::size_t o = 0; o < m; ++o) b_t[o * k + i] = model.emission(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o));
    }
  }
};

struct Accumulator {
  std::vector<double> pi, trans, emit;  // emit is k*m row-major
  double log_likelihood = 0.0;

  Accumulator(std::size_t k, std::size_t m) : pi(k, 0.0), trans(k * k, 0.0), emit(k * m, 0.0) {}
};

/// Scaled forward-backward over one sequence, adding expected counts.
void expect(const Params& p, std::span<const Symbol> obs, Accumulator& acc, std::vector<double>& alpha,
            std::vector<double>& beta, std::vector<double>& scale, bool counts) {
  const std::size_t k = p.k, n = obs.size();
  alpha.assign(n * k, 0.0);
  scale.assign(n, 0.0);

  {
    const double* b = &p.b_t[static_cast<std::size_t>(obs[0]) * k];
    double c = 0.0;
    for (std::size_t i = 0; i < k; ++i) c += alpha[i] = p.pi[i] * b[i];
    scale[0] = c;
    for (std::size_t i = 0; i < k; ++i) alpha[i] /= c;
  }
  for (std::size_t t = 1; t < n; ++t) {
    const double* prev = &alpha[(t - 1) * k];
    double* cur = &alpha[t * k];
    const double* b = &p.b_t[static_cast<std::size_t>(obs[t]) * k];
    for (std::size_t i = 0; i < k; ++i) {
      const double ai = prev[i];
      const double* row = &p.a[i * k];
      for (std::size_t j = 0; j < k; ++j) cur[j] += ai * row[j];
    }
    double c = 0.0;
    for (std::size_t j = 0; j < k; ++j) c += cur[j] *= b[j];
    scale[t] = c;
    for (std::size_t j = 0; j < k; ++j) cur[j] /= c;
  }
  for (std::size_t t = 0; t < n; ++t) acc.log_likelihood += std::log(scale[t]);
  if (!counts) return;

  beta.assign(n * k, 0.0);
  std::fill(beta.begin() + static_cast<std::ptrdiff_t>((n - 1) * k), beta.end(), 1.0);
  std::vector<double> tmp(k);
  for (std::size_t t = n - 1; t-- > 0;) {
    const double* b = &p.b_t[static_cast<std::size_t>(obs[t + 1]) * k];
    const double* next = &beta[(t + 1) * k];
    for (std::size_t j = 0; j < k; ++j) tmp[j] = b[j] * next[j] / scale[t + 1];
    const double* at = &alpha[t * k];
    double* cur = &beta[t * k];
    for (std::size_t i = 0; i < k; ++i) {
      const double* row = &p.a[i * k];
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += row[j] * tmp[j];
      cur[i] = s;
      const double ai = at[i];
      double* tr = &acc.trans[i * k];
      for (std::size_t j = 0; j < k; ++j) tr[j] += ai * row[j] * tmp[j];
    }
  }
  const std::size_t m = p.m;
  for (std::size_t t = 0; t < n; ++t) {
    const auto o = static_cast<std::size_t>(obs[t]);
    for (std::size_t i = 0; i < k; ++i) {
      const double g = alpha[t * k + i] * beta[t * k + i];
      acc.emit[i * m + o] += g;
      if (t == 0) acc.pi[i] += g;
    }
  }
}

Accumulator e_step(const HmmModel& model, std::span<const SymbolSequence> seqs, bool counts) {
  const Params p(model);
  Accumulator acc(p.k, p.m);
  std::vector<double> alpha, beta, scale;
  for (const auto& s : seqs)
    if (!s.empty()) expect(p, s, acc, alpha, beta, scale, counts);
  return acc;
}

void m_step(HmmModel& model, const Accumulator& acc, double smoothing) {
  const auto k = static_cast<std::size_t>(model.states());
  const auto m = static_cast<std::size_t>(model.symbols());
  double pi_total = 0.0;
  for (double v : acc.pi) pi_total += v;
  for (std::size_t i = 0; i < k; ++i) model.initial(static_cast<Eigen::Index>(i)) = acc.pi[i] / pi_total;
  for (std::size_t i = 0; i < k; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double row = 0.0;
    for (std::size_t j = 0; j < k; ++j) row += acc.trans[i * k + j];
    // A state never left keeps its previous row; it has no weight in the objective.
    if (row > 0.0)
      for (std::size_t j = 0; j < k; ++j) model.transition(ii, static_cast<Eigen::Index>(j)) = acc.trans[i * k + j] / row;
    double em = 0.0;
    for (std::size_t o = 0; o < m; ++o) em += acc.emit[i * m + o] + smoothing;
    for (std::size_t o = 0; o < m; ++o)
      model.emission(ii, static_cast<Eigen::Index>(o)) = (acc.emit[i * m + o] + smoothing) / em;
  }
}

void check_alphabet(std::span<const SymbolSequence> seqs, int symbols) {
  for (const auto& s : seqs)
    for (Symbol x : s)
      if (x < 0 || x >= symbols)
        throw Error(ErrorKind::InvalidInput, "symbol " + std::to_string(x) + " outside alphabet of size " +
                                                 std::to_string(symbols));
}

std::int64_t total_observations(std::span<const SymbolSequence> seqs) {
  std::int64_t n = 0;
  for (const auto& s : seqs) n += static_cast<std::int64_t>(s.size());
  return n;
}

}  // namespace

double hmm_log_likelihood(const HmmModel& model, std::span<const SymbolSequence> seqs) {
  return e_step(model, seqs, false).log_likelihood;
}

HmmModel baum_welch(HmmModel model, std::span<const SymbolSequence> seqs, const HmmOptions& options) {
  model.trace.clear();
  model.iterations = 0;
  model.converged = false;
  Accumulator acc = e_step(model, seqs, true);
  model.trace.push_back(acc.log_likelihood);
  while (model.iterations < options.max_iterations) {
    HmmModel next = model;
    m_step(next, acc, options.emission_smoothing);
    Accumulator next_acc = e_step(next, seqs, true);
    const double gain = next_acc.log_likelihood - acc.log_likelihood;
    next.trace.push_back(next_acc.log_likelihood);
    ++next.iterations;
    model = std::move(next);
    acc = std::move(next_acc);
    if (gain < options.tolerance) {
      model.converged = true;
      break;
    }
  }
  model.log_likelihood = acc.log_likelihood;
  return model;
}

HmmModel random_hmm(Eigen::Index states, Eigen::Index symbols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gamma1(1.0);  // Gamma(1) draws give Dirichlet(1) rows
  auto dirichlet_row = [&](Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = gamma1(rng) + 1e-300;
    return Eigen::VectorXd(v / v.sum());
  };
  HmmModel m;
  m.initial = dirichlet_row(states);
  m.transition.resize(states, states);
  m.emission.resize(states, symbols);
  for (Eigen::Index i = 0; i < states; ++i) m.transition.row(i) = dirichlet_row(states).transpose();
  for (Eigen::Index i = 0; i < states; ++i) m.emission.row(i) = dirichlet_row(symbols).transpose();
  return m;
}

HmmModel fit_hmm(std::span<const SymbolSequence> seqs, int states, const HmmOptions& options, int symbols) {
  const std::int64_t n = total_observations(seqs);
  if (n == 0) throw Error(ErrorKind::EmptyInput, "HMM fit on no observations");
  if (states < 1) throw Error(ErrorKind::ConfigError, "HMM needs at least one state");
  if (states > n) throw Error(ErrorKind::ConfigError, "more HMM states than observations");
  if (options.restarts < 1) throw Error(ErrorKind::ConfigError, "HMM needs at least one restart");
  if (options.candidates < 1 || options.screen_iterations < 0)
    throw Error(ErrorKind::ConfigError, "HMM screening needs at least one candidate per restart");
  if (symbols <= 0) {
    Symbol hi = 0;
    for (const auto& s : seqs)
      for (Symbol x : s) hi = std::max(hi, x);
    symbols = hi + 1;
  }
  check_alphabet(seqs, symbols);

  const auto restarts = static_cast<std::size_t>(options.restarts);
  const auto pool_size = restarts * static_cast<std::size_t>(options.candidates);
  const bool screening = pool_size > restarts && options.screen_iterations > 0;
  auto start_of = [&](std::size_t c) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(states), static_cast<std::uint32_t>(c)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    const std::uint64_t sub = (std::uint64_t{words[0]} << 32) | words[1];
    return random_hmm(states, symbols, sub);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(pool_size)));
  auto parallel = [&](std::size_t count, auto&& job) {
    if (threads == 1) {
      for (std::size_t i = 0; i < count; ++i) job(i);
      return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < count; i += threads) job(i);
      });
    for (auto& th : pool) th.join();
  };

  // Short EM runs over the candidate pool; the best `restarts` go on.
  std::vector<HmmModel> pool(pool_size);
  std::vector<std::size_t> chosen(restarts);
  if (screening) {
    HmmOptions brief = options;
    brief.max_iterations = std::min(options.screen_iterations, options.max_iterations);
    parallel(pool_size, [&](std::size_t c) { pool[c] = baum_welch(start_of(c), seqs, brief); });
    std::vector<std::size_t> order(pool_size);
    for (std::size_t c = 0; c < pool_size; ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pool[a].log_likelihood > pool[b].log_likelihood;
    });
    std::copy_n(order.begin(), restarts, chosen.begin());
  } else {
    for (std::size_t r = 0; r < restarts; ++r) chosen[r] = r;
  }

  std::vector<HmmModel> runs(restarts);
  parallel(restarts, [&](std::size_t r) {
    if (!screening) {
      runs[r] = baum_welch(start_of(r), seqs, options);
    } else {
      const HmmModel& head = pool[chosen[r]];
      if (head.converged || head.iterations >= options.max_iterations) {
        runs[r] = head;
      } else {
        HmmOptions rest = options;
        rest.max_iterations = options.max_iterations - head.iterations;
        runs[r] = baum_welch(head, seqs, rest);
        std::vector<double> trace = head.trace;
        trace.insert(trace.end(), runs[r].trace.begin() + 1, runs[r].trace.end());
        runs[r].trace = std::move(trace);
        runs[r].iterations += head.iterations;
      }
    }
    runs[r].restart = static_cast<int>(r);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r)
    if (runs[r].log_likelihood > runs[best].log_likelihood) best = r;
  return runs[best];
}

std::int64_t hmm_parameter_count(std::int64_t states, std::int64_t symbols) {
  return states * (states - 1) + states * (symbols - 1) + (states - 1);
}

SelectionTable select_states(std::span<const SymbolSequence> seqs, std::span<const int> candidates,
                             const HmmOptions& options, int symbols) {
  if (candidates.empty()) throw Error(ErrorKind::ConfigError, "empty range of state counts");
  if (symbols <= 0) {
    Symbol hi = 0;
    for (const auto& s : seqs)
      for (Symbol x : s) hi = std::max(hi, x);
    symbols = hi + 1;
  }
  const double n = static_cast<double>(total_observations(seqs));
  SelectionTable table;
  for (int k : candidates) {
    HmmModel model = fit_hmm(seqs, k, options, symbols);
    SelectionRow row;
    row.states = k;
    row.log_likelihood = model.log_likelihood;
    row.parameters = hmm_parameter_count(k, symbols);
    row.aic = -2.0 * row.log_likelihood + 2.0 * static_cast<double>(row.parameters);
    row.bic = -2.0 * row.log_likelihood + static_cast<double>(row.parameters) * std::log(n);
    table.rows.push_back(row);
    table.models.push_back(std::move(model));
  }
  auto best_by = [&](auto key) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < table.rows.size(); ++i)
      if (key(table.rows[i]) < key(table.rows[best])) best = i;
    return table.rows[best].states;
  };
  table.chosen = best_by([](const SelectionRow& r) { return r.bic; });
  table.aic_choice = best_by([](const SelectionRow& r) { return r.aic; });
  table.disagreement = table.chosen != table.aic_choice;
  return table;
}

std::vector<int> viterbi(const HmmModel& model, std::span<const Symbol> seq) {
  const auto k = static_cast<std::size_t>(model.states());
  const auto m = model.symbols();
  for (Symbol x : seq)
    if (x < 0 || x >= m) throw Error(ErrorKind::InvalidInput, "symbol " + std::to_string(x) + " outside alphabet");
  const std::size_t n = seq.size();
  if (n == 0) return {};

  auto lg = [](double v) { return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity(); };
  std::vector<double> la(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      la[i * k + j] = lg(model.transition(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  auto le = [&](std::size_t i, Symbol o) { return lg(model.emission(static_cast<Eigen::Index>(i), o)); };

  std::vector<double> score(k), next(k);
  std::vector<int> back(n * k, 0);
  for (std::size_t i = 0; i < k; ++i) score[i] = lg(model.initial(static_cast<Eigen::Index>(i))) + le(i, seq[0]);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t j = 0; j < k; ++j) {
      double best = -std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const double v = score[i] + la[i * k + j];
        if (v > best) {
          best = v;
          arg = static_cast<int>(i);
        }
      }
      next[j] = best + le(j, seq[t]);
      back[t * k + j] = arg;
    }
    std::swap(score, next);
  }
  std::vector<int> path(n);
  path[n - 1] = static_cast<int>(std::max_element(score.begin(), score.end()) - score.begin());
  for (std::size_t t = n - 1; t > 0; --t) path[t - 1] = back[t * k + static_cast<std::size_t>(path[t])];
  return path;
}

void write_hmm_json(std::ostream& out, const HmmModel& model, std::span<const std::string> labels) {
  nlohmann::ordered_json j;
  j["states"] = model.states();
  j["symbols"] = std::vector<std::string>(labels.begin(), labels.end());
  j["log_likelihood"] = model.log_likelihood;
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  j["initial"] = std::vector<double>(model.initial.data(), model.initial.data() + model.initial.size());
  auto rows = [](const Eigen::MatrixXd& mat) {
    std::vector<std::vector<double>> r;
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      std::vector<double> row;
      for (Eigen::Index c = 0; c < mat.cols(); ++c) row.push_back(mat(i, c));
      r.push_back(std::move(row));
    }
    return r;
  };
  j["transition"] = rows(model.transition);
  j["emission"] = rows(model.emission);
  out << j.dump(2) << '\n';
}

void write_selection_csv(std::ostream& out, const SelectionTable& table) {
  out << "states,log_likelihood,parameters,aic,bic,chosen\n";
  for (const auto& r : table.rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%lld,%.17g,%.17g,%s\n", r.states, r.log_likelihood,
                  static_cast<long long>(r.parameters), r.aic, r.bic, r.states == table.chosen ? "true" : "false");
    out << buf;
  }
}

}  // namespace dtseq
