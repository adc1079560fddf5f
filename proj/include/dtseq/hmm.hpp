#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dtseq/model.hpp"

namespace dtseq {

/// Discrete-emission HMM. Rows of `transition` and `emission` and the initial
/// distribution each sum to one.
struct HmmModel {
  Eigen::VectorXd initial;     // K
  Eigen::MatrixXd transition;  // K x K
  Eigen::MatrixXd emission;    // K x M
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Log-likelihood of the model at the start of each EM iteration and after
  /// the last one.
  std::vector<double> trace;
  int restart = 0;

  Eigen::Index states() const { return transition.rows(); }
  Eigen::Index symbols() const { return emission.cols(); }
};

struct HmmOptions {
  std::uint64_t seed = 1;
  int restarts = 5;
  /// Random starts drawn per restart. Each gets `screen_iterations` EM steps
  /// and the best `restarts` of the pool are run to convergence; 1 disables.
  int candidates = 10;
  int screen_iterations = 10;
  double tolerance = 1e-6;
  int max_iterations = 500;
  double emission_smoothing = 1e-10;
  /// Restarts run on this many threads; selection stays deterministic.
  unsigned threads = 1;
};

/// Total log-likelihood of `seqs` under `model` (scaled forward pass).
double hmm_log_likelihood(const HmmModel& model, std::span<const SymbolSequence> seqs);

/// Baum-Welch from a given starting model, single run.
HmmModel baum_welch(HmmModel start, std::span<const SymbolSequence> seqs, const HmmOptions& options);

/// Dirichlet(1) rows for the initial distribution, transitions and emissions.
HmmModel random_hmm(Eigen::Index states, Eigen::Index symbols, std::uint64_t seed);

/// Best of `options.restarts` Baum-Welch runs (highest likelihood, ties to the
/// lowest restart). `symbols` = alphabet size M; 0 infers max symbol + 1.
/// Throws ConfigError for K < 1 or K > total observations, EmptyInput for
/// no data, InvalidInput for symbols outside the alphabet.
HmmModel fit_hmm(std::span<const SymbolSequence> seqs, int states, const HmmOptions& options = {},
                 int symbols = 0);

struct SelectionRow {
  int states = 0;
  double log_likelihood = 0.0;
  std::int64_t parameters = 0;
  double aic = 0.0;
  double bic = 0.0;
};

struct SelectionTable {
  std::vector<SelectionRow> rows;
  int chosen = 0;         // by BIC
  int aic_choice = 0;
  bool disagreement = false;
  std::vector<HmmModel> models;
};

/// K(K-1) + K(M-1) + (K-1).
std::int64_t hmm_parameter_count(std::int64_t states, std::int64_t symbols);

SelectionTable select_states(std::span<const SymbolSequence> seqs, std::span<const int> candidates,
                             const HmmOptions& options = {}, int symbols = 0);

/// Most probable state path (log-space Viterbi). Throws InvalidInput for
/// out-of-alphabet symbols.
std::vector<int> viterbi(const HmmModel& model, std::span<const Symbol> seq);

void write_hmm_json(std::ostream& out, const HmmModel& model, std::span<const std::string> labels);
void write_selection_csv(std::ostream& out, const SelectionTable& table);

}  // namespace dtseq
