#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dtseq/model.hpp"

namespace dtseq {

/// Longest content prefix kept in a synthetic word, in bytes.
inline constexpr std::size_t kMaxContentBytes = 120;

/// platform + "_" + activity [+ "_" + content], content cut at
/// kMaxContentBytes on a UTF-8 boundary.
std::string synthetic_word(const Event& e);

struct TokenInfo {
  std::string platform;
  std::string activity;
};

struct EmbeddingCorpus {
  std::vector<std::vector<std::string>> sentences;  // one per user
  std::map<std::string, TokenInfo> info;
};

EmbeddingCorpus build_corpus(std::span<const UserSequence> sequences);

struct SgnsConfig {
  int dimensions = 100;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  int min_count = 5;
  double noise_power = 0.75;
  std::uint64_t seed = 1;
};

class EmbeddingSpace {
 public:
  EmbeddingSpace() = default;
  EmbeddingSpace(std::vector<std::string> vocab, std::vector<std::int64_t> counts, int dimensions);

  std::size_t size() const { return vocab_.size(); }
  int dimensions() const { return static_cast<int>(input.cols()); }
  const std::string& token(std::size_t i) const { return vocab_[i]; }
  std::span<const std::string> vocabulary() const { return vocab_; }
  std::int64_t count(std::size_t i) const { return counts_[i]; }
  std::optional<std::size_t> find(const std::string& token) const;

  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  /// Row i is the vector of token i.
  Matrix input;
  Matrix output;
  SgnsConfig config;

 private:
  std::vector<std::string> vocab_;
  std::vector<std::int64_t> counts_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Loss of one (center, context, negatives) triple:
/// -log s(u_o . v_c) - sum_n log s(-u_n . v_c).
double sgns_loss(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                 std::span<const Eigen::VectorXd> negatives);

struct SgnsGradient {
  Eigen::VectorXd center;
  Eigen::VectorXd context;
  std::vector<Eigen::VectorXd> negatives;
};

SgnsGradient sgns_gradient(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                           std::span<const Eigen::VectorXd> negatives);

struct SgnsTriple {
  std::size_t center;
  std::size_t context;
  std::vector<std::size_t> negatives;
};

/// Skip-gram with negative sampling, single-threaded and seeded.
class SgnsTrainer {
 public:
  /// Throws ConfigError when no token reaches min_count or the config is invalid.
  SgnsTrainer(const std::vector<std::vector<std::string>>& sentences, const SgnsConfig& config);

  /// One pass over the corpus; returns the mean training loss of the pass.
  double epoch();
  int epochs_done() const { return epochs_done_; }

  /// Draws `n` triples from the corpus with the trainer's noise distribution,
  /// using a separate seed so training is unaffected.
  std::vector<SgnsTriple> sample_triples(std::size_t n, std::uint64_t seed) const;
  double mean_loss(std::span<const SgnsTriple> triples) const;

  const EmbeddingSpace& space() const { return space_; }
  EmbeddingSpace take() { return std::move(space_); }

 private:
  SgnsConfig config_;
  EmbeddingSpace space_;
  std::vector<std::vector<std::size_t>> corpus_;
  std::discrete_distribution<std::size_t> noise_;
  std::mt19937_64 rng_;
  std::int64_t total_words_ = 0;
  std::int64_t processed_ = 0;
  int epochs_done_ = 0;
};

EmbeddingSpace train_embeddings(const std::vector<std::vector<std::string>>& sentences, const SgnsConfig& config);

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct Neighbor {
  std::string token;
  double cosine = 0.0;
};

/// Nearest tokens by cosine, descending, ties by token; excludes the query.
/// Throws NotInVocabulary.
std::vector<Neighbor> neighbors(const EmbeddingSpace& space, const std::string& token, std::size_t k);

enum class ProjectionMethod { Pca, Tsne };

struct TsneConfig {
  double perplexity = 30.0;
  int iterations = 1000;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double learning_rate = 200.0;
};

struct Projection {
  Eigen::MatrixXd coords;  // n x 2
  ProjectionMethod method = ProjectionMethod::Pca;
  double perplexity = 0.0;
  /// Set when t-SNE was requested but fell back to PCA.
  bool fell_back = false;
};

/// Top two principal components; each axis sign fixed so its largest
/// loading is positive.
Eigen::MatrixXd pca_2d(const Eigen::MatrixXd& points);

/// Exact t-SNE with PCA initialization. Perplexity is lowered to (n-1)/3 for
/// small inputs.
Eigen::MatrixXd tsne_2d(const Eigen::MatrixXd& points, const TsneConfig& config, double* used_perplexity = nullptr);

/// Needs at least 3 points; t-SNE with fewer than 4 falls back to PCA.
Projection project_2d(const Eigen::MatrixXd& points, ProjectionMethod method, const TsneConfig& config = {});

struct TrajectorySummary {
  std::string user_id;
  double entropy_bits = 0.0;
  double radius_of_gyration = 0.0;
  std::size_t tokens = 0;
  std::size_t dropped = 0;
};

/// Shannon entropy of token frequencies and RMS distance of the token vectors
/// (with repetition) from their mean. Out-of-vocabulary tokens are dropped and
/// counted; all dropped throws EmptyTrajectory.
TrajectorySummary trajectory_metrics(const EmbeddingSpace& space, std::span<const std::string> tokens,
                                     std::string user_id = {});

/// "V d" header, then one token and d values per line. Whitespace inside a
/// token is written as '_' to keep the format splittable.
void write_embeddings_text(std::ostream& out, const EmbeddingSpace& space);
void write_projection_csv(std::ostream& out, const EmbeddingSpace& space, const Eigen::MatrixXd& coords,
                          const std::map<std::string, TokenInfo>& info);

}  // namespace dtseq
