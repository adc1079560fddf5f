#include "dtseq/embed.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include <Eigen/Dense>

#include "dtseq/error.hpp"
#include "dtseq/io.hpp"

namespace dtseq {

std::string synthetic_word(const Event& e) {
  std::string token = e.platform.name() + "_" + e.activity;
  if (e.content) {
    std::size_t cut = std::min(e.content->size(), kMaxContentBytes);
    // Back off to a UTF-8 lead byte.
    while (cut > 0 && cut < e.content->size() && (static_cast<unsigned char>((*e.content)[cut]) & 0xC0) == 0x80) --cut;
    token += "_" + e.content->substr(0, cut);
  }
  return token;
}

EmbeddingCorpus build_corpus(std::span<const UserSequence> sequences) {
  EmbeddingCorpus corpus;
  for (const auto& seq : sequences) {
    std::vector<std::string> sentence;
    sentence.reserve(seq.size());
    for (const auto& e : seq.events()) {
      sentence.push_back(synthetic_word(e));
      corpus.info.try_emplace(sentence.back(), TokenInfo{e.platform.name(), e.activity});
    }
    corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

EmbeddingSpace::EmbeddingSpace(std::vector<std::string> vocab, std::vector<std::int64_t> counts, int dimensions)
    : input(Matrix::Zero(static_cast<Eigen::Index>(vocab.size()), dimensions)),
      output(Matrix::Zero(static_cast<Eigen::Index>(vocab.size()), dimensions)),
      vocab_(std::move(vocab)),
      counts_(std::move(counts)) {
  for (std::size_t i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], i);
}

std::optional<std::size_t> EmbeddingSpace::find(const std::string& token) const {
  if (auto it = index_.find(token); it != index_.end()) return it->second;
  return std::nullopt;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log s(x), stable for large |x|.
double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

}  // namespace

double sgns_loss(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                 std::span<const Eigen::VectorXd> negatives) {
  double loss = -log_sigmoid(context.dot(center));
  for (const auto& n : negatives) loss -= log_sigmoid(-n.dot(center));
  return loss;
}

SgnsGradient sgns_gradient(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                           std::span<const Eigen::VectorXd> negatives) {
  SgnsGradient g;
  const double pos = sigmoid(context.dot(center)) - 1.0;
  g.center = pos * context;
  g.context = pos * center;
  for (const auto& n : negatives) {
    const double neg = sigmoid(n.dot(center));
    g.center += neg * n;
    g.negatives.push_back(neg * center);
  }
  return g;
}

SgnsTrainer::SgnsTrainer(const std::vector<std::vector<std::string>>& sentences, const SgnsConfig& config)
    : config_(config), rng_(config.seed) {
  if (config.dimensions < 1 || config.window < 1 || config.negatives < 0 || config.epochs < 0 ||
      !(config.learning_rate > 0.0) || config.min_count < 1)
    throw Error(ErrorKind::ConfigError, "invalid embedding configuration");

  std::map<std::string, std::int64_t> counts;
  for (const auto& s : sentences)
    for (const auto& t : s) ++counts[t];
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (auto& [t, c] : counts)
    if (c >= config.min_count) kept.emplace_back(t, c);
  if (kept.empty()) throw Error(ErrorKind::ConfigError, "no token reaches min_count");
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> vocab;
  std::vector<std::int64_t> freq;
  for (auto& [t, c] : kept) {
    vocab.push_back(t);
    freq.push_back(c);
  }
  space_ = EmbeddingSpace(std::move(vocab), freq, config.dimensions);
  space_.config = config;

  // word2vec initialization: input uniform in [-0.5/d, 0.5/d], output zero.
  std::uniform_real_distribution<double> init(-0.5 / config.dimensions, 0.5 / config.dimensions);
  for (Eigen::Index i = 0; i < space_.input.rows(); ++i)
    for (Eigen::Index j = 0; j < space_.input.cols(); ++j) space_.input(i, j) = init(rng_);

  std::vector<double> weights;
  for (auto c : freq) weights.push_back(std::pow(static_cast<double>(c), config.noise_power));
  noise_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());

  for (const auto& s : sentences) {
    std::vector<std::size_t> ids;
    for (const auto& t : s)
      if (auto id = space_.find(t)) ids.push_back(*id);
    total_words_ += static_cast<std::int64_t>(ids.size());
    if (ids.size() > 1) corpus_.push_back(std::move(ids));
  }
}

double SgnsTrainer::epoch() {
  const auto d = static_cast<Eigen::Index>(config_.dimensions);
  Eigen::VectorXd grad_center(d);
  const double planned = static_cast<double>(config_.epochs) * static_cast<double>(total_words_) + 1.0;
  double loss = 0.0;
  std::int64_t pairs = 0;
  for (const auto& sentence : corpus_) {
    const auto n = static_cast<std::ptrdiff_t>(sentence.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double lr =
          config_.learning_rate * std::max(1e-4, 1.0 - static_cast<double>(processed_) / planned);
      ++processed_;
      // Random window shrink, as in word2vec.
      const auto reach = static_cast<std::ptrdiff_t>(config_.window) -
                         static_cast<std::ptrdiff_t>(rng_() % static_cast<std::uint64_t>(config_.window));
      const std::size_t center = sentence[static_cast<std::size_t>(i)];
      auto v = space_.input.row(static_cast<Eigen::Index>(center));
      for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - reach); j <= std::min(n - 1, i + reach); ++j) {
        if (j == i) continue;
        const std::size_t context = sentence[static_cast<std::size_t>(j)];
        grad_center.setZero();
        for (int s = 0; s <= config_.negatives; ++s) {
          std::size_t target = context;
          double label = 1.0;
          if (s > 0) {
            target = noise_(rng_);
            if (target == context) continue;
            label = 0.0;
          }
          auto u = space_.output.row(static_cast<Eigen::Index>(target));
          const double score = u.dot(v);
          loss -= label > 0 ? log_sigmoid(score) : log_sigmoid(-score);
          const double g = (label - sigmoid(score)) * lr;
          grad_center += g * u.transpose();
          u += g * v;
        }
        v += grad_center.transpose();
        ++pairs;
      }
    }
  }
  ++epochs_done_;
  return pairs ? loss / static_cast<double>(pairs) : 0.0;
}

std::vector<SgnsTriple> SgnsTrainer::sample_triples(std::size_t n, std::uint64_t seed) const {
  std::vector<SgnsTriple> out;
  if (corpus_.empty()) return out;
  std::mt19937_64 rng(seed);
  auto noise = noise_;
  std::uniform_int_distribution<std::size_t> pick_sentence(0, corpus_.size() - 1);
  while (out.size() < n) {
    const auto& s = corpus_[pick_sentence(rng)];
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng);
    const auto w = static_cast<std::size_t>(config_.window);
    const std::size_t lo = i >= w ? i - w : 0, hi = std::min(s.size() - 1, i + w);
    std::size_t j = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    if (j == i) continue;
    SgnsTriple t{s[i], s[j], {}};
    for (int k = 0; k < config_.negatives; ++k) t.negatives.push_back(noise(rng));
    out.push_back(std::move(t));
  }
  return out;
}

double SgnsTrainer::mean_loss(std::span<const SgnsTriple> triples) const {
  if (triples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& t : triples) {
    std::vector<Eigen::VectorXd> negs;
    for (auto n : t.negatives) negs.push_back(space_.output.row(static_cast<Eigen::Index>(n)).transpose());
    total += sgns_loss(space_.input.row(static_cast<Eigen::Index>(t.center)).transpose(),
                       space_.output.row(static_cast<Eigen::Index>(t.context)).transpose(), negs);
  }
  return total / static_cast<double>(triples.size());
}

EmbeddingSpace train_embeddings(const std::vector<std::vector<std::string>>& sentences, const SgnsConfig& config) {
  SgnsTrainer trainer(sentences, config);
  for (int e = 0; e < config.epochs; ++e) trainer.epoch();
  return trainer.take();
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

std::vector<Neighbor> neighbors(const EmbeddingSpace& space, const std::string& token, std::size_t k) {
  const auto q = space.find(token);
  if (!q) throw Error(ErrorKind::NotInVocabulary, "token not in vocabulary: " + token);
  const Eigen::VectorXd query = space.input.row(static_cast<Eigen::Index>(*q)).transpose();
  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (i == *q) continue;
    all.push_back({space.token(i), cosine(query, space.input.row(static_cast<Eigen::Index>(i)).transpose())});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.cosine != b.cosine ? a.cosine > b.cosine : a.token < b.token;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

Eigen::MatrixXd pca_2d(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  const Eigen::RowVectorXd mean = points.colwise().mean();
  const Eigen::MatrixXd centered = points.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / std::max<double>(1.0, static_cast<double>(n - 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const Eigen::Index d = cov.rows();
  Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(d, 2);
  for (Eigen::Index c = 0; c < std::min<Eigen::Index>(2, d); ++c) {
    Eigen::VectorXd v = es.eigenvectors().col(d - 1 - c);  // eigenvalues ascend
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    axes.col(c) = v;
  }
  return centered * axes;
}

Projection project_2d(const Eigen::MatrixXd& points, ProjectionMethod method, const TsneConfig& config) {
  if (points.rows() < 3) throw Error(ErrorKind::InvalidInput, "projection needs at least 3 points");
  Projection p;
  p.method = method;
  if (method == ProjectionMethod::Tsne && points.rows() < 4) {
    std::cerr << "warning: t-SNE perplexity infeasible for " << points.rows() << " points; using PCA\n";
    p.method = ProjectionMethod::Pca;
    p.fell_back = true;
  }
  if (p.method == ProjectionMethod::Pca) p.coords = pca_2d(points);
  else p.coords = tsne_2d(points, config, &p.perplexity);
  return p;
}

TrajectorySummary trajectory_metrics(const EmbeddingSpace& space, std::span<const std::string> tokens,
                                     std::string user_id) {
  TrajectorySummary s;
  s.user_id = std::move(user_id);
  std::vector<std::size_t> ids;
  std::map<std::size_t, std::size_t> freq;
  for (const auto& t : tokens) {
    if (auto id = space.find(t)) {
      ids.push_back(*id);
      ++freq[*id];
    } else {
      ++s.dropped;
    }
  }
  if (ids.empty()) throw Error(ErrorKind::EmptyTrajectory, "no in-vocabulary tokens in trajectory");
  s.tokens = ids.size();
  const double n = static_cast<double>(ids.size());
  for (const auto& [_, c] : freq) {
    const double p = static_cast<double>(c) / n;
    s.entropy_bits -= p * std::log2(p);
  }
  if (s.entropy_bits < 0.0) s.entropy_bits = 0.0;
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(space.input.cols());
  for (auto id : ids) mean += space.input.row(static_cast<Eigen::Index>(id));
  mean /= n;
  double sq = 0.0;
  for (auto id : ids) sq += (space.input.row(static_cast<Eigen::Index>(id)) - mean).squaredNorm();
  s.radius_of_gyration = std::sqrt(sq / n);
  return s;
}

void write_embeddings_text(std::ostream& out, const EmbeddingSpace& space) {
  out << space.size() << ' ' << space.dimensions() << '\n';
  for (std::size_t i = 0; i < space.size(); ++i) {
    std::string t = space.token(i);
    std::replace_if(t.begin(), t.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }, '_');
    out << t;
    for (Eigen::Index j = 0; j < space.input.cols(); ++j) out << ' ' << fmt_double(space.input(static_cast<Eigen::Index>(i), j));
    out << '\n';
  }
}

void write_projection_csv(std::ostream& out, const EmbeddingSpace& space, const Eigen::MatrixXd& coords,
                          const std::map<std::string, TokenInfo>& info) {
  out << "token,x,y,platform,activity\n";
  for (std::size_t i = 0; i < space.size(); ++i) {
    TokenInfo ti;
    if (auto it = info.find(space.token(i)); it != info.end()) ti = it->second;
    const auto r = static_cast<Eigen::Index>(i);
    write_csv_row(out, {space.token(i), fmt_double(coords(r, 0)), fmt_double(coords(r, 1)), ti.platform, ti.activity});
  }
}

}  // namespace dtseq
