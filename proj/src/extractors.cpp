#include <stdexcept>
#include <utility>

#include "hategraph/features.hpp"
#include "hategraph/parallel.hpp"
#include "hategraph/rng.hpp"
#include "hategraph/util.hpp"

namespace hategraph::features {

PreparedCorpus PreparedCorpus::build(const corpus::LabeledCorpus& corpus,
                                     const preprocess::StopwordSet& stopwords) {
  PreparedCorpus out;
  out.source = &corpus;
  size_t n = corpus.documents.size();
  out.tokens.resize(n);
  out.canonical.resize(n);
  out.label_indices = corpus.label_indices();
  parallel_for(n, [&](size_t i) {
    auto tokens = preprocess::remove_stopwords(
        preprocess::tokenize(preprocess::clean_tweet(corpus.documents[i].text)), stopwords);
    out.canonical[i] = util::join(tokens, " ");
    out.tokens[i] = std::move(tokens);
  });
  return out;
}

namespace {

class BowExtractor final : public FeatureExtractor {
 public:
  explicit BowExtractor(std::shared_ptr<const Lexicon> lexicon)
      : name_("bow"), lexicon_(std::move(lexicon)) {
    if (!lexicon_ || lexicon_->size() == 0) throw std::invalid_argument("bow: empty lexicon");
  }
  const std::string& name() const override { return name_; }
  void fit(const TrainingView&) override {}
  size_t dimension() const override { return lexicon_->size(); }
  FeatureVector extract(const PreparedDoc& doc) const override {
    return extract_bow(*doc.tokens, *lexicon_);
  }

 private:
  std::string name_;
  std::shared_ptr<const Lexicon> lexicon_;
};

class CharNgramExtractor final : public FeatureExtractor {
 public:
  CharNgramExtractor(int n, size_t k) : name_("c-ngrams"), n_(n), k_(k) {}
  const std::string& name() const override { return name_; }
  void fit(const TrainingView& train) override {
    std::vector<std::string> texts;
    texts.reserve(train.indices.size());
    for (size_t i : train.indices) texts.push_back(train.prepared->canonical[i]);
    vocab_ = build_char_ngram_vocab(texts, n_, k_);
    fitted_ = true;
  }
  size_t dimension() const override { return vocab_.size(); }
  FeatureVector extract(const PreparedDoc& doc) const override {
    if (!fitted_) throw std::logic_error("c-ngrams: extract before fit");
    return extract_char_ngram_bag(*doc.canonical, vocab_);
  }
  const NGramVocabulary& vocab() const { return vocab_; }

 private:
  std::string name_;
  int n_;
  size_t k_;
  bool fitted_ = false;
  NGramVocabulary vocab_;
};

class WordNgramExtractor final : public FeatureExtractor {
 public:
  WordNgramExtractor(int n, size_t k) : name_("w-ngrams"), n_(n), k_(k) {}
  const std::string& name() const override { return name_; }
  void fit(const TrainingView& train) override {
    std::vector<std::vector<std::string>> seqs;
    seqs.reserve(train.indices.size());
    for (size_t i : train.indices) seqs.push_back(train.prepared->tokens[i]);
    vocab_ = build_word_ngram_vocab(seqs, n_, k_);
    fitted_ = true;
  }
  size_t dimension() const override { return vocab_.size(); }
  FeatureVector extract(const PreparedDoc& doc) const override {
    if (!fitted_) throw std::logic_error("w-ngrams: extract before fit");
    return extract_word_ngram_bag(*doc.tokens, vocab_);
  }

 private:
  std::string name_;
  int n_;
  size_t k_;
  bool fitted_ = false;
  NGramVocabulary vocab_;
};

class GloveExtractor final : public FeatureExtractor {
 public:
  explicit GloveExtractor(std::shared_ptr<const EmbeddingTable> table)
      : name_("glove"), table_(std::move(table)) {
    if (!table_) throw std::invalid_argument("glove: no embedding table");
  }
  const std::string& name() const override { return name_; }
  void fit(const TrainingView&) override {}
  size_t dimension() const override { return table_->dimension(); }
  FeatureVector extract(const PreparedDoc& doc) const override {
    return extract_mean_embedding(*doc.tokens, *table_);
  }

 private:
  std::string name_;
  std::shared_ptr<const EmbeddingTable> table_;
};

class NggExtractor final : public FeatureExtractor {
 public:
  NggExtractor(const ngg::NGGParams& params, double rcg_fraction)
      : name_("ngg"), params_(params), rcg_fraction_(rcg_fraction) {}
  const std::string& name() const override { return name_; }
  void fit(const TrainingView& train) override {
    std::vector<std::string> texts;
    std::vector<int> labels;
    texts.reserve(train.indices.size());
    labels.reserve(train.indices.size());
    for (size_t i : train.indices) {
      texts.push_back(train.prepared->canonical[i]);
      labels.push_back(train.prepared->label_indices[i]);
    }
    rcgs_ = ngg::build_rcgs(texts, labels, train.prepared->source->label_set, params_,
                            rcg_fraction_, train.seed);
  }
  size_t dimension() const override { return rcgs_.size(); }
  FeatureVector extract(const PreparedDoc& doc) const override {
    if (rcgs_.empty()) throw std::logic_error("ngg: extract before fit");
    ngg::NGramGraph g = ngg::build_graph(*doc.canonical, params_);
    return FeatureVector::single("ngg", ngg::model_vector(g, rcgs_));
  }
  const std::vector<ngg::RepresentativeCategoryGraph>& rcgs() const { return rcgs_; }

 private:
  std::string name_;
  ngg::NGGParams params_;
  double rcg_fraction_;
  std::vector<ngg::RepresentativeCategoryGraph> rcgs_;
};

class SentimentExtractor final : public FeatureExtractor {
 public:
  SentimentExtractor(std::string name, std::shared_ptr<const SentimentScorer> scorer, bool syntax)
      : name_(std::move(name)), scorer_(std::move(scorer)), syntax_(syntax) {
    if (!scorer_) throw std::invalid_argument(name_ + ": no scorer configured");
  }
  const std::string& name() const override { return name_; }
  void fit(const TrainingView&) override {}
  size_t dimension() const override { return 1; }
  FeatureVector extract(const PreparedDoc& doc) const override {
    auto [sentiment, syntax] = sentiment_syntax_scores(*doc.doc, *doc.tokens, *scorer_);
    return FeatureVector::single(name_, {syntax_ ? syntax : sentiment});
  }

 private:
  std::string name_;
  std::shared_ptr<const SentimentScorer> scorer_;
  bool syntax_;
};

class SpellingExtractor final : public FeatureExtractor {
 public:
  explicit SpellingExtractor(std::shared_ptr<const Dictionary> dictionary)
      : name_("spelling"), dictionary_(std::move(dictionary)) {
    if (!dictionary_) throw std::invalid_argument("spelling: no dictionary");
  }
  const std::string& name() const override { return name_; }
  void fit(const TrainingView&) override {}
  size_t dimension() const override { return 1; }
  FeatureVector extract(const PreparedDoc& doc) const override {
    return FeatureVector::single(name_, {spelling_score(*doc.tokens, *dictionary_)});
  }

 private:
  std::string name_;
  std::shared_ptr<const Dictionary> dictionary_;
};

class ComboExtractor final : public FeatureExtractor {
 public:
  ComboExtractor(std::string name, std::vector<std::unique_ptr<FeatureExtractor>> parts)
      : name_(std::move(name)), parts_(std::move(parts)) {
    if (parts_.empty()) throw std::invalid_argument("combo '" + name_ + "': no parts");
  }
  const std::string& name() const override { return name_; }
  void fit(const TrainingView& train) override {
    for (auto& p : parts_) p->fit(train);
  }
  size_t dimension() const override {
    size_t total = 0;
    for (const auto& p : parts_) total += p->dimension();
    return total;
  }
  FeatureVector extract(const PreparedDoc& doc) const override {
    std::vector<FeatureVector> vecs;
    vecs.reserve(parts_.size());
    for (const auto& p : parts_) vecs.push_back(p->extract(doc));
    return concat_features(vecs);
  }

 private:
  std::string name_;
  std::vector<std::unique_ptr<FeatureExtractor>> parts_;
};

}  // namespace

std::unique_ptr<FeatureExtractor> make_bow_extractor(std::shared_ptr<const Lexicon> lexicon) {
  return std::make_unique<BowExtractor>(std::move(lexicon));
}
std::unique_ptr<FeatureExtractor> make_char_ngram_extractor(int n, size_t k) {
  return std::make_unique<CharNgramExtractor>(n, k);
}
std::unique_ptr<FeatureExtractor> make_word_ngram_extractor(int n, size_t k) {
  return std::make_unique<WordNgramExtractor>(n, k);
}
std::unique_ptr<FeatureExtractor> make_glove_extractor(std::shared_ptr<const EmbeddingTable> table) {
  return std::make_unique<GloveExtractor>(std::move(table));
}
std::unique_ptr<FeatureExtractor> make_ngg_extractor(const ngg::NGGParams& params,
                                                     double rcg_fraction) {
  return std::make_unique<NggExtractor>(params, rcg_fraction);
}
std::unique_ptr<FeatureExtractor> make_sentiment_extractor(
    std::shared_ptr<const SentimentScorer> scorer) {
  return std::make_unique<SentimentExtractor>("sentiment", std::move(scorer), false);
}
std::unique_ptr<FeatureExtractor> make_syntax_extractor(
    std::shared_ptr<const SentimentScorer> scorer) {
  return std::make_unique<SentimentExtractor>("syntax", std::move(scorer), true);
}
std::unique_ptr<FeatureExtractor> make_spelling_extractor(
    std::shared_ptr<const Dictionary> dictionary) {
  return std::make_unique<SpellingExtractor>(std::move(dictionary));
}
std::unique_ptr<FeatureExtractor> make_combo_extractor(
    std::string name, std::vector<std::unique_ptr<FeatureExtractor>> parts) {
  return std::make_unique<ComboExtractor>(std::move(name), std::move(parts));
}

const std::vector<ngg::RepresentativeCategoryGraph>* ngg_extractor_rcgs(
    const FeatureExtractor& extractor) {
  const auto* ngg_ex = dynamic_cast<const NggExtractor*>(&extractor);
  return ngg_ex ? &ngg_ex->rcgs() : nullptr;
}

Matrix extract_matrix(const FeatureExtractor& extractor, const PreparedCorpus& prepared,
                      std::span<const size_t> indices) {
  Matrix m(indices.size(), extractor.dimension());
  parallel_for(indices.size(), [&](size_t r) {
    FeatureVector fv = extractor.extract(prepared.view(indices[r]));
    if (fv.values.size() != m.cols)
      throw std::runtime_error("extractor '" + extractor.name() + "' produced " +
                               std::to_string(fv.values.size()) + " values, expected " +
                               std::to_string(m.cols));
    std::copy(fv.values.begin(), fv.values.end(), m.row(r));
  });
  return m;
}

}  // namespace hategraph::features
