#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hategraph/corpus.hpp"
#include "hategraph/ngg.hpp"
#include "hategraph/preprocess.hpp"

namespace hategraph::features {

struct FeatureSegment {
  std::string name;
  size_t offset = 0;
  size_t length = 0;
};

struct FeatureVector {
  std::vector<double> values;
  std::vector<FeatureSegment> segments;

  static FeatureVector single(std::string name, std::vector<double> values);
};

// Concatenation with provenance; throws if any component is non-finite,
// naming the offending segment.
FeatureVector concat_features(std::span<const FeatureVector> parts);

// Ordered keyword list (words or space-separated phrases); order fixes the
// BoW coordinate order.
class Lexicon {
 public:
  explicit Lexicon(std::vector<std::string> keywords);
  static Lexicon load(const std::filesystem::path& path);

  const std::vector<std::string>& keywords() const { return keywords_; }
  size_t size() const { return keywords_.size(); }

  // Per-keyword occurrence counts over the token sequence; phrases match
  // contiguous token runs.
  std::vector<double> count_occurrences(std::span<const std::string> tokens) const;

 private:
  std::vector<std::string> keywords_;
  std::vector<std::vector<std::string>> keyword_tokens_;
  std::unordered_map<std::string, std::vector<size_t>> by_first_token_;
};

FeatureVector extract_bow(std::span<const std::string> tokens, const Lexicon& lexicon);

// K most frequent n-grams of the fitting texts; ties broken lexicographically.
struct NGramVocabulary {
  enum class Unit { Char, Word };

  Unit unit = Unit::Char;
  int n = 3;
  std::vector<std::pair<std::string, uint64_t>> entries;  // frequency non-increasing
  std::unordered_map<std::string, size_t> index;

  size_t size() const { return entries.size(); }
};

NGramVocabulary build_char_ngram_vocab(std::span<const std::string> texts, int n, size_t k);
NGramVocabulary build_word_ngram_vocab(std::span<const std::vector<std::string>> token_seqs, int n,
                                       size_t k);

FeatureVector extract_char_ngram_bag(std::string_view text, const NGramVocabulary& vocab);
FeatureVector extract_word_ngram_bag(std::span<const std::string> tokens,
                                     const NGramVocabulary& vocab);

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(size_t dimension, std::unordered_map<std::string, std::vector<float>> vectors);

  // GloVe text format: word then `dimension` decimals per line. A line with
  // the wrong component count is a parse error naming the line; duplicate
  // words keep the last occurrence (counted in duplicate_count).
  static EmbeddingTable load(const std::filesystem::path& path, size_t expected_dim);

  size_t dimension() const { return dimension_; }
  size_t size() const { return vectors_.size(); }
  size_t duplicate_count() const { return duplicates_; }
  const std::vector<float>* find(const std::string& word) const;

 private:
  size_t dimension_ = 0;
  size_t duplicates_ = 0;
  std::unordered_map<std::string, std::vector<float>> vectors_;
};

// Componentwise mean over in-vocabulary tokens; zero vector when none match.
FeatureVector extract_mean_embedding(std::span<const std::string> tokens,
                                     const EmbeddingTable& table);

// Unit-cost edit distance.
size_t levenshtein(std::string_view a, std::string_view b);

class Dictionary {
 public:
  explicit Dictionary(std::vector<std::string> words);
  static Dictionary load(const std::filesystem::path& path);

  bool contains(const std::string& word) const { return words_.count(word) > 0; }
  size_t size() const { return size_; }

  // min over dictionary words of levenshtein(token, word). Buckets by length
  // let the search stop once no closer bucket can exist.
  size_t min_distance(const std::string& token) const;

 private:
  std::unordered_set<std::string> words_;
  std::vector<std::vector<std::string>> by_length_;
  size_t size_ = 0;
};

// Mean over tokens of the minimal edit distance to the dictionary; empty
// token sequence scores 0.
double spelling_score(std::span<const std::string> tokens, const Dictionary& dict);

struct AuxScores {
  double sentiment = 0.0;
  double syntax = 0.0;
  double spelling = 0.0;
};

class SentimentScorer {
 public:
  virtual ~SentimentScorer() = default;
  virtual std::pair<double, double> score(const corpus::Document& doc,
                                          std::span<const std::string> tokens) const = 0;
};

// (positive count - negative count) / token count in [-1, 1]; syntax fixed
// at 0 (no external parser).
class LexiconSentimentScorer : public SentimentScorer {
 public:
  LexiconSentimentScorer(std::unordered_set<std::string> positive,
                         std::unordered_set<std::string> negative);
  static LexiconSentimentScorer load(const std::filesystem::path& positive_path,
                                     const std::filesystem::path& negative_path);
  std::pair<double, double> score(const corpus::Document& doc,
                                  std::span<const std::string> tokens) const override;

 private:
  std::unordered_set<std::string> positive_;
  std::unordered_set<std::string> negative_;
};

// Adapter over an externally produced score file keyed by document id
// (TSV: id<TAB>sentiment<TAB>syntax). Missing id is an error naming the id.
class PrecomputedScorer : public SentimentScorer {
 public:
  explicit PrecomputedScorer(std::unordered_map<std::string, std::pair<double, double>> scores);
  static PrecomputedScorer load(const std::filesystem::path& path);
  std::pair<double, double> score(const corpus::Document& doc,
                                  std::span<const std::string> tokens) const override;

 private:
  std::unordered_map<std::string, std::pair<double, double>> scores_;
};

std::pair<double, double> sentiment_syntax_scores(const corpus::Document& doc,
                                                  std::span<const std::string> tokens,
                                                  const SentimentScorer& scorer);

AuxScores compute_aux_scores(const corpus::Document& doc, std::span<const std::string> tokens,
                             const SentimentScorer& scorer, const Dictionary& dict);

// ---------------------------------------------------------------------------
// Extractor framework: fit on the training fold only, then extract per
// document. Fitted extractors are immutable; extract is pure.

struct PreparedDoc {
  const corpus::Document* doc = nullptr;
  const std::vector<std::string>* tokens = nullptr;  // stopword-filtered
  const std::string* canonical = nullptr;            // tokens re-joined by spaces
};

// Preprocessed view of a corpus; built once and shared read-only.
struct PreparedCorpus {
  const corpus::LabeledCorpus* source = nullptr;
  std::vector<std::vector<std::string>> tokens;
  std::vector<std::string> canonical;
  std::vector<int> label_indices;

  static PreparedCorpus build(const corpus::LabeledCorpus& corpus,
                              const preprocess::StopwordSet& stopwords);

  size_t size() const { return canonical.size(); }
  PreparedDoc view(size_t i) const {
    return {&source->documents[i], &tokens[i], &canonical[i]};
  }
};

struct TrainingView {
  const PreparedCorpus* prepared = nullptr;
  std::span<const size_t> indices;  // training-fold document indices
  uint64_t seed = 0;
};

class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual const std::string& name() const = 0;
  virtual void fit(const TrainingView& train) = 0;
  virtual size_t dimension() const = 0;
  virtual FeatureVector extract(const PreparedDoc& doc) const = 0;
};

std::unique_ptr<FeatureExtractor> make_bow_extractor(std::shared_ptr<const Lexicon> lexicon);
std::unique_ptr<FeatureExtractor> make_char_ngram_extractor(int n, size_t k);
std::unique_ptr<FeatureExtractor> make_word_ngram_extractor(int n, size_t k);
std::unique_ptr<FeatureExtractor> make_glove_extractor(std::shared_ptr<const EmbeddingTable> table);
std::unique_ptr<FeatureExtractor> make_ngg_extractor(const ngg::NGGParams& params,
                                                     double rcg_fraction);
std::unique_ptr<FeatureExtractor> make_sentiment_extractor(
    std::shared_ptr<const SentimentScorer> scorer);
std::unique_ptr<FeatureExtractor> make_syntax_extractor(
    std::shared_ptr<const SentimentScorer> scorer);
std::unique_ptr<FeatureExtractor> make_spelling_extractor(
    std::shared_ptr<const Dictionary> dictionary);
std::unique_ptr<FeatureExtractor> make_combo_extractor(
    std::string name, std::vector<std::unique_ptr<FeatureExtractor>> parts);

// Access to the fitted RCGs of an NGG extractor (tests, dumps). Null when the
// extractor is not NGG-backed or not fitted.
const std::vector<ngg::RepresentativeCategoryGraph>* ngg_extractor_rcgs(
    const FeatureExtractor& extractor);

// Row-major dense matrix of extracted features; OpenMP across documents.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double* row(size_t i) { return data.data() + i * cols; }
  const double* row(size_t i) const { return data.data() + i * cols; }
  std::span<const double> row_span(size_t i) const { return {row(i), cols}; }
};

Matrix extract_matrix(const FeatureExtractor& extractor, const PreparedCorpus& prepared,
                      std::span<const size_t> indices);

}  // namespace hategraph::features
