#include "hategraph/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hategraph/csv.hpp"
#include "hategraph/parallel.hpp"
#include "hategraph/util.hpp"

namespace hategraph::features {

FeatureVector FeatureVector::single(std::string name, std::vector<double> values) {
  FeatureVector fv;
  fv.segments.push_back({std::move(name), 0, values.size()});
  fv.values = std::move(values);
  return fv;
}

FeatureVector concat_features(std::span<const FeatureVector> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_features: no parts");
  FeatureVector out;
  size_t total = 0;
  for (const FeatureVector& p : parts) total += p.values.size();
  out.values.reserve(total);
  for (const FeatureVector& p : parts) {
    size_t base = out.values.size();
    for (const FeatureSegment& seg : p.segments) {
      for (size_t i = 0; i < seg.length; ++i) {
        double v = p.values[seg.offset + i];
        if (!std::isfinite(v))
          throw std::runtime_error("concat_features: non-finite value in segment '" + seg.name +
                                   "'");
      }
      out.segments.push_back({seg.name, base + seg.offset, seg.length});
    }
    out.values.insert(out.values.end(), p.values.begin(), p.values.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexicon / BoW

Lexicon::Lexicon(std::vector<std::string> keywords) : keywords_(std::move(keywords)) {
  std::unordered_set<std::string> seen;
  for (const auto& kw : keywords_) {
    if (!seen.insert(kw).second) throw std::runtime_error("lexicon: duplicate keyword '" + kw + "'");
  }
  keyword_tokens_.reserve(keywords_.size());
  for (size_t i = 0; i < keywords_.size(); ++i) {
    keyword_tokens_.push_back(util::split_whitespace(keywords_[i]));
    if (keyword_tokens_.back().empty()) throw std::runtime_error("lexicon: empty keyword");
    by_first_token_[keyword_tokens_.back().front()].push_back(i);
  }
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon file: " + path.string());
  std::vector<std::string> keywords;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view sv = util::trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    keywords.push_back(util::to_lower_ascii(sv));
  }
  if (keywords.empty()) throw std::runtime_error("lexicon file has no entries: " + path.string());
  return Lexicon(std::move(keywords));
}

std::vector<double> Lexicon::count_occurrences(std::span<const std::string> tokens) const {
  std::vector<double> counts(keywords_.size(), 0.0);
  for (size_t t = 0; t < tokens.size(); ++t) {
    auto it = by_first_token_.find(tokens[t]);
    if (it == by_first_token_.end()) continue;
    for (size_t ki : it->second) {
      const auto& kw = keyword_tokens_[ki];
      if (t + kw.size() > tokens.size()) continue;
      bool match = true;
      for (size_t j = 1; j < kw.size() && match; ++j) match = tokens[t + j] == kw[j];
      if (match) counts[ki] += 1.0;
    }
  }
  return counts;
}

FeatureVector extract_bow(std::span<const std::string> tokens, const Lexicon& lexicon) {
  if (lexicon.size() == 0) throw std::invalid_argument("extract_bow: empty lexicon");
  return FeatureVector::single("bow", lexicon.count_occurrences(tokens));
}

// ---------------------------------------------------------------------------
// N-gram vocabularies and bags

namespace {

NGramVocabulary finalize_vocab(NGramVocabulary::Unit unit, int n, size_t k,
                               std::unordered_map<std::string, uint64_t>& freq) {
  if (freq.empty()) throw std::runtime_error("n-gram vocabulary: fitting corpus yields no n-grams");
  std::vector<std::pair<std::string, uint64_t>> all(freq.begin(), freq.end());
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (all.size() > k) all.resize(k);

  NGramVocabulary vocab;
  vocab.unit = unit;
  vocab.n = n;
  vocab.entries = std::move(all);
  for (size_t i = 0; i < vocab.entries.size(); ++i) vocab.index[vocab.entries[i].first] = i;
  return vocab;
}

void count_char_ngrams(std::string_view text, int n,
                       std::unordered_map<std::string, uint64_t>& freq) {
  size_t un = static_cast<size_t>(n);
  if (text.size() < un) return;
  for (size_t i = 0; i + un <= text.size(); ++i) freq[std::string(text.substr(i, un))] += 1;
}

void count_word_ngrams(std::span<const std::string> tokens, int n,
                       std::unordered_map<std::string, uint64_t>& freq) {
  size_t un = static_cast<size_t>(n);
  if (tokens.size() < un) return;
  for (size_t i = 0; i + un <= tokens.size(); ++i) {
    std::string gram = tokens[i];
    for (size_t j = 1; j < un; ++j) {
      gram += ' ';
      gram += tokens[i + j];
    }
    freq[std::move(gram)] += 1;
  }
}

}  // namespace

NGramVocabulary build_char_ngram_vocab(std::span<const std::string> texts, int n, size_t k) {
  if (texts.empty()) throw std::invalid_argument("build_char_ngram_vocab: empty corpus");
  if (n < 1 || k < 1) throw std::invalid_argument("build_char_ngram_vocab: n and K must be >= 1");
  std::unordered_map<std::string, uint64_t> freq;
  for (const auto& t : texts) count_char_ngrams(t, n, freq);
  return finalize_vocab(NGramVocabulary::Unit::Char, n, k, freq);
}

NGramVocabulary build_word_ngram_vocab(std::span<const std::vector<std::string>> token_seqs, int n,
                                       size_t k) {
  if (token_seqs.empty()) throw std::invalid_argument("build_word_ngram_vocab: empty corpus");
  if (n < 1 || k < 1) throw std::invalid_argument("build_word_ngram_vocab: n and K must be >= 1");
  std::unordered_map<std::string, uint64_t> freq;
  for (const auto& seq : token_seqs) count_word_ngrams(seq, n, freq);
  return finalize_vocab(NGramVocabulary::Unit::Word, n, k, freq);
}

FeatureVector extract_char_ngram_bag(std::string_view text, const NGramVocabulary& vocab) {
  std::vector<double> counts(vocab.size(), 0.0);
  size_t un = static_cast<size_t>(vocab.n);
  if (text.size() >= un) {
    std::string gram;
    for (size_t i = 0; i + un <= text.size(); ++i) {
      gram.assign(text.substr(i, un));
      auto it = vocab.index.find(gram);
      if (it != vocab.index.end()) counts[it->second] += 1.0;
    }
  }
  return FeatureVector::single("c-ngrams", std::move(counts));
}

FeatureVector extract_word_ngram_bag(std::span<const std::string> tokens,
                                     const NGramVocabulary& vocab) {
  std::vector<double> counts(vocab.size(), 0.0);
  size_t un = static_cast<size_t>(vocab.n);
  if (tokens.size() >= un) {
    for (size_t i = 0; i + un <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (size_t j = 1; j < un; ++j) {
        gram += ' ';
        gram += tokens[i + j];
      }
      auto it = vocab.index.find(gram);
      if (it != vocab.index.end()) counts[it->second] += 1.0;
    }
  }
  return FeatureVector::single("w-ngrams", std::move(counts));
}

// ---------------------------------------------------------------------------
// Embeddings

EmbeddingTable::EmbeddingTable(size_t dimension,
                               std::unordered_map<std::string, std::vector<float>> vectors)
    : dimension_(dimension), vectors_(std::move(vectors)) {
  for (const auto& [word, vec] : vectors_) {
    if (vec.size() != dimension_)
      throw std::runtime_error("embedding table: vector for '" + word + "' has wrong dimension");
  }
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path, size_t expected_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path.string());
  EmbeddingTable table;
  table.dimension_ = expected_dim;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (util::trim(line).empty()) continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    std::vector<float> vec;
    vec.reserve(expected_dim);
    double v;
    while (ss >> v) vec.push_back(static_cast<float>(v));
    if (vec.size() != expected_dim)
      throw std::runtime_error("embedding file " + path.string() + ": line " +
                               std::to_string(lineno) + " has " + std::to_string(vec.size()) +
                               " components, expected " + std::to_string(expected_dim));
    auto [it, inserted] = table.vectors_.insert_or_assign(std::move(word), std::move(vec));
    if (!inserted) ++table.duplicates_;
  }
  return table;
}

const std::vector<float>* EmbeddingTable::find(const std::string& word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? nullptr : &it->second;
}

FeatureVector extract_mean_embedding(std::span<const std::string> tokens,
                                     const EmbeddingTable& table) {
  std::vector<double> mean(table.dimension(), 0.0);
  size_t hits = 0;
  for (const auto& t : tokens) {
    const std::vector<float>* vec = table.find(t);
    if (!vec) continue;  // out-of-vocabulary tokens are discarded
    ++hits;
    for (size_t i = 0; i < mean.size(); ++i) mean[i] += (*vec)[i];
  }
  if (hits > 0)
    for (double& v : mean) v /= static_cast<double>(hits);
  return FeatureVector::single("glove", std::move(mean));
}

// ---------------------------------------------------------------------------
// Spelling

size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  std::vector<size_t> row(a.size() + 1);
  for (size_t i = 0; i <= a.size(); ++i) row[i] = i;
  for (size_t j = 1; j <= b.size(); ++j) {
    size_t diag = row[0];
    row[0] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
      size_t saved = row[i];
      size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[i] = std::min({row[i] + 1, row[i - 1] + 1, sub});
      diag = saved;
    }
  }
  return row[a.size()];
}

Dictionary::Dictionary(std::vector<std::string> words) {
  for (auto& w : words) {
    if (w.empty()) continue;
    if (!words_.insert(w).second) continue;
    if (w.size() >= by_length_.size()) by_length_.resize(w.size() + 1);
    by_length_[w.size()].push_back(std::move(w));
  }
  size_ = words_.size();
  if (size_ == 0) throw std::runtime_error("dictionary has no entries");
}

Dictionary Dictionary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dictionary file: " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view sv = util::trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    words.push_back(util::to_lower_ascii(sv));
  }
  return Dictionary(std::move(words));
}

size_t Dictionary::min_distance(const std::string& token) const {
  if (words_.count(token)) return 0;
  // Scan length buckets outward from the token length. Words in a bucket at
  // length distance d have edit distance >= d, so the search stops as soon
  // as d reaches the best distance found.
  const size_t tlen = token.size();
  const size_t max_len = by_length_.size();  // exclusive
  size_t best = std::max(tlen, max_len);     // >= distance to any word
  for (size_t d = 0; d < best; ++d) {
    if (d > tlen && tlen + d >= max_len) break;  // no buckets left in either direction
    for (int sign : {+1, -1}) {
      if (d == 0 && sign < 0) continue;
      if (sign < 0 && d > tlen) continue;
      size_t len = sign > 0 ? tlen + d : tlen - d;
      if (len >= max_len) continue;
      for (const std::string& w : by_length_[len]) {
        size_t dist = levenshtein(token, w);
        if (dist < best) best = dist;
        if (best == d) return best;  // lower bound met, nothing closer exists
      }
    }
  }
  return best;
}

double spelling_score(std::span<const std::string> tokens, const Dictionary& dict) {
  if (tokens.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : tokens) sum += static_cast<double>(dict.min_distance(t));
  return sum / static_cast<double>(tokens.size());
}

// ---------------------------------------------------------------------------
// Sentiment / syntax scorers

namespace {
std::unordered_set<std::string> load_word_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open word list: " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view sv = util::trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    words.insert(util::to_lower_ascii(sv));
  }
  return words;
}
}  // namespace

LexiconSentimentScorer::LexiconSentimentScorer(std::unordered_set<std::string> positive,
                                               std::unordered_set<std::string> negative)
    : positive_(std::move(positive)), negative_(std::move(negative)) {}

LexiconSentimentScorer LexiconSentimentScorer::load(const std::filesystem::path& positive_path,
                                                    const std::filesystem::path& negative_path) {
  return LexiconSentimentScorer(load_word_set(positive_path), load_word_set(negative_path));
}

std::pair<double, double> LexiconSentimentScorer::score(
    const corpus::Document&, std::span<const std::string> tokens) const {
  if (tokens.empty()) return {0.0, 0.0};
  long long pos = 0, neg = 0;
  for (const auto& t : tokens) {
    if (positive_.count(t)) ++pos;
    if (negative_.count(t)) ++neg;
  }
  return {static_cast<double>(pos - neg) / static_cast<double>(tokens.size()), 0.0};
}

PrecomputedScorer::PrecomputedScorer(
    std::unordered_map<std::string, std::pair<double, double>> scores)
    : scores_(std::move(scores)) {}

PrecomputedScorer PrecomputedScorer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open precomputed score file: " + path.string());
  std::unordered_map<std::string, std::pair<double, double>> scores;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (util::trim(line).empty()) continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw std::runtime_error("precomputed score file: malformed line " + std::to_string(lineno));
    std::string id = line.substr(0, t1);
    double sentiment = std::stod(line.substr(t1 + 1, t2 - t1 - 1));
    double syntax = std::stod(line.substr(t2 + 1));
    scores[std::move(id)] = {sentiment, syntax};
  }
  return PrecomputedScorer(std::move(scores));
}

std::pair<double, double> PrecomputedScorer::score(const corpus::Document& doc,
                                                   std::span<const std::string>) const {
  auto it = scores_.find(doc.id);
  if (it == scores_.end())
    throw std::runtime_error("precomputed scores: no entry for document id '" + doc.id + "'");
  return it->second;
}

std::pair<double, double> sentiment_syntax_scores(const corpus::Document& doc,
                                                  std::span<const std::string> tokens,
                                                  const SentimentScorer& scorer) {
  auto [sentiment, syntax] = scorer.score(doc, tokens);
  if (!std::isfinite(sentiment) || !std::isfinite(syntax))
    throw std::runtime_error("sentiment scorer returned non-finite value for document '" + doc.id +
                             "'");
  return {sentiment, syntax};
}

AuxScores compute_aux_scores(const corpus::Document& doc, std::span<const std::string> tokens,
                             const SentimentScorer& scorer, const Dictionary& dict) {
  auto [sentiment, syntax] = sentiment_syntax_scores(doc, tokens, scorer);
  return {sentiment, syntax, spelling_score(tokens, dict)};
}

}  // namespace hategraph::features
