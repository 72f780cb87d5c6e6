#include "hategraph/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "hategraph/csv.hpp"
#include "hategraph/rng.hpp"
#include "hategraph/util.hpp"

namespace hategraph::corpus {

int LabeledCorpus::label_index(const std::string& label) const {
  for (size_t i = 0; i < label_set.size(); ++i)
    if (label_set[i] == label) return static_cast<int>(i);
  return -1;
}

std::vector<int> LabeledCorpus::label_indices() const {
  std::vector<int> out(documents.size());
  for (size_t i = 0; i < documents.size(); ++i) out[i] = label_index(documents[i].label);
  return out;
}

namespace {

struct ColumnIndices {
  int id = -1;
  int text = -1;
  int label = -1;
};

ColumnIndices resolve_columns(const std::vector<std::string>& header, const ColumnMap& columns,
                              const std::filesystem::path& path) {
  ColumnIndices idx;
  auto find = [&](const std::string& name) -> int {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  };
  if (!columns.id.empty()) {
    idx.id = find(columns.id);
    if (idx.id < 0)
      throw std::runtime_error("missing id column '" + columns.id + "' in " + path.string());
  }
  idx.text = find(columns.text);
  if (idx.text < 0)
    throw std::runtime_error("missing text column '" + columns.text + "' in " + path.string());
  idx.label = find(columns.label);
  if (idx.label < 0)
    throw std::runtime_error("missing label column '" + columns.label + "' in " + path.string());
  return idx;
}

using LabelNormalizer = std::function<std::optional<std::string>(const std::string&)>;

LoadResult load_delimited(const std::filesystem::path& path, const ColumnMap& columns,
                          char delimiter, const std::string& provenance,
                          const std::vector<std::string>& label_set,
                          const LabelNormalizer& normalize) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());
  if (delimiter == 0) delimiter = csv::detect_delimiter(path);

  csv::DelimitedReader reader(in, delimiter);
  std::vector<std::string> header;
  if (!reader.next_record(header))
    throw std::runtime_error("dataset file is empty (no header): " + path.string());
  ColumnIndices idx = resolve_columns(header, columns, path);

  LoadResult result;
  result.corpus.provenance = provenance;
  result.corpus.label_set = label_set;

  std::vector<std::string> fields;
  size_t row = 0;
  while (reader.next_record(fields)) {
    ++row;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    size_t needed = static_cast<size_t>(std::max({idx.id, idx.text, idx.label}));
    if (fields.size() <= needed) {
      result.errors.push_back({row, "too few columns (" + std::to_string(fields.size()) + ")"});
      continue;
    }
    const std::string& raw_label = fields[static_cast<size_t>(idx.label)];
    std::optional<std::string> label = normalize(std::string(util::trim(raw_label)));
    if (!label) {
      result.errors.push_back({row, "unmapped label value '" + raw_label + "'"});
      continue;
    }
    std::string text = fields[static_cast<size_t>(idx.text)];
    if (util::trim(text).empty()) {
      ++result.skipped_empty;
      continue;
    }
    std::string id = idx.id >= 0 ? fields[static_cast<size_t>(idx.id)] : std::to_string(row);
    result.corpus.documents.push_back({std::move(id), std::move(text), std::move(*label)});
  }
  return result;
}

}  // namespace

LoadResult load_hsol(const std::filesystem::path& path, const ColumnMap& columns, char delimiter) {
  return load_delimited(path, columns, delimiter, "HSOL", {"HateSpeech", "Offensive", "Clean"},
                        [](const std::string& v) -> std::optional<std::string> {
                          if (v == "0") return "HateSpeech";
                          if (v == "1") return "Offensive";
                          if (v == "2") return "Clean";
                          return std::nullopt;
                        });
}

LoadResult load_rs(const std::filesystem::path& path, const ColumnMap& columns, char delimiter) {
  return load_delimited(path, columns, delimiter, "RS", {"Racist", "Sexist", "None"},
                        [](const std::string& v) -> std::optional<std::string> {
                          std::string lower = util::to_lower_ascii(v);
                          if (lower == "racism") return "Racist";
                          if (lower == "sexism") return "Sexist";
                          if (lower == "none") return "None";
                          return std::nullopt;
                        });
}

LabeledCorpus combine_binary(const LabeledCorpus& rs, const LabeledCorpus& hsol) {
  LabeledCorpus out;
  out.provenance = "combined";
  out.label_set = {"HateSpeech", "Clean"};
  for (const Document& d : rs.documents) {
    if (d.label == "Racist" || d.label == "Sexist")
      out.documents.push_back({"rs:" + d.id, d.text, "HateSpeech"});
    else if (d.label == "None")
      out.documents.push_back({"rs:" + d.id, d.text, "Clean"});
  }
  for (const Document& d : hsol.documents) {
    if (d.label == "HateSpeech")
      out.documents.push_back({"hsol:" + d.id, d.text, "HateSpeech"});
    else if (d.label == "Clean")
      out.documents.push_back({"hsol:" + d.id, d.text, "Clean"});
    // Offensive dropped
  }
  if (out.documents.empty())
    throw std::runtime_error("combine_binary: no qualifying instances in either corpus");
  return out;
}

std::vector<size_t> FoldPlan::train_indices(int fold) const {
  std::vector<size_t> out;
  for (size_t f = 0; f < folds.size(); ++f) {
    if (static_cast<int>(f) == fold) continue;
    out.insert(out.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

FoldPlan stratified_folds(const LabeledCorpus& corpus, int k, uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_folds: k must be >= 2");

  // Group document indices by label, preserving corpus order.
  std::vector<std::vector<size_t>> by_label(corpus.label_set.size());
  for (size_t i = 0; i < corpus.documents.size(); ++i) {
    int li = corpus.label_index(corpus.documents[i].label);
    if (li < 0)
      throw std::runtime_error("document label not in label_set: " + corpus.documents[i].label);
    by_label[static_cast<size_t>(li)].push_back(i);
  }
  for (size_t li = 0; li < by_label.size(); ++li) {
    if (static_cast<int>(by_label[li].size()) < k)
      throw std::runtime_error("label '" + corpus.label_set[li] + "' has " +
                               std::to_string(by_label[li].size()) + " instances, fewer than k=" +
                               std::to_string(k));
  }

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.assign(static_cast<size_t>(k), {});
  for (size_t li = 0; li < by_label.size(); ++li) {
    Rng rng(derive_seed(seed, li));
    rng.shuffle(by_label[li]);
    for (size_t i = 0; i < by_label[li].size(); ++i)
      plan.folds[i % static_cast<size_t>(k)].push_back(by_label[li][i]);
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

}  // namespace hategraph::corpus
