#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hategraph::corpus {

struct Document {
  std::string id;
  std::string text;
  std::string label;
};

struct LabeledCorpus {
  std::vector<Document> documents;
  std::vector<std::string> label_set;  // order fixes model-vector coordinates
  std::string provenance;              // RS | HSOL | combined

  // -1 when absent.
  int label_index(const std::string& label) const;
  std::vector<int> label_indices() const;
};

struct RowError {
  size_t row;  // 1-based data-record number (header not counted)
  std::string message;
};

struct LoadResult {
  LabeledCorpus corpus;
  std::vector<RowError> errors;
  size_t skipped_empty = 0;

  bool ok() const { return errors.empty(); }
};

struct ColumnMap {
  std::string id;     // empty: use the record ordinal
  std::string text;
  std::string label;
};

inline ColumnMap default_hsol_columns() { return {"", "tweet", "class"}; }
inline ColumnMap default_rs_columns() { return {"id", "text", "label"}; }

// HSOL: labels 0 -> HateSpeech, 1 -> Offensive, 2 -> Clean.
// delimiter 0 selects auto-detection from the file extension.
LoadResult load_hsol(const std::filesystem::path& path, const ColumnMap& columns = default_hsol_columns(),
                     char delimiter = 0);

// RS: labels racism/sexism/none (case-insensitive) -> Racist/Sexist/None.
LoadResult load_rs(const std::filesystem::path& path, const ColumnMap& columns = default_rs_columns(),
                   char delimiter = 0);

// Binary corpus: RS Racist/Sexist -> HateSpeech, None -> Clean; HSOL
// HateSpeech -> HateSpeech, Clean -> Clean, Offensive dropped. Ids are
// prefixed "rs:" / "hsol:".
LabeledCorpus combine_binary(const LabeledCorpus& rs, const LabeledCorpus& hsol);

struct FoldPlan {
  int k = 0;
  uint64_t seed = 0;
  std::vector<std::vector<size_t>> folds;  // disjoint, sorted index sets

  std::vector<size_t> train_indices(int fold) const;
};

// Stratified k-fold split; deterministic in (corpus order, k, seed); per-fold
// class counts are within one document of n_c/k.
FoldPlan stratified_folds(const LabeledCorpus& corpus, int k, uint64_t seed);

}  // namespace hategraph::corpus
