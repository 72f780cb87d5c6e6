#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hategraph/classifiers.hpp"
#include "hategraph/ngg.hpp"

namespace hategraph::config {

enum class Task { BinaryCombined, MulticlassRS, MulticlassHSOL };

std::string task_name(Task task);
std::optional<Task> parse_task(const std::string& name);

struct DatasetConfig {
  std::string rs_path;
  std::string hsol_path;
  corpus::ColumnMap rs_columns = corpus::default_rs_columns();
  corpus::ColumnMap hsol_columns = corpus::default_hsol_columns();
  char delimiter = 0;  // 0 = auto by extension
};

struct ComboConfig {
  std::string name;
  std::vector<std::string> parts;  // resolved feature names
};

struct ClassifierConfig {
  classifiers::Algorithm algorithm = classifiers::Algorithm::LR;
  classifiers::Hyperparameters hp;
  std::string display_name;  // algorithm name
};

struct ResourceConfig {
  std::string stopwords;
  std::string lexicon;
  std::string dictionary;
  std::string embeddings;
  size_t embedding_dim = 50;
  std::string sentiment_positive;
  std::string sentiment_negative;
  std::string precomputed_scores;  // empty: lexicon sentiment default
};

struct NgramConfig {
  int char_n = 3;
  int word_n = 2;
  size_t top_k = 100;
};

struct ExperimentConfig {
  Task task = Task::BinaryCombined;
  DatasetConfig dataset;
  std::vector<std::string> features;
  std::vector<ComboConfig> combos;
  std::vector<ClassifierConfig> classifiers;
  int folds = 10;
  uint64_t seed = 42;
  int jobs = 1;
  ResourceConfig resources;
  ngg::NGGParams ngg_params;
  double rcg_fraction = 0.9;
  NgramConfig ngrams;
  double alpha = 0.05;
  std::string output_dir = "out";
  bool emit_timings = false;
  bool dump_models = false;

  // feature names in grid order: individual features then combos
  std::vector<std::string> grid_feature_names() const;
  bool uses_feature(const std::string& name) const;  // directly or via combo
};

struct CliOverrides {
  std::optional<std::string> out;
  std::optional<uint64_t> seed;
  std::optional<int> folds;
  std::optional<int> jobs;
  std::optional<std::string> task;
};

struct ValidationResult {
  ExperimentConfig config;
  std::vector<std::string> errors;  // each names the offending JSON path

  bool ok() const { return errors.empty(); }
};

// Parses and validates; unknown keys are rejected; defaults are filled into
// the returned config. Overrides apply before semantic validation.
ValidationResult validate_config(const std::filesystem::path& path,
                                 const CliOverrides& overrides = {});

// Resolved-config snapshot (round-trips through validate_config).
std::string config_to_json(const ExperimentConfig& config);

inline constexpr const char* kKnownFeatures[] = {"ngg",       "bow",    "glove",
                                                 "c-ngrams",  "w-ngrams", "sentiment",
                                                 "syntax",    "spelling"};

}  // namespace hategraph::config
