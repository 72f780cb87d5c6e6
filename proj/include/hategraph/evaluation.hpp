#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hategraph/classifiers.hpp"
#include "hategraph/corpus.hpp"
#include "hategraph/features.hpp"

namespace hategraph::evaluation {

struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<uint64_t>> counts;  // rows = true, columns = predicted

  uint64_t total() const;
};

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          const std::vector<std::string>& labels);

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  uint64_t support = 0;
};

struct EvalScores {
  std::vector<ClassScore> per_class;
  double macro_f = 0.0;     // unweighted mean of per-class F1
  double micro_f = 0.0;     // pooled TP/FP/FN; equals accuracy for single-label
  double weighted_f = 0.0;  // support-weighted mean of per-class F1
  double accuracy = 0.0;
};

// 0/0 conventions: undefined precision/recall/F -> 0.
EvalScores scores(const ConfusionMatrix& cm);

// Scores of the constant classifier predicting the most frequent label.
EvalScores majority_baseline(std::span<const int> y, const std::vector<std::string>& labels);

struct RunRecord {
  std::string feature_config;
  std::string classifier;
  int fold = 0;
  EvalScores eval;
  double seconds = 0.0;
};

using ExtractorFactory = std::function<std::unique_ptr<features::FeatureExtractor>()>;

// One record per fold. All fitted state (vocabularies, RCGs, standardization,
// models) derives from the training fold only; the feature extractor is
// created fresh per fold via the factory.
std::vector<RunRecord> cross_validate(const features::PreparedCorpus& prepared,
                                      const corpus::FoldPlan& folds,
                                      const ExtractorFactory& make_extractor,
                                      const std::string& feature_name,
                                      const classifiers::ClassifierSpec& spec,
                                      const std::string& classifier_name, uint64_t seed);

// Fold evaluation shared by cross_validate and the grid runner: fits the
// extractor on the training fold, trains every classifier on the extracted
// matrices, and scores the held-out fold.
struct FoldCell {
  classifiers::ClassifierSpec spec;
  std::string classifier_name;
};

struct FoldOutcome {
  std::vector<RunRecord> records;  // one per cell
  std::vector<std::unique_ptr<classifiers::TrainedModel>> models;
};

FoldOutcome evaluate_fold(const features::PreparedCorpus& prepared, const corpus::FoldPlan& folds,
                          int fold, const features::FeatureExtractor& fitted_extractor,
                          const std::string& feature_name, std::span<const FoldCell> cells,
                          bool keep_models);

// CSV with header feature_config,classifier,fold,macro_f,micro_f,weighted_f,seconds.
// Timing values are suppressed (written as 0.000) unless emit_timings is set,
// keeping default outputs byte-reproducible.
std::string results_csv(std::span<const RunRecord> records, bool emit_timings);

}  // namespace hategraph::evaluation
