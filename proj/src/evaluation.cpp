#include "hategraph/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <stdexcept>

#include "hategraph/rng.hpp"
#include "hategraph/util.hpp"

namespace hategraph::evaluation {

uint64_t ConfusionMatrix::total() const {
  uint64_t t = 0;
  for (const auto& row : counts)
    for (uint64_t c : row) t += c;
  return t;
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          const std::vector<std::string>& labels) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("confusion: y_true and y_pred length mismatch");
  ConfusionMatrix cm;
  cm.labels = labels;
  cm.counts.assign(labels.size(), std::vector<uint64_t>(labels.size(), 0));
  for (size_t i = 0; i < y_true.size(); ++i) {
    int t = y_true[i], p = y_pred[i];
    if (t < 0 || static_cast<size_t>(t) >= labels.size() || p < 0 ||
        static_cast<size_t>(p) >= labels.size())
      throw std::invalid_argument("confusion: label index out of range at position " +
                                  std::to_string(i));
    ++cm.counts[static_cast<size_t>(t)][static_cast<size_t>(p)];
  }
  return cm;
}

EvalScores scores(const ConfusionMatrix& cm) {
  const size_t n = cm.labels.size();
  if (n == 0 || cm.total() == 0) throw std::invalid_argument("scores: empty confusion matrix");

  EvalScores out;
  out.per_class.resize(n);
  uint64_t pooled_tp = 0, pooled_fp = 0, pooled_fn = 0, total = 0;
  double macro_sum = 0.0, weighted_sum = 0.0;

  for (size_t c = 0; c < n; ++c) {
    uint64_t tp = cm.counts[c][c];
    uint64_t fn = 0, fp = 0, support = 0;
    for (size_t j = 0; j < n; ++j) {
      support += cm.counts[c][j];
      if (j != c) {
        fn += cm.counts[c][j];
        fp += cm.counts[j][c];
      }
    }
    ClassScore& s = out.per_class[c];
    s.support = support;
    s.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    s.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    s.f1 = (s.precision + s.recall) > 0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                                        : 0.0;
    macro_sum += s.f1;
    weighted_sum += s.f1 * static_cast<double>(support);
    pooled_tp += tp;
    pooled_fp += fp;
    pooled_fn += fn;
    total += support;
  }

  out.macro_f = macro_sum / static_cast<double>(n);
  out.weighted_f = weighted_sum / static_cast<double>(total);
  double micro_p = (pooled_tp + pooled_fp) > 0
                       ? static_cast<double>(pooled_tp) / static_cast<double>(pooled_tp + pooled_fp)
                       : 0.0;
  double micro_r = (pooled_tp + pooled_fn) > 0
                       ? static_cast<double>(pooled_tp) / static_cast<double>(pooled_tp + pooled_fn)
                       : 0.0;
  out.micro_f = (micro_p + micro_r) > 0 ? 2.0 * micro_p * micro_r / (micro_p + micro_r) : 0.0;
  out.accuracy = static_cast<double>(pooled_tp) / static_cast<double>(total);
  return out;
}

EvalScores majority_baseline(std::span<const int> y, const std::vector<std::string>& labels) {
  if (y.empty()) throw std::invalid_argument("majority_baseline: empty input");
  std::vector<uint64_t> counts(labels.size(), 0);
  for (int label : y) ++counts[static_cast<size_t>(label)];
  int majority = 0;
  for (size_t c = 1; c < labels.size(); ++c)
    if (counts[c] > counts[static_cast<size_t>(majority)]) majority = static_cast<int>(c);
  std::vector<int> pred(y.size(), majority);
  return scores(confusion(y, pred, labels));
}

FoldOutcome evaluate_fold(const features::PreparedCorpus& prepared, const corpus::FoldPlan& folds,
                          int fold, const features::FeatureExtractor& fitted_extractor,
                          const std::string& feature_name, std::span<const FoldCell> cells,
                          bool keep_models) {
  const std::vector<size_t> train_idx = folds.train_indices(fold);
  const std::vector<size_t>& test_idx = folds.folds[static_cast<size_t>(fold)];
  const std::vector<std::string>& label_set = prepared.source->label_set;

  features::Matrix x_train = features::extract_matrix(fitted_extractor, prepared, train_idx);
  features::Matrix x_test = features::extract_matrix(fitted_extractor, prepared, test_idx);

  std::vector<int> y_train(train_idx.size()), y_test(test_idx.size());
  for (size_t i = 0; i < train_idx.size(); ++i) y_train[i] = prepared.label_indices[train_idx[i]];
  for (size_t i = 0; i < test_idx.size(); ++i) y_test[i] = prepared.label_indices[test_idx[i]];

  FoldOutcome out;
  for (const FoldCell& cell : cells) {
    auto start = std::chrono::steady_clock::now();
    std::unique_ptr<classifiers::TrainedModel> model;
    try {
      model = classifiers::train(x_train, y_train, label_set, cell.spec);
    } catch (const std::exception& e) {
      throw std::runtime_error("fold " + std::to_string(fold) + ", " + feature_name + " x " +
                               cell.classifier_name + ": " + e.what());
    }
    std::vector<classifiers::Prediction> preds = classifiers::predict_batch(*model, x_test);
    std::vector<int> y_pred(preds.size());
    for (size_t i = 0; i < preds.size(); ++i) y_pred[i] = preds[i].label_index;
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    RunRecord record;
    record.feature_config = feature_name;
    record.classifier = cell.classifier_name;
    record.fold = fold;
    record.eval = scores(confusion(y_test, y_pred, label_set));
    record.seconds = seconds;
    out.records.push_back(std::move(record));
    if (keep_models) out.models.push_back(std::move(model));
  }
  return out;
}

std::vector<RunRecord> cross_validate(const features::PreparedCorpus& prepared,
                                      const corpus::FoldPlan& folds,
                                      const ExtractorFactory& make_extractor,
                                      const std::string& feature_name,
                                      const classifiers::ClassifierSpec& spec,
                                      const std::string& classifier_name, uint64_t seed) {
  std::vector<RunRecord> records;
  for (int fold = 0; fold < folds.k; ++fold) {
    std::unique_ptr<features::FeatureExtractor> extractor = make_extractor();
    std::vector<size_t> train_idx = folds.train_indices(fold);
    features::TrainingView view{&prepared, train_idx,
                                derive_seed(seed, util::fnv1a64(feature_name),
                                            static_cast<uint64_t>(fold))};
    try {
      extractor->fit(view);
    } catch (const std::exception& e) {
      throw std::runtime_error("fold " + std::to_string(fold) + ", fitting " + feature_name +
                               ": " + e.what());
    }
    classifiers::ClassifierSpec cell_spec = spec;
    cell_spec.seed = derive_seed(seed, util::fnv1a64(feature_name + "|" + classifier_name),
                                 static_cast<uint64_t>(fold));
    FoldCell cell{cell_spec, classifier_name};
    FoldOutcome outcome =
        evaluate_fold(prepared, folds, fold, *extractor, feature_name, {&cell, 1}, false);
    for (auto& r : outcome.records) records.push_back(std::move(r));
  }
  return records;
}

std::string results_csv(std::span<const RunRecord> records, bool emit_timings) {
  std::ostringstream out;
  out << "feature_config,classifier,fold,macro_f,micro_f,weighted_f,seconds\n";
  for (const RunRecord& r : records) {
    out << r.feature_config << ',' << r.classifier << ',' << r.fold << ','
        << util::format_double(r.eval.macro_f, 6) << ',' << util::format_double(r.eval.micro_f, 6)
        << ',' << util::format_double(r.eval.weighted_f, 6) << ','
        << util::format_double(emit_timings ? r.seconds : 0.0, 3) << '\n';
  }
  return out.str();
}

}  // namespace hategraph::evaluation
