#include <cmath>
#include <ostream>
#include <stdexcept>

#include "hategraph/classifiers.hpp"
#include "hategraph/parallel.hpp"

namespace hategraph::classifiers {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::NB: return "NB";
    case Algorithm::LR: return "LR";
    case Algorithm::KNN: return "KNN";
    case Algorithm::RF: return "RF";
    case Algorithm::MLP: return "MLP";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  if (name == "NB") return Algorithm::NB;
  if (name == "LR") return Algorithm::LR;
  if (name == "KNN") return Algorithm::KNN;
  if (name == "RF") return Algorithm::RF;
  if (name == "MLP") return Algorithm::MLP;
  return std::nullopt;
}

void Hyperparameters::validate(Algorithm algorithm) const {
  switch (algorithm) {
    case Algorithm::NB:
      if (nb_var_floor <= 0) throw std::invalid_argument("nb_var_floor must be > 0");
      break;
    case Algorithm::LR:
      if (lr_l2 < 0) throw std::invalid_argument("lr_l2 must be >= 0");
      if (lr_tolerance <= 0) throw std::invalid_argument("lr_tolerance must be > 0");
      if (lr_max_iterations < 1) throw std::invalid_argument("lr_max_iterations must be >= 1");
      break;
    case Algorithm::KNN:
      if (knn_k < 1) throw std::invalid_argument("knn_k must be >= 1");
      break;
    case Algorithm::RF:
      if (rf_trees < 1) throw std::invalid_argument("rf_trees must be >= 1");
      if (rf_min_samples_split < 2)
        throw std::invalid_argument("rf_min_samples_split must be >= 2");
      break;
    case Algorithm::MLP:
      if (mlp_hidden.empty()) throw std::invalid_argument("mlp_hidden must be non-empty");
      for (int h : mlp_hidden)
        if (h < 1) throw std::invalid_argument("mlp_hidden sizes must be >= 1");
      if (mlp_dropout < 0 || mlp_dropout >= 1)
        throw std::invalid_argument("mlp_dropout must be in [0, 1)");
      if (mlp_learning_rate <= 0) throw std::invalid_argument("mlp_learning_rate must be > 0");
      if (mlp_epochs < 1) throw std::invalid_argument("mlp_epochs must be >= 1");
      if (mlp_batch_size < 1) throw std::invalid_argument("mlp_batch_size must be >= 1");
      break;
  }
}

Standardizer Standardizer::fit(const features::Matrix& x) {
  Standardizer s;
  s.mean.assign(x.cols, 0.0);
  s.scale.assign(x.cols, 1.0);
  if (x.rows == 0) return s;
  for (size_t r = 0; r < x.rows; ++r) {
    const double* row = x.row(r);
    for (size_t c = 0; c < x.cols; ++c) s.mean[c] += row[c];
  }
  for (double& m : s.mean) m /= static_cast<double>(x.rows);
  std::vector<double> var(x.cols, 0.0);
  for (size_t r = 0; r < x.rows; ++r) {
    const double* row = x.row(r);
    for (size_t c = 0; c < x.cols; ++c) {
      double d = row[c] - s.mean[c];
      var[c] += d * d;
    }
  }
  for (size_t c = 0; c < x.cols; ++c) {
    double sd = std::sqrt(var[c] / static_cast<double>(x.rows));
    s.scale[c] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
  for (size_t c = 0; c < in.size(); ++c) out[c] = (in[c] - mean[c]) / scale[c];
}

features::Matrix Standardizer::transform(const features::Matrix& x) const {
  features::Matrix out(x.rows, x.cols);
  parallel_for(x.rows, [&](size_t r) { apply(x.row_span(r), {out.row(r), out.cols}); });
  return out;
}

void TrainedModel::check_dimension(std::span<const double> x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("predict: input has dimension " + std::to_string(x.size()) +
                                ", model expects " + std::to_string(dim_));
}

Prediction TrainedModel::make_prediction(int label_index, double confidence) const {
  if (confidence < 0.0) confidence = 0.0;
  if (confidence > 1.0) confidence = 1.0;
  return {label_index, labels_[static_cast<size_t>(label_index)], confidence};
}

int TrainedModel::argmax_first(std::span<const double> scores) const {
  int best = 0;
  for (size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = static_cast<int>(i);
  return best;
}

std::vector<Prediction> predict_batch(const TrainedModel& model, const features::Matrix& x) {
  std::vector<Prediction> out(x.rows);
  parallel_for(x.rows, [&](size_t r) { out[r] = model.predict(x.row_span(r)); });
  return out;
}

}  // namespace hategraph::classifiers
