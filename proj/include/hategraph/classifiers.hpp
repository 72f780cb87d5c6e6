#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hategraph/features.hpp"

namespace hategraph::classifiers {

enum class Algorithm { NB, LR, KNN, RF, MLP };

std::string algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(const std::string& name);

struct Hyperparameters {
  // NB
  double nb_var_floor = 1e-9;
  // LR (one-vs-rest, accelerated full-batch gradient descent)
  double lr_l2 = 1.0;
  double lr_tolerance = 1e-6;
  int lr_max_iterations = 1000;
  // KNN
  int knn_k = 5;
  // RF
  int rf_trees = 100;
  int rf_min_samples_split = 2;
  // MLP
  std::vector<int> mlp_hidden = {64, 32, 16};
  double mlp_dropout = 0.3;
  double mlp_learning_rate = 1e-3;
  int mlp_epochs = 50;
  int mlp_batch_size = 32;

  void validate(Algorithm algorithm) const;  // throws on out-of-range values
};

struct ClassifierSpec {
  Algorithm algorithm = Algorithm::LR;
  Hyperparameters hp;
  uint64_t seed = 0;
};

struct Prediction {
  int label_index = -1;
  std::string label;
  double confidence = 0.0;  // in [0, 1]
};

// Per-feature z-score statistics fitted on training data. Zero-variance
// features get scale 1 so they map to a constant.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const features::Matrix& x);
  void apply(std::span<const double> in, std::span<double> out) const;
  features::Matrix transform(const features::Matrix& x) const;
};

class TrainedModel {
 public:
  virtual ~TrainedModel() = default;
  virtual Algorithm algorithm() const = 0;
  virtual Prediction predict(std::span<const double> x) const = 0;
  virtual void save(std::ostream& out) const = 0;

  const std::vector<std::string>& labels() const { return labels_; }
  size_t input_dimension() const { return dim_; }

 protected:
  std::vector<std::string> labels_;
  size_t dim_ = 0;

  void check_dimension(std::span<const double> x) const;
  Prediction make_prediction(int label_index, double confidence) const;
  // argmax with ties resolved toward the smaller label index
  int argmax_first(std::span<const double> scores) const;
};

// Trains one model. Requires >= 2 instances, >= 2 distinct labels, finite
// features. Deterministic given the spec seed.
std::unique_ptr<TrainedModel> train(const features::Matrix& x, std::span<const int> y,
                                    const std::vector<std::string>& label_set,
                                    const ClassifierSpec& spec);

std::vector<Prediction> predict_batch(const TrainedModel& model, const features::Matrix& x);

// MLP gradient instrumentation (dropout off). layer_sizes runs
// input..output, e.g. {2, 3, 3, 3, 2}.
enum class MlpInit { HeNormal, Zero };

struct MlpGradientProbe {
  std::vector<double> analytic;  // flattened batch gradients, layer by layer
  double max_relative_deviation = 0.0;  // vs central differences (step 1e-5)
  double gradient_norm = 0.0;           // L2 over all parameters
};

MlpGradientProbe mlp_gradient_probe(std::span<const int> layer_sizes, MlpInit init, uint64_t seed,
                                    const features::Matrix& x, std::span<const int> y,
                                    bool with_numeric);

// Convenience wrapper: maximum relative deviation on a fresh seeded network.
double mlp_gradient_check(std::span<const int> layer_sizes, const features::Matrix& x,
                          std::span<const int> y, uint64_t seed);

// Batch-loss gradient norm at a trained MLP's current parameters (inputs are
// standardized by the model's own statistics). Throws unless model is MLP.
double mlp_trained_gradient_norm(const TrainedModel& model, const features::Matrix& x,
                                 std::span<const int> y);

}  // namespace hategraph::classifiers
