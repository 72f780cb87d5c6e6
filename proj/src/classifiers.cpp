#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "hategraph/classifiers.hpp"
#include "hategraph/parallel.hpp"
#include "hategraph/rng.hpp"

namespace hategraph::classifiers {

namespace {

void validate_training_inputs(const features::Matrix& x, std::span<const int> y,
                              const std::vector<std::string>& label_set) {
  if (x.rows != y.size()) throw std::invalid_argument("train: |X| != |y|");
  if (x.rows < 2) throw std::invalid_argument("train: need at least 2 instances");
  if (label_set.size() < 2) throw std::invalid_argument("train: need at least 2 labels");
  std::vector<bool> seen(label_set.size(), false);
  for (int label : y) {
    if (label < 0 || static_cast<size_t>(label) >= label_set.size())
      throw std::invalid_argument("train: label index out of range");
    seen[static_cast<size_t>(label)] = true;
  }
  size_t distinct = static_cast<size_t>(std::count(seen.begin(), seen.end(), true));
  if (distinct < 2) throw std::invalid_argument("train: training labels are single-class");
  for (double v : x.data)
    if (!std::isfinite(v)) throw std::invalid_argument("train: non-finite feature value");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

void softmax_inplace(std::span<double> z) {
  double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

void write_doubles(std::ostream& out, std::span<const double> values) {
  char buf[64];
  for (size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    out << buf << (i + 1 == values.size() ? "" : " ");
  }
  out << '\n';
}

void write_model_header(std::ostream& out, Algorithm algorithm, size_t dim,
                        const std::vector<std::string>& labels) {
  out << "hategraph-model 1\n";
  out << "algorithm " << algorithm_name(algorithm) << '\n';
  out << "dim " << dim << '\n';
  out << "labels " << labels.size() << '\n';
  for (const auto& l : labels) out << l << '\n';
}

// ---------------------------------------------------------------------------
// Gaussian Naive Bayes

class NaiveBayesModel final : public TrainedModel {
 public:
  NaiveBayesModel(const features::Matrix& x, std::span<const int> y,
                  const std::vector<std::string>& label_set, const Hyperparameters& hp) {
    labels_ = label_set;
    dim_ = x.cols;
    size_t classes = label_set.size();
    log_prior_.assign(classes, -std::numeric_limits<double>::infinity());
    mean_.assign(classes, std::vector<double>(x.cols, 0.0));
    var_.assign(classes, std::vector<double>(x.cols, 0.0));

    std::vector<size_t> count(classes, 0);
    for (size_t r = 0; r < x.rows; ++r) {
      size_t c = static_cast<size_t>(y[r]);
      ++count[c];
      const double* row = x.row(r);
      for (size_t f = 0; f < x.cols; ++f) mean_[c][f] += row[f];
    }
    for (size_t c = 0; c < classes; ++c) {
      if (count[c] == 0) continue;
      for (double& m : mean_[c]) m /= static_cast<double>(count[c]);
    }
    for (size_t r = 0; r < x.rows; ++r) {
      size_t c = static_cast<size_t>(y[r]);
      const double* row = x.row(r);
      for (size_t f = 0; f < x.cols; ++f) {
        double d = row[f] - mean_[c][f];
        var_[c][f] += d * d;
      }
    }
    for (size_t c = 0; c < classes; ++c) {
      if (count[c] == 0) continue;
      log_prior_[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(x.rows));
      for (double& v : var_[c]) v = std::max(v / static_cast<double>(count[c]), hp.nb_var_floor);
    }
  }

  Algorithm algorithm() const override { return Algorithm::NB; }

  Prediction predict(std::span<const double> x) const override {
    check_dimension(x);
    std::vector<double> loglik(labels_.size(), -std::numeric_limits<double>::infinity());
    for (size_t c = 0; c < labels_.size(); ++c) {
      if (!std::isfinite(log_prior_[c])) continue;  // class absent from training
      double ll = log_prior_[c];
      for (size_t f = 0; f < x.size(); ++f) {
        double d = x[f] - mean_[c][f];
        ll += -0.5 * std::log(2.0 * M_PI * var_[c][f]) - d * d / (2.0 * var_[c][f]);
      }
      loglik[c] = ll;
    }
    int best = argmax_first(loglik);
    // posterior of the argmax via log-sum-exp
    double mx = loglik[static_cast<size_t>(best)];
    double sum = 0.0;
    for (double ll : loglik)
      if (std::isfinite(ll)) sum += std::exp(ll - mx);
    return make_prediction(best, 1.0 / sum);
  }

  void save(std::ostream& out) const override {
    write_model_header(out, Algorithm::NB, dim_, labels_);
    write_doubles(out, log_prior_);
    for (const auto& m : mean_) write_doubles(out, m);
    for (const auto& v : var_) write_doubles(out, v);
  }

 private:
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> mean_;
  std::vector<std::vector<double>> var_;
};

// ---------------------------------------------------------------------------
// Logistic Regression (one-vs-rest, Nesterov-accelerated full-batch descent
// with a Lipschitz step size)

struct LogisticProblem {
  const features::Matrix& x;  // standardized
  std::vector<double> target;  // +1 / -1
};

// Largest eigenvalue of [X 1]^T [X 1] / N by power iteration; bounds the
// Hessian of the mean logistic loss by lambda_max / 4.
double power_iteration_bound(const features::Matrix& x) {
  size_t d = x.cols + 1;  // bias column
  std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> xv(x.rows, 0.0), next(d, 0.0);
  double lambda = 1.0;
  for (int iter = 0; iter < 50; ++iter) {
    parallel_for(x.rows, [&](size_t r) {
      const double* row = x.row(r);
      double s = v[x.cols];  // bias
      for (size_t c = 0; c < x.cols; ++c) s += row[c] * v[c];
      xv[r] = s;
    });
    std::fill(next.begin(), next.end(), 0.0);
    auto chunks = make_chunks(x.rows, 1024);
    std::vector<std::vector<double>> partials(chunks.size());
    parallel_for(chunks.size(), [&](size_t ci) {
      partials[ci].assign(d, 0.0);
      for (size_t r = chunks[ci].begin; r < chunks[ci].end; ++r) {
        const double* row = x.row(r);
        for (size_t c = 0; c < x.cols; ++c) partials[ci][c] += row[c] * xv[r];
        partials[ci][x.cols] += xv[r];
      }
    });
    for (const auto& p : partials)
      for (size_t c = 0; c < d; ++c) next[c] += p[c];
    double norm = std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
    if (norm < 1e-30) break;
    lambda = norm;  // ||M v|| with ||v|| = 1
    for (size_t c = 0; c < d; ++c) v[c] = next[c] / norm;
  }
  return lambda / static_cast<double>(x.rows);
}

// Mean loss gradient; returns gradient infinity norm. Deterministic: chunk
// partials are combined in chunk order.
double logistic_gradient(const LogisticProblem& prob, std::span<const double> w, double b,
                         double l2, std::span<double> gw, double& gb) {
  const features::Matrix& x = prob.x;
  const double n = static_cast<double>(x.rows);
  std::vector<double> margin(x.rows);
  parallel_for(x.rows, [&](size_t r) {
    const double* row = x.row(r);
    double f = b;
    for (size_t c = 0; c < x.cols; ++c) f += row[c] * w[c];
    margin[r] = -prob.target[r] * sigmoid(-prob.target[r] * f);
  });
  auto chunks = make_chunks(x.rows, 1024);
  std::vector<std::vector<double>> partials(chunks.size());
  std::vector<double> partial_b(chunks.size(), 0.0);
  parallel_for(chunks.size(), [&](size_t ci) {
    partials[ci].assign(x.cols, 0.0);
    for (size_t r = chunks[ci].begin; r < chunks[ci].end; ++r) {
      const double* row = x.row(r);
      for (size_t c = 0; c < x.cols; ++c) partials[ci][c] += margin[r] * row[c];
      partial_b[ci] += margin[r];
    }
  });
  std::fill(gw.begin(), gw.end(), 0.0);
  gb = 0.0;
  for (size_t ci = 0; ci < chunks.size(); ++ci) {
    for (size_t c = 0; c < x.cols; ++c) gw[c] += partials[ci][c];
    gb += partial_b[ci];
  }
  double norm = 0.0;
  for (size_t c = 0; c < x.cols; ++c) {
    gw[c] = gw[c] / n + l2 * w[c] / n;
    norm = std::max(norm, std::abs(gw[c]));
  }
  gb /= n;
  norm = std::max(norm, std::abs(gb));
  return norm;
}

double logistic_loss(const LogisticProblem& prob, std::span<const double> w, double b, double l2) {
  const features::Matrix& x = prob.x;
  auto chunks = make_chunks(x.rows, 1024);
  std::vector<double> partials(chunks.size(), 0.0);
  parallel_for(chunks.size(), [&](size_t ci) {
    double s = 0.0;
    for (size_t r = chunks[ci].begin; r < chunks[ci].end; ++r) {
      const double* row = x.row(r);
      double f = b;
      for (size_t c = 0; c < x.cols; ++c) f += row[c] * w[c];
      double m = -prob.target[r] * f;
      // softplus(m) = log(1 + e^m), stable for both signs
      s += m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
    }
    partials[ci] = s;
  });
  double total = 0.0;
  for (double p : partials) total += p;
  double reg = 0.0;
  for (double wc : w) reg += wc * wc;
  const double n = static_cast<double>(x.rows);
  return total / n + 0.5 * l2 * reg / n;
}

// Nesterov-accelerated descent with monotone acceptance: a loss increase
// first restarts the momentum, and if a pure gradient step still increases
// the loss the Lipschitz bound was too low, so the step halves.
void fit_logistic(const LogisticProblem& prob, const Hyperparameters& hp, double lipschitz,
                  std::vector<double>& w, double& b) {
  const size_t d = prob.x.cols;
  w.assign(d, 0.0);
  b = 0.0;
  std::vector<double> w_prev = w, y = w, cand = w, gw(d, 0.0);
  double b_prev = b, yb = b, cand_b = b, gb = 0.0;
  double step = 1.0 / lipschitz;
  double last_loss = logistic_loss(prob, w, b, hp.lr_l2);
  int since_restart = 1;
  for (int k = 1; k <= hp.lr_max_iterations; ++k) {
    double momentum =
        static_cast<double>(since_restart - 1) / static_cast<double>(since_restart + 2);
    for (size_t c = 0; c < d; ++c) y[c] = w[c] + momentum * (w[c] - w_prev[c]);
    yb = b + momentum * (b - b_prev);
    double gnorm = logistic_gradient(prob, y, yb, hp.lr_l2, gw, gb);
    if (gnorm < hp.lr_tolerance) break;
    for (size_t c = 0; c < d; ++c) cand[c] = y[c] - step * gw[c];
    cand_b = yb - step * gb;
    double loss = logistic_loss(prob, cand, cand_b, hp.lr_l2);
    if (loss <= last_loss + 1e-12) {
      w_prev = w;
      b_prev = b;
      w = cand;
      b = cand_b;
      last_loss = loss;
      ++since_restart;
    } else if (momentum > 0.0) {
      since_restart = 1;
    } else {
      step *= 0.5;
    }
  }
}

class LogisticModel final : public TrainedModel {
 public:
  LogisticModel(const features::Matrix& x, std::span<const int> y,
                const std::vector<std::string>& label_set, const Hyperparameters& hp) {
    labels_ = label_set;
    dim_ = x.cols;
    standardizer_ = Standardizer::fit(x);
    features::Matrix xs = standardizer_.transform(x);
    double lipschitz = power_iteration_bound(xs) / 4.0 +
                       hp.lr_l2 / static_cast<double>(xs.rows);
    lipschitz = std::max(lipschitz * 1.05, 1e-12);

    // Binary: one submodel scoring label 1. Multi-class: one-vs-rest.
    size_t submodels = label_set.size() == 2 ? 1 : label_set.size();
    weights_.assign(submodels, {});
    bias_.assign(submodels, 0.0);
    for (size_t s = 0; s < submodels; ++s) {
      int positive = label_set.size() == 2 ? 1 : static_cast<int>(s);
      LogisticProblem prob{xs, {}};
      prob.target.resize(xs.rows);
      for (size_t r = 0; r < xs.rows; ++r) prob.target[r] = y[r] == positive ? 1.0 : -1.0;
      fit_logistic(prob, hp, lipschitz, weights_[s], bias_[s]);
    }
  }

  Algorithm algorithm() const override { return Algorithm::LR; }

  Prediction predict(std::span<const double> x) const override {
    check_dimension(x);
    std::vector<double> xs(x.size());
    standardizer_.apply(x, xs);
    if (labels_.size() == 2) {
      double p1 = sigmoid(score(0, xs));
      // exact tie (p1 == 0.5) resolves to the first label
      int label = p1 > 0.5 ? 1 : 0;
      return make_prediction(label, label == 1 ? p1 : 1.0 - p1);
    }
    std::vector<double> scores(labels_.size());
    double total = 0.0;
    for (size_t s = 0; s < labels_.size(); ++s) {
      scores[s] = sigmoid(score(s, xs));
      total += scores[s];
    }
    int best = argmax_first(scores);
    double conf = total > 0 ? scores[static_cast<size_t>(best)] / total : 1.0 / labels_.size();
    return make_prediction(best, conf);
  }

  void save(std::ostream& out) const override {
    write_model_header(out, Algorithm::LR, dim_, labels_);
    write_doubles(out, standardizer_.mean);
    write_doubles(out, standardizer_.scale);
    out << "submodels " << weights_.size() << '\n';
    for (size_t s = 0; s < weights_.size(); ++s) {
      write_doubles(out, weights_[s]);
      write_doubles(out, {&bias_[s], 1});
    }
  }

 private:
  double score(size_t submodel, std::span<const double> xs) const {
    const auto& w = weights_[submodel];
    double f = bias_[submodel];
    for (size_t c = 0; c < xs.size(); ++c) f += w[c] * xs[c];
    return f;
  }

  Standardizer standardizer_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> bias_;
};

// ---------------------------------------------------------------------------
// K-Nearest Neighbors

class KnnModel final : public TrainedModel {
 public:
  KnnModel(const features::Matrix& x, std::span<const int> y,
           const std::vector<std::string>& label_set, const Hyperparameters& hp)
      : k_(static_cast<size_t>(hp.knn_k)) {
    labels_ = label_set;
    dim_ = x.cols;
    standardizer_ = Standardizer::fit(x);
    train_ = standardizer_.transform(x);
    y_.assign(y.begin(), y.end());
  }

  Algorithm algorithm() const override { return Algorithm::KNN; }

  Prediction predict(std::span<const double> x) const override {
    check_dimension(x);
    std::vector<double> xs(x.size());
    standardizer_.apply(x, xs);
    size_t k = std::min(k_, train_.rows);

    std::vector<std::pair<double, size_t>> dist(train_.rows);
    for (size_t r = 0; r < train_.rows; ++r) {
      const double* row = train_.row(r);
      double d2 = 0.0;
      for (size_t c = 0; c < xs.size(); ++c) {
        double d = row[c] - xs[c];
        d2 += d * d;
      }
      dist[r] = {d2, r};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k), dist.end());

    std::vector<double> votes(labels_.size(), 0.0);
    for (size_t i = 0; i < k; ++i) votes[static_cast<size_t>(y_[dist[i].second])] += 1.0;
    int best = argmax_first(votes);
    return make_prediction(best, votes[static_cast<size_t>(best)] / static_cast<double>(k));
  }

  void save(std::ostream& out) const override {
    write_model_header(out, Algorithm::KNN, dim_, labels_);
    out << "k " << k_ << '\n';
    write_doubles(out, standardizer_.mean);
    write_doubles(out, standardizer_.scale);
    out << "instances " << train_.rows << '\n';
    for (size_t r = 0; r < train_.rows; ++r) {
      out << y_[r] << ' ';
      write_doubles(out, train_.row_span(r));
    }
  }

 private:
  size_t k_;
  Standardizer standardizer_;
  features::Matrix train_;
  std::vector<int> y_;
};

// ---------------------------------------------------------------------------
// Random Forest (CART trees, Gini impurity, sqrt(d) candidate features,
// bootstrap bagging, hard voting)

struct TreeNode {
  int feature = -1;  // -1: leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf_label = -1;
};

class DecisionTree {
 public:
  void fit(const features::Matrix& x, std::span<const int> y, size_t classes, size_t mtry,
           int min_samples_split, Rng& rng) {
    // bootstrap sample, n draws with replacement
    std::vector<size_t> sample(x.rows);
    for (size_t i = 0; i < x.rows; ++i) sample[i] = rng.uniform_below(x.rows);
    std::sort(sample.begin(), sample.end());
    nodes_.clear();
    nodes_.emplace_back();
    // Explicit LIFO worklist, left child first: preorder node numbering and
    // a fixed RNG draw order without deep recursion.
    std::vector<std::pair<int, std::vector<size_t>>> pending;
    pending.emplace_back(0, std::move(sample));
    while (!pending.empty()) {
      auto [node_idx, node_sample] = std::move(pending.back());
      pending.pop_back();
      split_node(x, y, classes, mtry, min_samples_split, rng, node_idx, std::move(node_sample),
                 pending);
    }
  }

  int predict(std::span<const double> x) const {
    int node = 0;
    while (nodes_[static_cast<size_t>(node)].feature >= 0) {
      const TreeNode& n = nodes_[static_cast<size_t>(node)];
      node = x[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<size_t>(node)].leaf_label;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }

 private:
  static double gini(std::span<const size_t> counts, double total) {
    double g = 1.0;
    for (size_t c : counts) {
      double p = static_cast<double>(c) / total;
      g -= p * p;
    }
    return g;
  }

  void split_node(const features::Matrix& x, std::span<const int> y, size_t classes, size_t mtry,
                  int min_samples_split, Rng& rng, int node_idx, std::vector<size_t> sample,
                  std::vector<std::pair<int, std::vector<size_t>>>& pending) {
    std::vector<size_t> counts(classes, 0);
    for (size_t i : sample) ++counts[static_cast<size_t>(y[i])];
    int majority = 0;
    for (size_t c = 1; c < classes; ++c)
      if (counts[c] > counts[static_cast<size_t>(majority)]) majority = static_cast<int>(c);

    bool pure = counts[static_cast<size_t>(majority)] == sample.size();
    if (pure || sample.size() < static_cast<size_t>(min_samples_split)) {
      nodes_[static_cast<size_t>(node_idx)].leaf_label = majority;
      return;
    }

    // candidate features without replacement
    std::vector<size_t> candidates(x.cols);
    std::iota(candidates.begin(), candidates.end(), 0);
    for (size_t i = 0; i < mtry && i + 1 < candidates.size(); ++i) {
      size_t j = i + static_cast<size_t>(rng.uniform_below(candidates.size() - i));
      std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(std::min(mtry, candidates.size()));

    const double total = static_cast<double>(sample.size());
    const double parent_impurity = gini(counts, total);
    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::pair<double, size_t>> values(sample.size());
    std::vector<size_t> left_counts(classes);
    for (size_t f : candidates) {
      for (size_t i = 0; i < sample.size(); ++i)
        values[i] = {x.row(sample[i])[f], sample[i]};
      std::sort(values.begin(), values.end());
      std::fill(left_counts.begin(), left_counts.end(), 0);
      size_t left_n = 0;
      for (size_t i = 0; i + 1 < values.size(); ++i) {
        ++left_counts[static_cast<size_t>(y[values[i].second])];
        ++left_n;
        if (values[i].first == values[i + 1].first) continue;
        double ln = static_cast<double>(left_n), rn = total - ln;
        double gl = 1.0, gr = 1.0;
        for (size_t c = 0; c < classes; ++c) {
          double pl = static_cast<double>(left_counts[c]) / ln;
          double pr = static_cast<double>(counts[c] - left_counts[c]) / rn;
          gl -= pl * pl;
          gr -= pr * pr;
        }
        double gain = parent_impurity - (ln * gl + rn * gr) / total;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = values[i].first + (values[i + 1].first - values[i].first) / 2.0;
        }
      }
    }

    if (best_feature < 0) {
      nodes_[static_cast<size_t>(node_idx)].leaf_label = majority;
      return;
    }

    std::vector<size_t> left, right;
    for (size_t i : sample)
      (x.row(i)[static_cast<size_t>(best_feature)] <= best_threshold ? left : right).push_back(i);
    if (left.empty() || right.empty()) {
      nodes_[static_cast<size_t>(node_idx)].leaf_label = majority;
      return;
    }

    int l = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    int r = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[static_cast<size_t>(node_idx)].feature = best_feature;
    nodes_[static_cast<size_t>(node_idx)].threshold = best_threshold;
    nodes_[static_cast<size_t>(node_idx)].left = l;
    nodes_[static_cast<size_t>(node_idx)].right = r;
    pending.emplace_back(r, std::move(right));
    pending.emplace_back(l, std::move(left));  // left popped first
  }

  std::vector<TreeNode> nodes_;
};

class RandomForestModel final : public TrainedModel {
 public:
  RandomForestModel(const features::Matrix& x, std::span<const int> y,
                    const std::vector<std::string>& label_set, const Hyperparameters& hp,
                    uint64_t seed) {
    labels_ = label_set;
    dim_ = x.cols;
    size_t mtry = static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols))));
    trees_.resize(static_cast<size_t>(hp.rf_trees));
    // per-tree seeds derive from the spec seed, so tree scheduling is free
    parallel_for(trees_.size(), [&](size_t t) {
      Rng rng(derive_seed(seed, t));
      trees_[t].fit(x, y, label_set.size(), mtry, hp.rf_min_samples_split, rng);
    });
  }

  Algorithm algorithm() const override { return Algorithm::RF; }

  Prediction predict(std::span<const double> x) const override {
    check_dimension(x);
    std::vector<double> votes(labels_.size(), 0.0);
    for (const auto& tree : trees_) votes[static_cast<size_t>(tree.predict(x))] += 1.0;
    int best = argmax_first(votes);
    return make_prediction(best,
                           votes[static_cast<size_t>(best)] / static_cast<double>(trees_.size()));
  }

  void save(std::ostream& out) const override {
    write_model_header(out, Algorithm::RF, dim_, labels_);
    out << "trees " << trees_.size() << '\n';
    char buf[64];
    for (const auto& tree : trees_) {
      out << "nodes " << tree.nodes().size() << '\n';
      for (const auto& n : tree.nodes()) {
        std::snprintf(buf, sizeof(buf), "%.17g", n.threshold);
        out << n.feature << ' ' << buf << ' ' << n.left << ' ' << n.right << ' ' << n.leaf_label
            << '\n';
      }
    }
  }

 private:
  std::vector<DecisionTree> trees_;
};

// ---------------------------------------------------------------------------
// MLP: 3 hidden layers by default, ReLU, inverted dropout, softmax output,
// cross-entropy loss, Adam, mini-batches with seeded shuffling.

struct MlpNet {
  std::vector<int> sizes;                       // input .. output
  std::vector<std::vector<double>> weights;     // [layer](out x in) row-major
  std::vector<std::vector<double>> biases;      // [layer](out)

  size_t layer_count() const { return weights.size(); }

  void init(std::span<const int> layer_sizes, Rng& rng) {
    sizes.assign(layer_sizes.begin(), layer_sizes.end());
    weights.clear();
    biases.clear();
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
      size_t fan_in = static_cast<size_t>(sizes[l]);
      size_t fan_out = static_cast<size_t>(sizes[l + 1]);
      double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
      std::vector<double> w(fan_out * fan_in);
      for (double& v : w) v = rng.normal() * std_dev;
      weights.push_back(std::move(w));
      biases.emplace_back(fan_out, 0.0);
    }
  }

  size_t parameter_count() const {
    size_t n = 0;
    for (size_t l = 0; l < layer_count(); ++l) n += weights[l].size() + biases[l].size();
    return n;
  }

  // Forward pass; activations[l] holds layer l output (activations[0] = input).
  // Hidden dropout masks, when given, hold the keep scale per unit (0 or
  // 1/(1-p)); they multiply post-ReLU activations.
  void forward(std::span<const double> x, std::vector<std::vector<double>>& activations,
               const std::vector<std::vector<double>>* masks) const {
    activations.resize(sizes.size());
    activations[0].assign(x.begin(), x.end());
    for (size_t l = 0; l < layer_count(); ++l) {
      size_t out_n = static_cast<size_t>(sizes[l + 1]);
      size_t in_n = static_cast<size_t>(sizes[l]);
      activations[l + 1].assign(out_n, 0.0);
      const std::vector<double>& a = activations[l];
      const bool hidden = l != layer_count() - 1;
      for (size_t o = 0; o < out_n; ++o) {
        const double* wrow = weights[l].data() + o * in_n;
        double z = biases[l][o];
        for (size_t i = 0; i < in_n; ++i) z += wrow[i] * a[i];
        if (hidden) {
          z = z > 0 ? z : 0.0;  // ReLU
          if (masks) z *= (*masks)[l][o];
        }
        activations[l + 1][o] = z;
      }
    }
    softmax_inplace(activations.back());
  }

  // Cross-entropy gradient for one sample; accumulates into grads.
  void backward(const std::vector<std::vector<double>>& activations, int label,
                const std::vector<std::vector<double>>* masks,
                std::vector<std::vector<double>>& grad_w,
                std::vector<std::vector<double>>& grad_b) const {
    size_t last = layer_count();
    std::vector<double> delta = activations[last];
    delta[static_cast<size_t>(label)] -= 1.0;  // softmax - onehot
    for (size_t l = last; l-- > 0;) {
      size_t out_n = static_cast<size_t>(sizes[l + 1]);
      size_t in_n = static_cast<size_t>(sizes[l]);
      const std::vector<double>& a = activations[l];
      for (size_t o = 0; o < out_n; ++o) {
        grad_b[l][o] += delta[o];
        double* grow = grad_w[l].data() + o * in_n;
        for (size_t i = 0; i < in_n; ++i) grow[i] += delta[o] * a[i];
      }
      if (l == 0) break;
      std::vector<double> prev(in_n, 0.0);
      for (size_t i = 0; i < in_n; ++i) {
        double s = 0.0;
        for (size_t o = 0; o < out_n; ++o) s += weights[l][o * in_n + i] * delta[o];
        // activations already include ReLU and mask; a > 0 iff the unit fired
        if (a[i] > 0.0) {
          double scale = masks ? (*masks)[l - 1][i] : 1.0;
          s *= scale;
        } else {
          s = 0.0;
        }
        prev[i] = s;
      }
      delta = std::move(prev);
    }
  }

  double loss(std::span<const double> x, int label) const {
    std::vector<std::vector<double>> acts;
    forward(x, acts, nullptr);
    double p = acts.back()[static_cast<size_t>(label)];
    return -std::log(std::max(p, 1e-300));
  }
};

struct AdamState {
  std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
  long long t = 0;

  void init(const MlpNet& net) {
    m_w.clear();
    v_w.clear();
    m_b.clear();
    v_b.clear();
    for (size_t l = 0; l < net.layer_count(); ++l) {
      m_w.emplace_back(net.weights[l].size(), 0.0);
      v_w.emplace_back(net.weights[l].size(), 0.0);
      m_b.emplace_back(net.biases[l].size(), 0.0);
      v_b.emplace_back(net.biases[l].size(), 0.0);
    }
  }

  void step(MlpNet& net, const std::vector<std::vector<double>>& grad_w,
            const std::vector<std::vector<double>>& grad_b, double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++t;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (size_t l = 0; l < net.layer_count(); ++l) {
      for (size_t i = 0; i < net.weights[l].size(); ++i) {
        double g = grad_w[l][i];
        m_w[l][i] = beta1 * m_w[l][i] + (1 - beta1) * g;
        v_w[l][i] = beta2 * v_w[l][i] + (1 - beta2) * g * g;
        net.weights[l][i] -= lr * (m_w[l][i] / bc1) / (std::sqrt(v_w[l][i] / bc2) + eps);
      }
      for (size_t i = 0; i < net.biases[l].size(); ++i) {
        double g = grad_b[l][i];
        m_b[l][i] = beta1 * m_b[l][i] + (1 - beta1) * g;
        v_b[l][i] = beta2 * v_b[l][i] + (1 - beta2) * g * g;
        net.biases[l][i] -= lr * (m_b[l][i] / bc1) / (std::sqrt(v_b[l][i] / bc2) + eps);
      }
    }
  }
};

void zero_grads(const MlpNet& net, std::vector<std::vector<double>>& grad_w,
                std::vector<std::vector<double>>& grad_b) {
  grad_w.resize(net.layer_count());
  grad_b.resize(net.layer_count());
  for (size_t l = 0; l < net.layer_count(); ++l) {
    grad_w[l].assign(net.weights[l].size(), 0.0);
    grad_b[l].assign(net.biases[l].size(), 0.0);
  }
}

void scale_grads(double factor, std::vector<std::vector<double>>& grad_w,
                 std::vector<std::vector<double>>& grad_b) {
  for (auto& g : grad_w)
    for (double& v : g) v *= factor;
  for (auto& g : grad_b)
    for (double& v : g) v *= factor;
}

class MlpModel final : public TrainedModel {
 public:
  MlpModel(const features::Matrix& x, std::span<const int> y,
           const std::vector<std::string>& label_set, const Hyperparameters& hp, uint64_t seed) {
    labels_ = label_set;
    dim_ = x.cols;
    standardizer_ = Standardizer::fit(x);
    features::Matrix xs = standardizer_.transform(x);

    std::vector<int> layer_sizes;
    layer_sizes.push_back(static_cast<int>(x.cols));
    for (int h : hp.mlp_hidden) layer_sizes.push_back(h);
    layer_sizes.push_back(static_cast<int>(label_set.size()));

    Rng rng(derive_seed(seed, 0x6d6c70));  // "mlp"
    net_.init(layer_sizes, rng);

    AdamState adam;
    adam.init(net_);
    std::vector<size_t> order(xs.rows);
    std::iota(order.begin(), order.end(), 0);

    const size_t hidden_layers = hp.mlp_hidden.size();
    const double keep = 1.0 - hp.mlp_dropout;
    std::vector<std::vector<double>> grad_w, grad_b;
    std::vector<std::vector<double>> masks(hidden_layers);
    std::vector<std::vector<double>> acts;

    for (int epoch = 0; epoch < hp.mlp_epochs; ++epoch) {
      rng.shuffle(order);
      for (size_t start = 0; start < order.size(); start += static_cast<size_t>(hp.mlp_batch_size)) {
        size_t end = std::min(order.size(), start + static_cast<size_t>(hp.mlp_batch_size));
        zero_grads(net_, grad_w, grad_b);
        for (size_t bi = start; bi < end; ++bi) {
          size_t r = order[bi];
          if (hp.mlp_dropout > 0.0) {
            for (size_t l = 0; l < hidden_layers; ++l) {
              masks[l].assign(static_cast<size_t>(hp.mlp_hidden[l]), 0.0);
              for (double& m : masks[l]) m = rng.uniform_double() < keep ? 1.0 / keep : 0.0;
            }
          }
          const auto* mask_ptr = hp.mlp_dropout > 0.0 ? &masks : nullptr;
          net_.forward(xs.row_span(r), acts, mask_ptr);
          net_.backward(acts, y[r], mask_ptr, grad_w, grad_b);
        }
        scale_grads(1.0 / static_cast<double>(end - start), grad_w, grad_b);
        adam.step(net_, grad_w, grad_b, hp.mlp_learning_rate);
      }
    }
  }

  Algorithm algorithm() const override { return Algorithm::MLP; }

  Prediction predict(std::span<const double> x) const override {
    check_dimension(x);
    std::vector<double> xs(x.size());
    standardizer_.apply(x, xs);
    std::vector<std::vector<double>> acts;
    net_.forward(xs, acts, nullptr);
    int best = argmax_first(acts.back());
    return make_prediction(best, acts.back()[static_cast<size_t>(best)]);
  }

  void save(std::ostream& out) const override {
    write_model_header(out, Algorithm::MLP, dim_, labels_);
    out << "layers";
    for (int s : net_.sizes) out << ' ' << s;
    out << '\n';
    write_doubles(out, standardizer_.mean);
    write_doubles(out, standardizer_.scale);
    for (size_t l = 0; l < net_.layer_count(); ++l) {
      write_doubles(out, net_.weights[l]);
      write_doubles(out, net_.biases[l]);
    }
  }

  // batch-loss gradient norm at the current parameters; inputs go through
  // the model's standardization
  double probe_gradient_norm(const features::Matrix& x, std::span<const int> y) const;

 private:
  Standardizer standardizer_;
  MlpNet net_;
};

}  // namespace

std::unique_ptr<TrainedModel> train(const features::Matrix& x, std::span<const int> y,
                                    const std::vector<std::string>& label_set,
                                    const ClassifierSpec& spec) {
  validate_training_inputs(x, y, label_set);
  spec.hp.validate(spec.algorithm);
  switch (spec.algorithm) {
    case Algorithm::NB: return std::make_unique<NaiveBayesModel>(x, y, label_set, spec.hp);
    case Algorithm::LR: return std::make_unique<LogisticModel>(x, y, label_set, spec.hp);
    case Algorithm::KNN: return std::make_unique<KnnModel>(x, y, label_set, spec.hp);
    case Algorithm::RF:
      return std::make_unique<RandomForestModel>(x, y, label_set, spec.hp, spec.seed);
    case Algorithm::MLP: return std::make_unique<MlpModel>(x, y, label_set, spec.hp, spec.seed);
  }
  throw std::logic_error("train: unknown algorithm");
}

namespace {

MlpGradientProbe probe_net(MlpNet& net, const features::Matrix& x, std::span<const int> y,
                           bool with_numeric) {
  std::vector<std::vector<double>> grad_w, grad_b, acts;
  zero_grads(net, grad_w, grad_b);
  for (size_t r = 0; r < x.rows; ++r) {
    net.forward(x.row_span(r), acts, nullptr);
    net.backward(acts, y[r], nullptr, grad_w, grad_b);
  }
  scale_grads(1.0 / static_cast<double>(x.rows), grad_w, grad_b);

  MlpGradientProbe probe;
  double norm_sq = 0.0;
  for (size_t l = 0; l < net.layer_count(); ++l) {
    for (double g : grad_w[l]) {
      probe.analytic.push_back(g);
      norm_sq += g * g;
    }
    for (double g : grad_b[l]) {
      probe.analytic.push_back(g);
      norm_sq += g * g;
    }
  }
  probe.gradient_norm = std::sqrt(norm_sq);
  if (!with_numeric) return probe;

  auto batch_loss = [&]() {
    double total = 0.0;
    for (size_t r = 0; r < x.rows; ++r) total += net.loss(x.row_span(r), y[r]);
    return total / static_cast<double>(x.rows);
  };
  const double h = 1e-5;
  auto check_param = [&](double& param, double analytic) {
    double saved = param;
    param = saved + h;
    double up = batch_loss();
    param = saved - h;
    double down = batch_loss();
    param = saved;
    double numeric = (up - down) / (2.0 * h);
    double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    probe.max_relative_deviation =
        std::max(probe.max_relative_deviation, std::abs(analytic - numeric) / denom);
  };
  size_t param_idx = 0;
  for (size_t l = 0; l < net.layer_count(); ++l) {
    for (size_t i = 0; i < net.weights[l].size(); ++i)
      check_param(net.weights[l][i], probe.analytic[param_idx++]);
    for (size_t i = 0; i < net.biases[l].size(); ++i)
      check_param(net.biases[l][i], probe.analytic[param_idx++]);
  }
  return probe;
}

}  // namespace

namespace {
double MlpModel_probe_gradient_norm(const Standardizer& standardizer, const MlpNet& net,
                                    const features::Matrix& x, std::span<const int> y) {
  features::Matrix xs = standardizer.transform(x);
  MlpNet net_copy = net;
  return probe_net(net_copy, xs, y, false).gradient_norm;
}
}  // namespace

double MlpModel::probe_gradient_norm(const features::Matrix& x, std::span<const int> y) const {
  return MlpModel_probe_gradient_norm(standardizer_, net_, x, y);
}

MlpGradientProbe mlp_gradient_probe(std::span<const int> layer_sizes, MlpInit init, uint64_t seed,
                                    const features::Matrix& x, std::span<const int> y,
                                    bool with_numeric) {
  if (x.rows == 0 || x.rows != y.size())
    throw std::invalid_argument("mlp_gradient_probe: bad batch");
  MlpNet net;
  Rng rng(seed);
  net.init(layer_sizes, rng);
  if (init == MlpInit::Zero)
    for (auto& w : net.weights) std::fill(w.begin(), w.end(), 0.0);
  return probe_net(net, x, y, with_numeric);
}

double mlp_gradient_check(std::span<const int> layer_sizes, const features::Matrix& x,
                          std::span<const int> y, uint64_t seed) {
  return mlp_gradient_probe(layer_sizes, MlpInit::HeNormal, seed, x, y, true)
      .max_relative_deviation;
}

double mlp_trained_gradient_norm(const TrainedModel& model, const features::Matrix& x,
                                 std::span<const int> y) {
  const auto* mlp = dynamic_cast<const MlpModel*>(&model);
  if (!mlp) throw std::invalid_argument("mlp_trained_gradient_norm: model is not an MLP");
  return mlp->probe_gradient_norm(x, y);
}

}  // namespace hategraph::classifiers
