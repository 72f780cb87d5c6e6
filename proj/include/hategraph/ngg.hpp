#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hategraph::ngg {

struct NGGParams {
  int n = 3;       // character n-gram rank
  int window = 3;  // co-occurrence distance in n-gram start positions
};

// Weighted graph over character n-grams. Edges are unordered pairs stored
// once under a canonical key; self-loops (equal n-grams at different
// positions) are ordinary edges.
class NGramGraph {
 public:
  static constexpr char kKeySep = '\x1f';  // cannot occur in cleaned text

  static std::string edge_key(std::string_view a, std::string_view b);
  static std::pair<std::string, std::string> split_key(const std::string& key);

  void add_node(std::string node) { nodes_.insert(std::move(node)); }
  void add_edge_weight(std::string_view a, std::string_view b, double w);
  void add_keyed_weight(const std::string& key, double w) { edges_[key] += w; }
  void scale_weights(double factor);

  double weight_between(std::string_view a, std::string_view b) const;

  size_t edge_count() const { return edges_.size(); }
  size_t node_count() const { return nodes_.size(); }
  bool empty() const { return edges_.empty(); }

  const std::unordered_map<std::string, double>& edges() const { return edges_; }
  const std::unordered_set<std::string>& nodes() const { return nodes_; }

 private:
  std::unordered_map<std::string, double> edges_;
  std::unordered_set<std::string> nodes_;
};

// Nodes are every character n-gram of the text (spaces included). For every
// ordered pair of positions whose distance is 1..window the unordered edge
// gains weight 1, so each co-occurring pair contributes 2. Text shorter than
// n gives an empty graph.
NGramGraph build_graph(std::string_view text, const NGGParams& params);

// Arithmetic-mean merge: weight = sum over instances / instance count, an
// absent edge contributing 0. Serial reference.
NGramGraph merge_graphs(std::span<const NGramGraph> instances);

// Deterministic parallel variant: fixed-size chunks accumulate partial sums
// that are combined in chunk order, so the result does not depend on thread
// count. Matches merge_graphs within floating tolerance.
NGramGraph merge_graphs_parallel(std::span<const NGramGraph> instances);

// Batch construction, one graph per text.
std::vector<NGramGraph> build_graphs(std::span<const std::string> texts, const NGGParams& params);
std::vector<NGramGraph> build_graphs_serial(std::span<const std::string> texts,
                                            const NGGParams& params);

// Mean-merge of the graphs of the given texts without materializing all of
// them at once.
NGramGraph merge_texts(std::span<const std::string> texts, std::span<const size_t> subset,
                       const NGGParams& params);

struct SimilarityScores {
  double vs = 0.0;   // Value Similarity
  double ss = 0.0;   // Size Similarity
  double nvs = 0.0;  // vs / ss
};

// With |G| the edge count: SS = min|G1|,|G2| / max; VS = sum over common
// edges of min(w1,w2)/max(w1,w2), divided by max(|G1|,|G2|); NVS = VS/SS.
// Both graphs empty -> (0, 1, 0); exactly one empty -> (0, 0, 0).
// Symmetric bit-for-bit: the common-edge sum runs in sorted key order.
SimilarityScores similarity(const NGramGraph& g1, const NGramGraph& g2);

struct RepresentativeCategoryGraph {
  std::string label;
  NGramGraph graph;
  size_t merged_count = 0;
};

// Builds one RCG per label (in label_set order) from a stratified
// rcg_fraction subsample of each class's instances; deterministic in seed.
std::vector<RepresentativeCategoryGraph> build_rcgs(std::span<const std::string> texts,
                                                    std::span<const int> label_indices,
                                                    std::span<const std::string> label_set,
                                                    const NGGParams& params, double rcg_fraction,
                                                    uint64_t seed);

// Model vector: component i = NVS(instance, RCG_i).
std::vector<double> model_vector(const NGramGraph& instance,
                                 std::span<const RepresentativeCategoryGraph> rcgs);

// One row per instance text; OpenMP across instances.
std::vector<std::vector<double>> model_vectors(std::span<const std::string> texts,
                                               std::span<const RepresentativeCategoryGraph> rcgs,
                                               const NGGParams& params);

// Text dump: ngram1<TAB>ngram2<TAB>weight per edge, sorted lexicographically.
void write_graph(std::ostream& out, const NGramGraph& g);
NGramGraph read_graph(std::istream& in);

}  // namespace hategraph::ngg
