#include "hategraph/ngg.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hategraph/parallel.hpp"
#include "hategraph/rng.hpp"
#include "hategraph/util.hpp"

namespace hategraph::ngg {

std::string NGramGraph::edge_key(std::string_view a, std::string_view b) {
  if (b < a) std::swap(a, b);
  std::string key;
  key.reserve(a.size() + b.size() + 1);
  key.append(a);
  key += kKeySep;
  key.append(b);
  return key;
}

std::pair<std::string, std::string> NGramGraph::split_key(const std::string& key) {
  size_t sep = key.find(kKeySep);
  return {key.substr(0, sep), key.substr(sep + 1)};
}

void NGramGraph::add_edge_weight(std::string_view a, std::string_view b, double w) {
  edges_[edge_key(a, b)] += w;
}

void NGramGraph::scale_weights(double factor) {
  for (auto& [key, w] : edges_) w *= factor;
}

double NGramGraph::weight_between(std::string_view a, std::string_view b) const {
  auto it = edges_.find(edge_key(a, b));
  return it == edges_.end() ? 0.0 : it->second;
}

NGramGraph build_graph(std::string_view text, const NGGParams& params) {
  if (params.n < 1 || params.window < 1)
    throw std::invalid_argument("NGGParams: n and window must be >= 1");
  NGramGraph g;
  const size_t n = static_cast<size_t>(params.n);
  if (text.size() < n) return g;
  const size_t count = text.size() - n + 1;

  std::vector<std::string_view> grams(count);
  for (size_t i = 0; i < count; ++i) grams[i] = text.substr(i, n);
  for (size_t i = 0; i < count; ++i) g.add_node(std::string(grams[i]));

  // Each ordered pair within the window adds 1; covering d = 1..window in
  // one direction with increment 2 is equivalent.
  for (size_t i = 0; i < count; ++i) {
    size_t hi = std::min(count - 1, i + static_cast<size_t>(params.window));
    for (size_t j = i + 1; j <= hi; ++j) g.add_edge_weight(grams[i], grams[j], 2.0);
  }
  return g;
}

NGramGraph merge_graphs(std::span<const NGramGraph> instances) {
  if (instances.empty()) throw std::invalid_argument("merge_graphs: empty instance sequence");
  NGramGraph out;
  for (const NGramGraph& g : instances) {
    for (const auto& node : g.nodes()) out.add_node(node);
    for (const auto& [key, w] : g.edges()) out.add_keyed_weight(key, w);
  }
  out.scale_weights(1.0 / static_cast<double>(instances.size()));
  return out;
}

NGramGraph merge_graphs_parallel(std::span<const NGramGraph> instances) {
  if (instances.empty()) throw std::invalid_argument("merge_graphs: empty instance sequence");
  auto chunks = make_chunks(instances.size());
  std::vector<NGramGraph> partials(chunks.size());
  parallel_for(chunks.size(), [&](size_t c) {
    NGramGraph& acc = partials[c];
    for (size_t i = chunks[c].begin; i < chunks[c].end; ++i) {
      for (const auto& node : instances[i].nodes()) acc.add_node(node);
      for (const auto& [key, w] : instances[i].edges()) acc.add_keyed_weight(key, w);
    }
  });
  NGramGraph out;
  for (NGramGraph& p : partials) {
    for (const auto& node : p.nodes()) out.add_node(node);
    for (const auto& [key, w] : p.edges()) out.add_keyed_weight(key, w);
  }
  out.scale_weights(1.0 / static_cast<double>(instances.size()));
  return out;
}

std::vector<NGramGraph> build_graphs(std::span<const std::string> texts, const NGGParams& params) {
  std::vector<NGramGraph> out(texts.size());
  parallel_for(texts.size(), [&](size_t i) { out[i] = build_graph(texts[i], params); });
  return out;
}

std::vector<NGramGraph> build_graphs_serial(std::span<const std::string> texts,
                                            const NGGParams& params) {
  std::vector<NGramGraph> out(texts.size());
  for (size_t i = 0; i < texts.size(); ++i) out[i] = build_graph(texts[i], params);
  return out;
}

NGramGraph merge_texts(std::span<const std::string> texts, std::span<const size_t> subset,
                       const NGGParams& params) {
  if (subset.empty()) throw std::invalid_argument("merge_texts: empty subset");
  auto chunks = make_chunks(subset.size());
  std::vector<NGramGraph> partials(chunks.size());
  parallel_for(chunks.size(), [&](size_t c) {
    NGramGraph& acc = partials[c];
    for (size_t i = chunks[c].begin; i < chunks[c].end; ++i) {
      NGramGraph g = build_graph(texts[subset[i]], params);
      for (const auto& node : g.nodes()) acc.add_node(node);
      for (const auto& [key, w] : g.edges()) acc.add_keyed_weight(key, w);
    }
  });
  NGramGraph out;
  for (NGramGraph& p : partials) {
    for (const auto& node : p.nodes()) out.add_node(node);
    for (const auto& [key, w] : p.edges()) out.add_keyed_weight(key, w);
  }
  out.scale_weights(1.0 / static_cast<double>(subset.size()));
  return out;
}

SimilarityScores similarity(const NGramGraph& g1, const NGramGraph& g2) {
  const size_t s1 = g1.edge_count(), s2 = g2.edge_count();
  if (s1 == 0 && s2 == 0) return {0.0, 1.0, 0.0};
  if (s1 == 0 || s2 == 0) return {0.0, 0.0, 0.0};

  const double max_size = static_cast<double>(std::max(s1, s2));
  const double min_size = static_cast<double>(std::min(s1, s2));
  const NGramGraph& small = s1 <= s2 ? g1 : g2;
  const NGramGraph& large = s1 <= s2 ? g2 : g1;

  // Gather common edges and sum in sorted key order so the result is exact
  // under argument swap.
  std::vector<std::pair<std::string_view, double>> common;
  common.reserve(small.edge_count());
  for (const auto& [key, w] : small.edges()) {
    auto it = large.edges().find(key);
    if (it == large.edges().end()) continue;
    double lo = std::min(w, it->second);
    double hi = std::max(w, it->second);
    common.emplace_back(key, lo / hi);
  }
  std::sort(common.begin(), common.end());

  double sum = 0.0;
  for (const auto& [key, ratio] : common) sum += ratio;

  SimilarityScores s;
  s.vs = sum / max_size;
  s.ss = min_size / max_size;
  s.nvs = s.vs / s.ss;
  return s;
}

std::vector<RepresentativeCategoryGraph> build_rcgs(std::span<const std::string> texts,
                                                    std::span<const int> label_indices,
                                                    std::span<const std::string> label_set,
                                                    const NGGParams& params, double rcg_fraction,
                                                    uint64_t seed) {
  if (texts.size() != label_indices.size())
    throw std::invalid_argument("build_rcgs: texts/labels size mismatch");
  if (rcg_fraction <= 0.0 || rcg_fraction > 1.0)
    throw std::invalid_argument("build_rcgs: rcg_fraction must be in (0, 1]");

  std::vector<std::vector<size_t>> by_class(label_set.size());
  for (size_t i = 0; i < texts.size(); ++i) {
    int li = label_indices[i];
    if (li < 0 || static_cast<size_t>(li) >= label_set.size())
      throw std::invalid_argument("build_rcgs: label index out of range");
    by_class[static_cast<size_t>(li)].push_back(i);
  }

  std::vector<RepresentativeCategoryGraph> rcgs;
  rcgs.reserve(label_set.size());
  for (size_t c = 0; c < label_set.size(); ++c) {
    std::vector<size_t>& members = by_class[c];
    size_t take = static_cast<size_t>(std::floor(rcg_fraction * static_cast<double>(members.size())));
    if (rcg_fraction == 1.0) take = members.size();
    if (take == 0)
      throw std::runtime_error("build_rcgs: class '" + label_set[c] +
                               "' has no instances in the subsample");
    Rng rng(derive_seed(seed, c));
    rng.shuffle(members);
    members.resize(take);
    std::sort(members.begin(), members.end());  // fixed merge order

    RepresentativeCategoryGraph rcg;
    rcg.label = label_set[c];
    rcg.graph = merge_texts(texts, members, params);
    rcg.merged_count = take;
    rcgs.push_back(std::move(rcg));
  }
  return rcgs;
}

std::vector<double> model_vector(const NGramGraph& instance,
                                 std::span<const RepresentativeCategoryGraph> rcgs) {
  if (rcgs.empty()) throw std::invalid_argument("model_vector: no RCGs");
  std::vector<double> out(rcgs.size());
  for (size_t c = 0; c < rcgs.size(); ++c) out[c] = similarity(instance, rcgs[c].graph).nvs;
  return out;
}

std::vector<std::vector<double>> model_vectors(std::span<const std::string> texts,
                                               std::span<const RepresentativeCategoryGraph> rcgs,
                                               const NGGParams& params) {
  std::vector<std::vector<double>> out(texts.size());
  parallel_for(texts.size(), [&](size_t i) {
    NGramGraph g = build_graph(texts[i], params);
    out[i] = model_vector(g, rcgs);
  });
  return out;
}

void write_graph(std::ostream& out, const NGramGraph& g) {
  std::vector<std::pair<std::string, double>> sorted(g.edges().begin(), g.edges().end());
  std::sort(sorted.begin(), sorted.end());
  char buf[64];
  for (const auto& [key, w] : sorted) {
    auto [a, b] = NGramGraph::split_key(key);
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    out << a << '\t' << b << '\t' << buf << '\n';
  }
}

NGramGraph read_graph(std::istream& in) {
  NGramGraph g;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw std::runtime_error("graph file: malformed line " + std::to_string(lineno));
    std::string a = line.substr(0, t1);
    std::string b = line.substr(t1 + 1, t2 - t1 - 1);
    double w = std::stod(line.substr(t2 + 1));
    if (!(w > 0.0))
      throw std::runtime_error("graph file: non-positive weight at line " + std::to_string(lineno));
    g.add_node(a);
    g.add_node(b);
    g.add_edge_weight(a, b, w);
  }
  return g;
}

}  // namespace hategraph::ngg
