// Acceptance suite: prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <unistd.h>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "hategraph/classifiers.hpp"
#include "hategraph/config.hpp"
#include "hategraph/evaluation.hpp"
#include "hategraph/features.hpp"
#include "hategraph/ngg.hpp"
#include "hategraph/rng.hpp"
#include "hategraph/runner.hpp"
#include "hategraph/stats.hpp"
#include "hategraph/util.hpp"

using namespace hategraph;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum class Kind { Pass, Fail, Skip } kind = Kind::Pass;
  std::string detail;
};

struct Check {
  bool ok = true;
  std::string first_failure;

  void expect(bool condition, const std::string& message) {
    if (!condition && ok) {
      ok = false;
      first_failure = message;
    }
  }
};

std::string format_value(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// --------------------------------------------------------------------------
// shared generators

std::string random_text(Rng& rng, size_t len, const std::string& alphabet) {
  std::string s;
  for (size_t i = 0; i < len; ++i) s += alphabet[rng.uniform_below(alphabet.size())];
  return s;
}

ngg::NGramGraph random_graph(Rng& rng, size_t max_edges) {
  ngg::NGramGraph g;
  size_t edges = rng.uniform_below(max_edges + 1);
  for (size_t e = 0; e < edges; ++e) {
    std::string a = random_text(rng, 1 + rng.uniform_below(3), "abc");
    std::string b = random_text(rng, 1 + rng.uniform_below(3), "abc");
    g.add_node(a);
    g.add_node(b);
    g.add_edge_weight(a, b, 0.5 + rng.uniform_double() * 9.5);
  }
  return g;
}

ngg::SimilarityScores brute_force_similarity(const ngg::NGramGraph& g1,
                                             const ngg::NGramGraph& g2) {
  const double s1 = static_cast<double>(g1.edge_count());
  const double s2 = static_cast<double>(g2.edge_count());
  if (s1 == 0 && s2 == 0) return {0.0, 1.0, 0.0};
  if (s1 == 0 || s2 == 0) return {0.0, 0.0, 0.0};
  double vs_sum = 0.0;
  for (const auto& [key, w1] : g1.edges()) {
    auto it = g2.edges().find(key);
    if (it == g2.edges().end()) continue;
    vs_sum += std::min(w1, it->second) / std::max(w1, it->second);
  }
  ngg::SimilarityScores s;
  s.vs = vs_sum / std::max(s1, s2);
  s.ss = std::min(s1, s2) / std::max(s1, s2);
  s.nvs = s.vs / s.ss;
  return s;
}

// Disjoint-alphabet corpus: class A texts use {a..h}, class B texts {q..x}.
corpus::LabeledCorpus disjoint_alphabet_corpus(int a_count, int b_count, uint64_t seed) {
  Rng rng(seed);
  corpus::LabeledCorpus c;
  c.provenance = "synthetic";
  c.label_set = {"A", "B"};
  for (int i = 0; i < a_count; ++i)
    c.documents.push_back({"a" + std::to_string(i),
                           random_text(rng, 60 + rng.uniform_below(30), "abcdefgh"), "A"});
  for (int i = 0; i < b_count; ++i)
    c.documents.push_back({"b" + std::to_string(i),
                           random_text(rng, 60 + rng.uniform_below(30), "qrstuvwx"), "B"});
  return c;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("hategraph_accept_" + tag + "_" +
                                        std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path file(const std::string& name, const std::string& content) const {
    fs::path p = path / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
  }
};

// --------------------------------------------------------------------------

Outcome criterion_similarity_algebra() {
  Check check;
  Rng rng(20240801);
  const int pairs = 10000;
  for (int it = 0; it < pairs && check.ok; ++it) {
    ngg::NGramGraph a = random_graph(rng, 30);
    ngg::NGramGraph b = random_graph(rng, 30);
    ngg::SimilarityScores ab = ngg::similarity(a, b);
    ngg::SimilarityScores ba = ngg::similarity(b, a);
    check.expect(ab.vs >= 0.0 && ab.vs <= ab.ss + 1e-15 && ab.ss <= 1.0,
                 "0 <= VS <= SS <= 1 violated: vs=" + format_value(ab.vs) +
                     " ss=" + format_value(ab.ss));
    check.expect(ab.vs == ba.vs && ab.ss == ba.ss && ab.nvs == ba.nvs, "symmetry violated");
    ngg::SimilarityScores self = ngg::similarity(a, a);
    if (a.edge_count() > 0)
      check.expect(std::abs(self.nvs - 1.0) < 1e-15, "NVS(G,G) != 1");
    ngg::SimilarityScores oracle = brute_force_similarity(a, b);
    check.expect(std::abs(ab.vs - oracle.vs) <= 1e-12 && std::abs(ab.ss - oracle.ss) <= 1e-12 &&
                     std::abs(ab.nvs - oracle.nvs) <= 1e-12,
                 "oracle deviation above 1e-12");
  }
  if (!check.ok) return {Outcome::Kind::Fail, check.first_failure};
  return {Outcome::Kind::Pass, std::to_string(pairs) + " random pairs"};
}

Outcome criterion_rcg_merge() {
  Check check;
  Rng rng(7070);
  for (int it = 0; it < 40 && check.ok; ++it) {
    std::vector<ngg::NGramGraph> batch;
    size_t count = 1 + rng.uniform_below(60);
    for (size_t i = 0; i < count; ++i) batch.push_back(random_graph(rng, 40));
    ngg::NGramGraph merged = ngg::merge_graphs(batch);

    std::vector<ngg::NGramGraph> shuffled = batch;
    rng.shuffle(shuffled);
    ngg::NGramGraph remerged = ngg::merge_graphs(shuffled);
    ngg::NGramGraph parallel = ngg::merge_graphs_parallel(batch);

    check.expect(remerged.edge_count() == merged.edge_count(), "edge sets differ after permutation");
    for (const auto& [key, w] : merged.edges()) {
      auto it2 = remerged.edges().find(key);
      check.expect(it2 != remerged.edges().end() && std::abs(it2->second - w) <= 1e-12,
                   "permutation deviation above 1e-12");
      auto it3 = parallel.edges().find(key);
      check.expect(it3 != parallel.edges().end() && std::abs(it3->second - w) <= 1e-12,
                   "parallel merge deviation above 1e-12");
    }

    // merge of identical copies reproduces the instance
    std::vector<ngg::NGramGraph> copies(3, batch.front());
    ngg::NGramGraph same = ngg::merge_graphs(copies);
    check.expect(same.edge_count() == batch.front().edge_count(), "identity merge edge count");
    for (const auto& [key, w] : batch.front().edges())
      check.expect(std::abs(same.edges().at(key) - w) <= 1e-12, "identity merge deviation");
  }
  if (!check.ok) return {Outcome::Kind::Fail, check.first_failure};
  return {Outcome::Kind::Pass, "40 random batches"};
}

Outcome criterion_mlp_gradient() {
  Rng rng(5150);
  features::Matrix x(12, 2);
  std::vector<int> y(12);
  for (size_t i = 0; i < 12; ++i) {
    x.row(i)[0] = rng.normal();
    x.row(i)[1] = rng.normal();
    y[i] = static_cast<int>(i % 2);
  }
  std::vector<int> sizes = {2, 3, 3, 3, 2};
  double dev = classifiers::mlp_gradient_check(sizes, x, y, 424242);
  if (dev < 1e-4)
    return {Outcome::Kind::Pass, "max relative deviation " + format_value(dev)};
  return {Outcome::Kind::Fail, "deviation " + format_value(dev) + " >= 1e-4"};
}

Outcome criterion_metric_oracle() {
  Check check;
  const std::vector<std::string> labels = {"0", "1"};
  std::vector<int> y_true = {1, 1, 1, 0};
  std::vector<int> y_pred = {1, 1, 0, 0};
  evaluation::EvalScores s = evaluation::scores(evaluation::confusion(y_true, y_pred, labels));
  check.expect(std::abs(s.macro_f - (2.0 / 3.0 + 0.8) / 2.0) <= 1e-9,
               "macro_f off: " + format_value(s.macro_f));
  check.expect(std::abs(s.micro_f - 0.75) <= 1e-9, "micro_f off: " + format_value(s.micro_f));

  Rng rng(909);
  for (int it = 0; it < 1000 && check.ok; ++it) {
    size_t classes = 2 + rng.uniform_below(4);
    std::vector<std::string> ls;
    for (size_t c = 0; c < classes; ++c) ls.push_back(std::to_string(c));
    size_t n = 1 + rng.uniform_below(60);
    std::vector<int> yt(n), yp(n);
    for (size_t i = 0; i < n; ++i) {
      yt[i] = static_cast<int>(rng.uniform_below(classes));
      yp[i] = static_cast<int>(rng.uniform_below(classes));
    }
    evaluation::EvalScores rs = evaluation::scores(evaluation::confusion(yt, yp, ls));
    check.expect(std::abs(rs.micro_f - rs.accuracy) <= 1e-12, "micro_f != accuracy");
  }
  if (!check.ok) return {Outcome::Kind::Fail, check.first_failure};
  return {Outcome::Kind::Pass, "hand-worked matrix and 1000 random matrices"};
}

Outcome criterion_majority_baseline() {
  Check check;
  std::vector<std::string> labels = {"HateSpeech", "Clean"};
  std::vector<int> y;
  y.insert(y.end(), 24463, 0);
  y.insert(y.end(), 14548, 1);
  evaluation::EvalScores s = evaluation::majority_baseline(y, labels);
  double p = 24463.0 / 39011.0;
  double analytic_macro = (2.0 * p / (1.0 + p)) / 2.0;
  check.expect(std::abs(s.macro_f - analytic_macro) <= 1e-12,
               "macro_f != analytic value: " + format_value(s.macro_f));
  check.expect(std::abs(s.macro_f - 0.382) <= 0.01,
               "macro_f " + format_value(s.macro_f) + " not within 0.01 of 0.382");
  check.expect(std::abs(s.weighted_f - 0.473) <= 0.02,
               "weighted_f " + format_value(s.weighted_f) + " not within 0.02 of 0.473");
  if (!check.ok) return {Outcome::Kind::Fail, check.first_failure};
  return {Outcome::Kind::Pass,
          "macro " + format_value(s.macro_f) + " vs 0.382; weighted " +
              format_value(s.weighted_f) + " vs 0.473 (micro-vs-weighted ambiguity documented)"};
}

Outcome criterion_statistics_oracle() {
  Check check;
  // hand-worked ANOVA
  std::vector<evaluation::RunRecord> records;
  int fold = 0;
  for (double v : {1.0, 2.0, 3.0}) {
    evaluation::RunRecord r;
    r.feature_config = "g1";
    r.classifier = "only";
    r.fold = fold++;
    r.eval.micro_f = r.eval.macro_f = v;
    records.push_back(r);
  }
  fold = 0;
  for (double v : {4.0, 5.0, 6.0}) {
    evaluation::RunRecord r;
    r.feature_config = "g2";
    r.classifier = "only";
    r.fold = fold++;
    r.eval.micro_f = r.eval.macro_f = v;
    records.push_back(r);
  }
  stats::AnovaTable table = stats::anova_two_factor(records, stats::Response::MicroF);
  check.expect(std::abs(table.features.f - 13.5) <= 1e-9,
               "ANOVA F off: " + format_value(table.features.f));
  check.expect(table.features.df == 1 && table.residual.df == 4, "ANOVA df off");
  check.expect(std::abs(table.features.p - 0.02131164112875672) <= 1e-3,
               "ANOVA p off: " + format_value(table.features.p));

  double q = stats::studentized_range_quantile(0.95, 3, 10);
  check.expect(std::abs(q - 3.88) <= 0.01, "q(0.95,3,10) off: " + format_value(q));

  for (double qq : {0.5, 1.5, 2.5, 4.0}) {
    for (double df : {4.0, 10.0, 40.0}) {
      double tukey_p = stats::studentized_range_sf(qq, 2, df);
      double t_p = 2.0 * stats::t_sf(qq / std::sqrt(2.0), df);
      check.expect(std::abs(tukey_p - t_p) <= 1e-6,
                   "Tukey k=2 vs pooled t mismatch at q=" + format_value(qq));
    }
  }
  if (!check.ok) return {Outcome::Kind::Fail, check.first_failure};
  return {Outcome::Kind::Pass,
          "F=13.5 p=" + format_value(table.features.p) + ", q(0.95,3,10)=" + format_value(q)};
}

Outcome criterion_synthetic_end_to_end() {
  Check check;
  corpus::LabeledCorpus clean_corpus = disjoint_alphabet_corpus(300, 200, 33);
  preprocess::StopwordSet stop({"the"});  // no effect on synthetic alphabets
  features::PreparedCorpus prepared = features::PreparedCorpus::build(clean_corpus, stop);
  corpus::FoldPlan folds = corpus::stratified_folds(clean_corpus, 5, 13);

  classifiers::ClassifierSpec spec;
  spec.algorithm = classifiers::Algorithm::LR;
  auto make_ngg = [] { return features::make_ngg_extractor({3, 3}, 0.9); };
  auto records =
      evaluation::cross_validate(prepared, folds, make_ngg, "ngg", spec, "LR", 2024);
  double mean_micro = 0.0;
  for (const auto& r : records) mean_micro += r.eval.micro_f;
  mean_micro /= static_cast<double>(records.size());
  check.expect(mean_micro == 1.0, "separable corpus mean micro_f = " + format_value(mean_micro));

  // label-shuffled copy: same label counts, labels reassigned at random
  corpus::LabeledCorpus shuffled = clean_corpus;
  std::vector<std::string> labels;
  for (const auto& d : shuffled.documents) labels.push_back(d.label);
  Rng rng(99);
  rng.shuffle(labels);
  for (size_t i = 0; i < labels.size(); ++i) shuffled.documents[i].label = labels[i];
  features::PreparedCorpus prepared_shuffled = features::PreparedCorpus::build(shuffled, stop);
  corpus::FoldPlan folds_shuffled = corpus::stratified_folds(shuffled, 5, 13);
  auto shuffled_records = evaluation::cross_validate(prepared_shuffled, folds_shuffled, make_ngg,
                                                     "ngg", spec, "LR", 2024);
  double shuffled_micro = 0.0;
  for (const auto& r : shuffled_records) shuffled_micro += r.eval.micro_f;
  shuffled_micro /= static_cast<double>(shuffled_records.size());

  std::vector<int> y = shuffled.label_indices();
  double majority_micro = evaluation::majority_baseline(y, shuffled.label_set).micro_f;
  check.expect(std::abs(shuffled_micro - majority_micro) <= 0.05,
               "shuffled-label micro " + format_value(shuffled_micro) + " not within 0.05 of " +
                   format_value(majority_micro));
  if (!check.ok) return {Outcome::Kind::Fail, check.first_failure};
  return {Outcome::Kind::Pass, "separable micro 1.0; shuffled " + format_value(shuffled_micro) +
                                   " vs baseline " + format_value(majority_micro)};
}

// Criterion 8 (conditional): replication against the public HSOL data when a
// copy is available. Looks for the CSV via HATEGRAPH_HSOL_CSV or
// data/hsol/labeled_data.csv; embeddings via HATEGRAPH_GLOVE.
Outcome criterion_hsol_replication() {
  std::string hsol_path = "data/hsol/labeled_data.csv";
  if (const char* env = std::getenv("HATEGRAPH_HSOL_CSV")) hsol_path = env;
  if (!fs::exists(hsol_path))
    return {Outcome::Kind::Skip,
            "public HSOL data not present (set HATEGRAPH_HSOL_CSV); property suite carries "
            "acceptance"};

  Check check;
  corpus::LoadResult lr = corpus::load_hsol(hsol_path);
  if (!lr.ok()) return {Outcome::Kind::Fail, "HSOL load errors"};

  // binary Hate-vs-Clean subset
  corpus::LabeledCorpus binary;
  binary.provenance = "HSOL-binary";
  binary.label_set = {"HateSpeech", "Clean"};
  for (const auto& d : lr.corpus.documents)
    if (d.label == "HateSpeech" || d.label == "Clean") binary.documents.push_back(d);

  preprocess::StopwordSet stop = preprocess::StopwordSet::load("data/stopwords.txt");
  auto lexicon = std::make_shared<features::Lexicon>(
      features::Lexicon::load(std::getenv("HATEGRAPH_LEXICON") ? std::getenv("HATEGRAPH_LEXICON")
                                                               : "data/hate_lexicon.txt"));
  features::PreparedCorpus prepared = features::PreparedCorpus::build(binary, stop);
  corpus::FoldPlan folds = corpus::stratified_folds(binary, 10, 42);
  classifiers::ClassifierSpec lr_spec;
  lr_spec.algorithm = classifiers::Algorithm::LR;

  auto mean_scores = [&](const std::vector<evaluation::RunRecord>& records) {
    double macro = 0, micro = 0;
    for (const auto& r : records) {
      macro += r.eval.macro_f;
      micro += r.eval.micro_f;
    }
    return std::pair(macro / records.size(), micro / records.size());
  };

  auto bow_records = evaluation::cross_validate(
      prepared, folds, [&] { return features::make_bow_extractor(lexicon); }, "bow", lr_spec,
      "LR", 42);
  auto [bow_macro, bow_micro] = mean_scores(bow_records);
  check.expect(std::abs(bow_macro - 0.808) <= 0.05,
               "BoW+LR macro " + format_value(bow_macro) + " not within 0.05 of 0.808");

  auto ngg_records = evaluation::cross_validate(
      prepared, folds, [] { return features::make_ngg_extractor({3, 3}, 0.9); }, "ngg", lr_spec,
      "LR", 42);
  auto [ngg_macro, ngg_micro] = mean_scores(ngg_records);
  check.expect(std::abs(ngg_macro - 0.712) <= 0.05,
               "NGG+LR macro " + format_value(ngg_macro) + " not within 0.05 of 0.712");

  std::string glove_path =
      std::getenv("HATEGRAPH_GLOVE") ? std::getenv("HATEGRAPH_GLOVE") : "data/glove.50d.txt";
  std::string detail = "BoW macro " + format_value(bow_macro) + ", NGG macro " +
                       format_value(ngg_macro);
  if (fs::exists(glove_path)) {
    auto table =
        std::make_shared<features::EmbeddingTable>(features::EmbeddingTable::load(glove_path, 50));
    auto make_best = [&]() {
      std::vector<std::unique_ptr<features::FeatureExtractor>> parts;
      parts.push_back(features::make_ngg_extractor({3, 3}, 0.9));
      parts.push_back(features::make_bow_extractor(lexicon));
      parts.push_back(features::make_glove_extractor(table));
      return features::make_combo_extractor("best", std::move(parts));
    };
    auto best_records =
        evaluation::cross_validate(prepared, folds, make_best, "best", lr_spec, "LR", 42);
    auto [best_macro, best_micro] = mean_scores(best_records);
    check.expect(std::abs(best_micro - 0.831) <= 0.05,
                 "best+LR micro " + format_value(best_micro) + " not within 0.05 of 0.831");

    features::PreparedCorpus prepared_mc = features::PreparedCorpus::build(lr.corpus, stop);
    corpus::FoldPlan folds_mc = corpus::stratified_folds(lr.corpus, 10, 42);
    auto mc_records =
        evaluation::cross_validate(prepared_mc, folds_mc, make_best, "best", lr_spec, "LR", 42);
    auto [mc_macro, mc_micro] = mean_scores(mc_records);
    check.expect(std::abs(mc_micro - 0.855) <= 0.05,
                 "multiclass best+LR micro " + format_value(mc_micro) +
                     " not within 0.05 of 0.855");
    detail += ", best micro " + format_value(best_micro) + ", multiclass micro " +
              format_value(mc_micro);
  } else {
    detail += "; embeddings absent, best-combo checks skipped";
  }
  if (!check.ok) return {Outcome::Kind::Fail, check.first_failure};
  return {Outcome::Kind::Pass, detail};
}

Outcome criterion_determinism() {
  TempDir dir("determinism");
  // small synthetic datasets
  std::ostringstream rs;
  rs << "id\tlabel\ttext\n";
  Rng rng(5);
  for (int i = 0; i < 18; ++i)
    rs << "r" << i << "\tracism\tthose crowds are " << random_text(rng, 12, "vermin scu")
       << " vermin scum\n";
  for (int i = 0; i < 18; ++i)
    rs << "n" << i << "\tnone\tlovely " << random_text(rng, 12, "daygret ok") << " day today\n";
  fs::path rs_path = dir.file("rs.tsv", rs.str());

  std::ostringstream hsol;
  hsol << ",class,tweet\n";
  for (int i = 0; i < 12; ++i)
    hsol << i << ",0,get out you " << random_text(rng, 10, "filthscum ") << " filth\n";
  for (int i = 0; i < 12; ++i)
    hsol << (12 + i) << ",2,nice quiet " << random_text(rng, 10, "eveningcof") << " evening\n";
  fs::path hsol_path = dir.file("hsol.csv", hsol.str());

  fs::path stop_path = dir.file("stop.txt", "the\nand\n");
  fs::path lex_path = dir.file("lex.txt", "vermin\nscum\nfilth\n");

  std::ostringstream cfg;
  cfg << "{\n"
      << "  \"dataset\": {\"rs_path\": \"" << rs_path.string() << "\", \"hsol_path\": \""
      << hsol_path.string() << "\"},\n"
      << "  \"features\": [\"ngg\", \"bow\"],\n"
      << "  \"classifiers\": [\"LR\", \"NB\"],\n"
      << "  \"folds\": 3,\n"
      << "  \"seed\": 42,\n"
      << "  \"resources\": {\"stopwords\": \"" << stop_path.string() << "\", \"lexicon\": \""
      << lex_path.string() << "\"},\n"
      << "  \"output_dir\": \"" << (dir.path / "out1").string() << "\"\n"
      << "}\n";
  fs::path cfg_path = dir.file("config.json", cfg.str());

  config::ValidationResult v1 = config::validate_config(cfg_path);
  if (!v1.ok()) return {Outcome::Kind::Fail, "config invalid: " + v1.errors.front()};
  std::ostringstream log1, log2;
  int rc1 = runner::run_experiment(v1.config, log1);
  if (rc1 != 0) return {Outcome::Kind::Fail, "first run failed\n" + log1.str()};

  config::CliOverrides overrides;
  overrides.out = (dir.path / "out2").string();
  config::ValidationResult v2 = config::validate_config(cfg_path, overrides);
  if (!v2.ok()) return {Outcome::Kind::Fail, "override config invalid"};
  int rc2 = runner::run_experiment(v2.config, log2);
  if (rc2 != 0) return {Outcome::Kind::Fail, "second run failed"};

  std::string csv1 = util::read_text_file(dir.path / "out1" / runner::kResultsFile);
  std::string csv2 = util::read_text_file(dir.path / "out2" / runner::kResultsFile);
  if (csv1 != csv2) return {Outcome::Kind::Fail, "results CSVs differ between runs"};
  std::string report1 = util::read_text_file(dir.path / "out1" / runner::kReportFile);
  std::string report2 = util::read_text_file(dir.path / "out2" / runner::kReportFile);
  if (report1 != report2) return {Outcome::Kind::Fail, "significance reports differ"};
  return {Outcome::Kind::Pass, "byte-identical results CSVs across two runs"};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> criteria = {
      {1, "similarity algebra (VS/SS/NVS bounds, symmetry, oracle)", criterion_similarity_algebra},
      {2, "RCG mean-merge permutation invariance and identity", criterion_rcg_merge},
      {3, "MLP gradient check (2-3-3-3-2, dropout off)", criterion_mlp_gradient},
      {4, "metric oracle (hand-worked matrix, micro = accuracy)", criterion_metric_oracle},
      {5, "majority baseline at the published class counts", criterion_majority_baseline},
      {6, "statistics oracle (ANOVA, studentized range, Tukey k=2)",
       criterion_statistics_oracle},
      {7, "synthetic end-to-end (separable corpus, shuffled-label control)",
       criterion_synthetic_end_to_end},
      {8, "HSOL replication (conditional on public data)", criterion_hsol_replication},
      {9, "determinism (byte-identical results CSVs)", criterion_determinism},
  };

  int failures = 0;
  for (const auto& entry : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome = {Outcome::Kind::Fail, std::string("exception: ") + e.what()};
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = outcome.kind == Outcome::Kind::Pass
                          ? "PASS"
                          : (outcome.kind == Outcome::Kind::Skip ? "SKIP" : "FAIL");
    if (outcome.kind == Outcome::Kind::Fail) ++failures;
    std::printf("%s criterion %d: %s [%.1fs]%s%s\n", tag, entry.id, entry.name, seconds,
                outcome.detail.empty() ? "" : " - ", outcome.detail.c_str());
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed (skips are conditional criteria without data)\n");
  return 0;
}
