#include "hategraph/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hategraph/evaluation.hpp"
#include "hategraph/rng.hpp"
#include "hategraph/stats.hpp"
#include "hategraph/util.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hategraph::runner {

namespace {

using nlohmann::json;

struct Resources {
  std::shared_ptr<const preprocess::StopwordSet> stopwords;
  std::shared_ptr<const features::Lexicon> lexicon;
  std::shared_ptr<const features::EmbeddingTable> embeddings;
  std::shared_ptr<const features::Dictionary> dictionary;
  std::shared_ptr<const features::SentimentScorer> scorer;
};

Resources load_resources(const config::ExperimentConfig& config) {
  Resources res;
  res.stopwords = std::make_shared<preprocess::StopwordSet>(
      preprocess::StopwordSet::load(config.resources.stopwords));
  if (config.uses_feature("bow"))
    res.lexicon =
        std::make_shared<features::Lexicon>(features::Lexicon::load(config.resources.lexicon));
  if (config.uses_feature("glove"))
    res.embeddings = std::make_shared<features::EmbeddingTable>(features::EmbeddingTable::load(
        config.resources.embeddings, config.resources.embedding_dim));
  if (config.uses_feature("spelling"))
    res.dictionary = std::make_shared<features::Dictionary>(
        features::Dictionary::load(config.resources.dictionary));
  if (config.uses_feature("sentiment") || config.uses_feature("syntax")) {
    if (!config.resources.precomputed_scores.empty())
      res.scorer = std::make_shared<features::PrecomputedScorer>(
          features::PrecomputedScorer::load(config.resources.precomputed_scores));
    else
      res.scorer = std::make_shared<features::LexiconSentimentScorer>(
          features::LexiconSentimentScorer::load(config.resources.sentiment_positive,
                                                 config.resources.sentiment_negative));
  }
  return res;
}

std::unique_ptr<features::FeatureExtractor> make_single_extractor(
    const config::ExperimentConfig& config, const Resources& res, const std::string& name) {
  if (name == "ngg") return features::make_ngg_extractor(config.ngg_params, config.rcg_fraction);
  if (name == "bow") return features::make_bow_extractor(res.lexicon);
  if (name == "glove") return features::make_glove_extractor(res.embeddings);
  if (name == "c-ngrams")
    return features::make_char_ngram_extractor(config.ngrams.char_n, config.ngrams.top_k);
  if (name == "w-ngrams")
    return features::make_word_ngram_extractor(config.ngrams.word_n, config.ngrams.top_k);
  if (name == "sentiment") return features::make_sentiment_extractor(res.scorer);
  if (name == "syntax") return features::make_syntax_extractor(res.scorer);
  if (name == "spelling") return features::make_spelling_extractor(res.dictionary);
  throw std::logic_error("unknown feature '" + name + "'");
}

std::unique_ptr<features::FeatureExtractor> make_grid_extractor(
    const config::ExperimentConfig& config, const Resources& res, const std::string& name) {
  for (const auto& combo : config.combos) {
    if (combo.name != name) continue;
    std::vector<std::unique_ptr<features::FeatureExtractor>> parts;
    for (const auto& part : combo.parts)
      parts.push_back(make_single_extractor(config, res, part));
    return features::make_combo_extractor(name, std::move(parts));
  }
  return make_single_extractor(config, res, name);
}

corpus::LabeledCorpus load_corpus(const config::ExperimentConfig& config, std::ostream& log) {
  auto load_one = [&](auto loader, const std::string& path, const corpus::ColumnMap& columns,
                      const char* tag) {
    corpus::LoadResult lr = loader(path, columns, config.dataset.delimiter);
    if (!lr.ok()) {
      std::ostringstream msg;
      msg << tag << ": " << lr.errors.size() << " record error(s); first at data row "
          << lr.errors.front().row << ": " << lr.errors.front().message;
      throw std::runtime_error(msg.str());
    }
    if (lr.skipped_empty > 0)
      log << "warning: " << tag << ": skipped " << lr.skipped_empty << " empty-text row(s)\n";
    return lr.corpus;
  };

  switch (config.task) {
    case config::Task::MulticlassRS:
      return load_one(corpus::load_rs, config.dataset.rs_path, config.dataset.rs_columns, "RS");
    case config::Task::MulticlassHSOL:
      return load_one(corpus::load_hsol, config.dataset.hsol_path, config.dataset.hsol_columns,
                      "HSOL");
    case config::Task::BinaryCombined: {
      corpus::LabeledCorpus rs =
          load_one(corpus::load_rs, config.dataset.rs_path, config.dataset.rs_columns, "RS");
      corpus::LabeledCorpus hsol = load_one(corpus::load_hsol, config.dataset.hsol_path,
                                            config.dataset.hsol_columns, "HSOL");
      return corpus::combine_binary(rs, hsol);
    }
  }
  throw std::logic_error("unknown task");
}

struct CellStatus {
  std::string feature;
  std::string classifier;
  std::string status = "pending";  // pending | ok | failed
  double seconds = 0.0;
  std::string error;
};

json manifest_json(const config::ExperimentConfig& config,
                   const std::vector<std::pair<std::string, uint64_t>>& checksums,
                   const std::vector<CellStatus>& cells) {
  json root;
  root["toolkit_version"] = kVersion;
  root["config"] = json::parse(config::config_to_json(config));
  json inputs = json::object();
  char buf[32];
  for (const auto& [path, checksum] : checksums) {
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(checksum));
    inputs[path] = buf;
  }
  root["inputs"] = inputs;
  json cell_array = json::array();
  for (const auto& cell : cells) {
    json c;
    c["feature"] = cell.feature;
    c["classifier"] = cell.classifier;
    c["status"] = cell.status;
    c["seconds"] = cell.seconds;
    if (!cell.error.empty()) c["error"] = cell.error;
    cell_array.push_back(c);
  }
  root["cells"] = cell_array;
  return root;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string format_p(double p) {
  if (p < 2e-16) return "<2e-16";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", p);
  return buf;
}

void append_anova_section(std::ostringstream& out, const stats::AnovaTable& table,
                          const char* response_name) {
  out << "## ANOVA (" << response_name << ")\n\n";
  out << "| parameter | SS | df | MS | F | Pr(>F) |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const stats::AnovaRow* row : {&table.features, &table.classifiers}) {
    out << "| " << row->name << " | " << util::format_double(row->ss, 6) << " | " << row->df
        << " | ";
    if (row->df >= 1) {
      out << util::format_double(row->ms, 6) << " | ";
      if (std::isinf(row->f))
        out << "inf";
      else
        out << util::format_double(row->f, 3);
      out << " | " << format_p(row->p) << " |\n";
    } else {
      out << "- | - | - |\n";
    }
  }
  out << "| " << table.residual.name << " | " << util::format_double(table.residual.ss, 6)
      << " | " << table.residual.df << " | " << util::format_double(table.residual.ms, 6)
      << " | - | - |\n\n";
}

void append_tukey_section(std::ostringstream& out, const stats::TukeyResult& tukey,
                          const char* factor_name, const char* response_name) {
  out << "## Tukey HSD on " << response_name << ": " << factor_name << " (alpha "
      << util::format_double(tukey.alpha, 2) << ")\n\n";
  out << "| config | " << response_name << " | groups |\n";
  out << "|---|---|---|\n";
  for (const auto& level : tukey.levels)
    out << "| " << level.level << " | " << util::format_double(level.mean, 3) << " | "
        << level.letters << " |\n";
  out << "\n";
}

std::string significance_report(const std::vector<evaluation::RunRecord>& records,
                                const config::ExperimentConfig& config, bool all_cells_ok) {
  std::ostringstream out;
  out << "# Significance report\n\n";
  if (!all_cells_ok) {
    out << "Significance testing skipped: one or more grid cells failed, so the\n"
           "design is incomplete. See manifest.json for per-cell status.\n";
    return out.str();
  }
  size_t feature_count = config.grid_feature_names().size();
  size_t classifier_count = config.classifiers.size();
  if (records.empty() || (feature_count < 2 && classifier_count < 2)) {
    out << "Significance testing skipped: needs at least two levels in one factor.\n";
    return out.str();
  }
  try {
    append_anova_section(out, stats::anova_two_factor(records, stats::Response::MacroF),
                         "macro F-measure");
    append_anova_section(out, stats::anova_two_factor(records, stats::Response::MicroF),
                         "micro F-measure");
    if (feature_count >= 2)
      append_tukey_section(out,
                           stats::tukey_hsd(records, stats::Factor::Features, config.alpha,
                                            stats::Response::MicroF),
                           "feature configurations", "micro F-measure");
    if (classifier_count >= 2)
      append_tukey_section(out,
                           stats::tukey_hsd(records, stats::Factor::Classifiers, config.alpha,
                                            stats::Response::MicroF),
                           "classifiers", "micro F-measure");
  } catch (const std::exception& e) {
    out << "Significance testing failed: " << e.what() << "\n";
  }
  return out.str();
}

}  // namespace

int run_experiment(const config::ExperimentConfig& config, std::ostream& log) {
  namespace fs = std::filesystem;
  fs::path out_dir(config.output_dir);
  if (fs::exists(out_dir)) {
    if (!fs::is_directory(out_dir)) {
      log << "error: output path exists and is not a directory: " << out_dir.string() << '\n';
      return 1;
    }
    if (!fs::is_empty(out_dir)) {
      log << "error: output directory is not empty: " << out_dir.string() << '\n';
      return 1;
    }
  } else {
    fs::create_directories(out_dir);
  }

  // Input checksums for the manifest.
  std::vector<std::pair<std::string, uint64_t>> checksums;
  auto add_checksum = [&](const std::string& path) {
    if (!path.empty() && fs::exists(path)) checksums.emplace_back(path, util::fnv1a64_file(path));
  };
  if (config.task != config::Task::MulticlassHSOL) add_checksum(config.dataset.rs_path);
  if (config.task != config::Task::MulticlassRS) add_checksum(config.dataset.hsol_path);
  add_checksum(config.resources.stopwords);
  if (config.uses_feature("bow")) add_checksum(config.resources.lexicon);
  if (config.uses_feature("glove")) add_checksum(config.resources.embeddings);
  if (config.uses_feature("spelling")) add_checksum(config.resources.dictionary);
  if (config.uses_feature("sentiment") || config.uses_feature("syntax")) {
    if (!config.resources.precomputed_scores.empty()) {
      add_checksum(config.resources.precomputed_scores);
    } else {
      add_checksum(config.resources.sentiment_positive);
      add_checksum(config.resources.sentiment_negative);
    }
  }

  const std::vector<std::string> feature_names = config.grid_feature_names();
  std::vector<CellStatus> cells;
  for (const auto& feature : feature_names)
    for (const auto& classifier : config.classifiers) {
      CellStatus cell;
      cell.feature = feature;
      cell.classifier = classifier.display_name;
      cells.push_back(std::move(cell));
    }
  auto cell_index = [&](const std::string& feature, const std::string& classifier) {
    for (size_t i = 0; i < cells.size(); ++i)
      if (cells[i].feature == feature && cells[i].classifier == classifier) return i;
    throw std::logic_error("unknown cell");
  };

  // Manifest goes out before any cell executes.
  write_file(out_dir / kManifestFile, manifest_json(config, checksums, cells).dump(2) + "\n");

  corpus::LabeledCorpus corpus;
  features::PreparedCorpus prepared;
  corpus::FoldPlan folds;
  Resources resources;
  try {
    corpus = load_corpus(config, log);
    log << "loaded " << corpus.documents.size() << " documents, "
        << corpus.label_set.size() << " classes (" << corpus.provenance << ")\n";
    resources = load_resources(config);
    prepared = features::PreparedCorpus::build(corpus, *resources.stopwords);
    folds = corpus::stratified_folds(corpus, config.folds, config.seed);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    for (auto& cell : cells) {
      cell.status = "failed";
      cell.error = e.what();
    }
    write_file(out_dir / kManifestFile, manifest_json(config, checksums, cells).dump(2) + "\n");
    return 1;
  }

  // Grid execution: one unit per (feature config, fold). Every unit fits its
  // extractor once and evaluates every classifier on the fitted features.
  struct Unit {
    size_t feature_idx;
    int fold;
  };
  std::vector<Unit> units;
  for (size_t f = 0; f < feature_names.size(); ++f)
    for (int fold = 0; fold < config.folds; ++fold) units.push_back({f, fold});

  std::vector<evaluation::RunRecord> records;
  struct DumpedModel {
    std::string feature, classifier;
    int fold;
    std::string blob;
  };
  std::vector<DumpedModel> dumps;
  std::vector<std::string> unit_errors(units.size());

  auto run_unit = [&](size_t u, std::vector<evaluation::RunRecord>& local_records,
                      std::vector<DumpedModel>& local_dumps) {
    const std::string& feature = feature_names[units[u].feature_idx];
    const int fold = units[u].fold;
    auto extractor = make_grid_extractor(config, resources, feature);
    std::vector<size_t> train_idx = folds.train_indices(fold);
    features::TrainingView view{&prepared, train_idx,
                                derive_seed(config.seed, util::fnv1a64(feature),
                                            static_cast<uint64_t>(fold))};
    extractor->fit(view);

    std::vector<evaluation::FoldCell> fold_cells;
    for (const auto& classifier : config.classifiers) {
      classifiers::ClassifierSpec spec;
      spec.algorithm = classifier.algorithm;
      spec.hp = classifier.hp;
      spec.seed = derive_seed(config.seed,
                              util::fnv1a64(feature + "|" + classifier.display_name),
                              static_cast<uint64_t>(fold));
      fold_cells.push_back({spec, classifier.display_name});
    }
    evaluation::FoldOutcome outcome = evaluation::evaluate_fold(
        prepared, folds, fold, *extractor, feature, fold_cells, config.dump_models);
    for (auto& r : outcome.records) local_records.push_back(std::move(r));
    if (config.dump_models) {
      for (size_t m = 0; m < outcome.models.size(); ++m) {
        std::ostringstream blob;
        outcome.models[m]->save(blob);
        local_dumps.push_back({feature, fold_cells[m].classifier_name, fold, blob.str()});
      }
    }
  };

  if (config.jobs <= 1) {
    for (size_t u = 0; u < units.size(); ++u) {
      try {
        run_unit(u, records, dumps);
      } catch (const std::exception& e) {
        unit_errors[u] = e.what();
      }
    }
  } else {
    std::vector<std::vector<evaluation::RunRecord>> unit_records(units.size());
    std::vector<std::vector<DumpedModel>> unit_dumps(units.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(config.jobs)
#endif
    for (long long u = 0; u < static_cast<long long>(units.size()); ++u) {
      try {
        run_unit(static_cast<size_t>(u), unit_records[static_cast<size_t>(u)],
                 unit_dumps[static_cast<size_t>(u)]);
      } catch (const std::exception& e) {
        unit_errors[static_cast<size_t>(u)] = e.what();
      }
    }
    for (size_t u = 0; u < units.size(); ++u) {
      for (auto& r : unit_records[u]) records.push_back(std::move(r));
      for (auto& d : unit_dumps[u]) dumps.push_back(std::move(d));
    }
  }

  // Fold results roll up into per-cell status; a unit error fails every cell
  // of that feature config.
  for (size_t u = 0; u < units.size(); ++u) {
    if (unit_errors[u].empty()) continue;
    const std::string& feature = feature_names[units[u].feature_idx];
    log << "error: " << feature << " fold " << units[u].fold << ": " << unit_errors[u] << '\n';
    for (const auto& classifier : config.classifiers) {
      CellStatus& cell = cells[cell_index(feature, classifier.display_name)];
      cell.status = "failed";
      if (cell.error.empty()) cell.error = unit_errors[u];
    }
  }
  std::map<std::pair<std::string, std::string>, int> fold_counts;
  for (const auto& r : records) {
    CellStatus& cell = cells[cell_index(r.feature_config, r.classifier)];
    cell.seconds += r.seconds;
    ++fold_counts[{r.feature_config, r.classifier}];
  }
  for (auto& cell : cells) {
    if (cell.status == "failed") continue;
    cell.status = fold_counts[{cell.feature, cell.classifier}] == config.folds ? "ok" : "failed";
    if (cell.status == "failed" && cell.error.empty()) cell.error = "missing fold results";
  }
  bool all_ok = std::all_of(cells.begin(), cells.end(),
                            [](const CellStatus& c) { return c.status == "ok"; });

  // Deterministic row order: grid order, then fold.
  auto feature_rank = [&](const std::string& name) {
    return std::find(feature_names.begin(), feature_names.end(), name) - feature_names.begin();
  };
  auto classifier_rank = [&](const std::string& name) {
    for (size_t i = 0; i < config.classifiers.size(); ++i)
      if (config.classifiers[i].display_name == name) return i;
    return config.classifiers.size();
  };
  std::sort(records.begin(), records.end(),
            [&](const evaluation::RunRecord& a, const evaluation::RunRecord& b) {
              auto ka = std::tuple(feature_rank(a.feature_config), classifier_rank(a.classifier),
                                   a.fold);
              auto kb = std::tuple(feature_rank(b.feature_config), classifier_rank(b.classifier),
                                   b.fold);
              return ka < kb;
            });

  write_file(out_dir / kResultsFile, evaluation::results_csv(records, config.emit_timings));
  write_file(out_dir / kReportFile, significance_report(records, config, all_ok));

  if (config.dump_models && !dumps.empty()) {
    fs::create_directories(out_dir / "models");
    for (const auto& d : dumps) {
      std::string name = d.feature + "__" + d.classifier + "__fold" + std::to_string(d.fold) +
                         ".model";
      write_file(out_dir / "models" / name, d.blob);
    }
  }

  write_file(out_dir / kManifestFile, manifest_json(config, checksums, cells).dump(2) + "\n");

  size_t ok_count = static_cast<size_t>(
      std::count_if(cells.begin(), cells.end(),
                    [](const CellStatus& c) { return c.status == "ok"; }));
  log << "grid complete: " << ok_count << "/" << cells.size() << " cells ok; artifacts in "
      << out_dir.string() << '\n';
  return all_ok ? 0 : 1;
}

}  // namespace hategraph::runner
