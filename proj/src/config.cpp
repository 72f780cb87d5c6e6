#include "hategraph/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>

#include <json.hpp>

#include "hategraph/util.hpp"

namespace hategraph::config {

using nlohmann::json;

std::string task_name(Task task) {
  switch (task) {
    case Task::BinaryCombined: return "binary-combined";
    case Task::MulticlassRS: return "multiclass-rs";
    case Task::MulticlassHSOL: return "multiclass-hsol";
  }
  return "?";
}

std::optional<Task> parse_task(const std::string& name) {
  if (name == "binary-combined") return Task::BinaryCombined;
  if (name == "multiclass-rs") return Task::MulticlassRS;
  if (name == "multiclass-hsol") return Task::MulticlassHSOL;
  return std::nullopt;
}

std::vector<std::string> ExperimentConfig::grid_feature_names() const {
  std::vector<std::string> names = features;
  for (const auto& combo : combos) names.push_back(combo.name);
  return names;
}

bool ExperimentConfig::uses_feature(const std::string& name) const {
  if (std::find(features.begin(), features.end(), name) != features.end()) return true;
  for (const auto& combo : combos)
    if (std::find(combo.parts.begin(), combo.parts.end(), name) != combo.parts.end()) return true;
  return false;
}

namespace {

bool is_known_feature(const std::string& name) {
  for (const char* f : kKnownFeatures)
    if (name == f) return true;
  return false;
}

struct Parser {
  std::vector<std::string>& errors;

  void fail(const std::string& path, const std::string& message) {
    errors.push_back(path + ": " + message);
  }

  void check_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
    }
  }

  template <typename T>
  bool read(const json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.contains(key)) return false;
    try {
      out = obj.at(key).get<T>();
      return true;
    } catch (const json::exception&) {
      fail(path + "." + key, "wrong type");
      return false;
    }
  }
};

// Resolves a resource path: absolute or existing-relative paths win; then
// HATEGRAPH_DATA is tried as a base directory.
std::string resolve_data_path(const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute() || std::filesystem::exists(p)) return path;
  if (const char* base = std::getenv("HATEGRAPH_DATA")) {
    std::filesystem::path candidate = std::filesystem::path(base) / p;
    if (std::filesystem::exists(candidate)) return candidate.string();
  }
  return path;
}

void parse_column_map(Parser& parser, const json& obj, const std::string& path,
                      corpus::ColumnMap& columns) {
  parser.check_keys(obj, path, {"id", "text", "label"});
  parser.read(obj, path, "id", columns.id);
  parser.read(obj, path, "text", columns.text);
  parser.read(obj, path, "label", columns.label);
}

void parse_hyperparameters(Parser& parser, const json& obj, const std::string& path,
                           classifiers::Algorithm algorithm, classifiers::Hyperparameters& hp) {
  using classifiers::Algorithm;
  std::set<std::string> allowed;
  switch (algorithm) {
    case Algorithm::NB: allowed = {"var_floor"}; break;
    case Algorithm::LR: allowed = {"l2", "tolerance", "max_iterations"}; break;
    case Algorithm::KNN: allowed = {"k"}; break;
    case Algorithm::RF: allowed = {"trees", "min_samples_split"}; break;
    case Algorithm::MLP:
      allowed = {"hidden", "dropout", "learning_rate", "epochs", "batch_size"};
      break;
  }
  parser.check_keys(obj, path, allowed);
  parser.read(obj, path, "var_floor", hp.nb_var_floor);
  parser.read(obj, path, "l2", hp.lr_l2);
  parser.read(obj, path, "tolerance", hp.lr_tolerance);
  parser.read(obj, path, "max_iterations", hp.lr_max_iterations);
  parser.read(obj, path, "k", hp.knn_k);
  parser.read(obj, path, "trees", hp.rf_trees);
  parser.read(obj, path, "min_samples_split", hp.rf_min_samples_split);
  parser.read(obj, path, "hidden", hp.mlp_hidden);
  parser.read(obj, path, "dropout", hp.mlp_dropout);
  parser.read(obj, path, "learning_rate", hp.mlp_learning_rate);
  parser.read(obj, path, "epochs", hp.mlp_epochs);
  parser.read(obj, path, "batch_size", hp.mlp_batch_size);
  try {
    hp.validate(algorithm);
  } catch (const std::exception& e) {
    parser.fail(path, e.what());
  }
}

void require_file(Parser& parser, const std::string& path_value, const std::string& json_path) {
  if (path_value.empty()) {
    parser.fail(json_path, "required path missing");
    return;
  }
  if (!std::filesystem::exists(path_value))
    parser.fail(json_path, "file does not exist: " + path_value);
}

}  // namespace

ValidationResult validate_config(const std::filesystem::path& path, const CliOverrides& overrides) {
  ValidationResult result;
  ExperimentConfig& config = result.config;
  Parser parser{result.errors};

  json root;
  {
    std::ifstream in(path);
    if (!in) {
      parser.fail("$", "cannot open config file: " + path.string());
      return result;
    }
    try {
      root = json::parse(in);
    } catch (const json::exception& e) {
      parser.fail("$", std::string("JSON parse error: ") + e.what());
      return result;
    }
  }
  if (!root.is_object()) {
    parser.fail("$", "config root must be an object");
    return result;
  }

  parser.check_keys(root, "$",
                    {"task", "dataset", "features", "combos", "classifiers", "folds", "seed",
                     "jobs", "resources", "ngg", "ngrams", "alpha", "output_dir", "emit_timings",
                     "dump_models"});

  std::string task_str;
  if (parser.read(root, "$", "task", task_str)) {
    if (auto task = parse_task(task_str))
      config.task = *task;
    else
      parser.fail("$.task", "unknown task '" + task_str + "'");
  }

  if (root.contains("dataset") && root.at("dataset").is_object()) {
    const json& ds = root.at("dataset");
    parser.check_keys(ds, "$.dataset",
                      {"rs_path", "hsol_path", "rs_columns", "hsol_columns", "delimiter"});
    parser.read(ds, "$.dataset", "rs_path", config.dataset.rs_path);
    parser.read(ds, "$.dataset", "hsol_path", config.dataset.hsol_path);
    if (ds.contains("rs_columns"))
      parse_column_map(parser, ds.at("rs_columns"), "$.dataset.rs_columns",
                       config.dataset.rs_columns);
    if (ds.contains("hsol_columns"))
      parse_column_map(parser, ds.at("hsol_columns"), "$.dataset.hsol_columns",
                       config.dataset.hsol_columns);
    std::string delim;
    if (parser.read(ds, "$.dataset", "delimiter", delim)) {
      if (delim == "auto")
        config.dataset.delimiter = 0;
      else if (delim == "comma")
        config.dataset.delimiter = ',';
      else if (delim == "tab")
        config.dataset.delimiter = '\t';
      else
        parser.fail("$.dataset.delimiter", "must be auto, comma or tab");
    }
  } else if (root.contains("dataset")) {
    parser.fail("$.dataset", "must be an object");
  }

  if (root.contains("features")) {
    if (!root.at("features").is_array()) {
      parser.fail("$.features", "must be an array");
    } else {
      size_t i = 0;
      for (const json& f : root.at("features")) {
        std::string fpath = "$.features[" + std::to_string(i++) + "]";
        if (!f.is_string()) {
          parser.fail(fpath, "must be a string");
          continue;
        }
        std::string name = f.get<std::string>();
        if (!is_known_feature(name)) {
          parser.fail(fpath, "unknown feature '" + name + "'");
          continue;
        }
        if (std::find(config.features.begin(), config.features.end(), name) !=
            config.features.end()) {
          parser.fail(fpath, "duplicate feature '" + name + "'");
          continue;
        }
        config.features.push_back(name);
      }
    }
  }
  if (config.features.empty()) parser.fail("$.features", "at least one feature is required");

  auto all_minus_ngg = [&]() {
    std::vector<std::string> parts;
    for (const auto& f : config.features)
      if (f != "ngg") parts.push_back(f);
    return parts;
  };

  if (root.contains("combos")) {
    if (!root.at("combos").is_array()) {
      parser.fail("$.combos", "must be an array");
    } else {
      size_t i = 0;
      for (const json& c : root.at("combos")) {
        std::string cpath = "$.combos[" + std::to_string(i++) + "]";
        ComboConfig combo;
        if (c.is_string()) {
          combo.name = c.get<std::string>();
          if (combo.name == "best") {
            combo.parts = {"ngg", "bow", "glove"};
            for (const auto& part : combo.parts)
              if (std::find(config.features.begin(), config.features.end(), part) ==
                  config.features.end())
                parser.fail(cpath, "combo 'best' needs feature '" + part + "' declared");
          } else if (combo.name == "all") {
            combo.parts = config.features;
          } else if (combo.name == "vector") {
            combo.parts = all_minus_ngg();
            if (combo.parts.empty())
              parser.fail(cpath, "combo 'vector' needs at least one non-ngg feature");
          } else {
            parser.fail(cpath, "unknown named combo '" + combo.name +
                                   "' (expected best, all or vector)");
            continue;
          }
        } else if (c.is_object()) {
          parser.check_keys(c, cpath, {"name", "parts"});
          if (!parser.read(c, cpath, "name", combo.name)) parser.fail(cpath + ".name", "required");
          if (!c.contains("parts") || !c.at("parts").is_array()) {
            parser.fail(cpath + ".parts", "required array");
            continue;
          }
          size_t j = 0;
          for (const json& part : c.at("parts")) {
            std::string ppath = cpath + ".parts[" + std::to_string(j++) + "]";
            if (!part.is_string()) {
              parser.fail(ppath, "must be a string");
              continue;
            }
            std::string pname = part.get<std::string>();
            if (std::find(config.features.begin(), config.features.end(), pname) ==
                config.features.end()) {
              parser.fail(ppath, "combo references undeclared feature '" + pname + "'");
              continue;
            }
            combo.parts.push_back(pname);
          }
          if (combo.parts.empty()) parser.fail(cpath + ".parts", "combo has no valid parts");
        } else {
          parser.fail(cpath, "must be a string or an object");
          continue;
        }
        config.combos.push_back(std::move(combo));
      }
    }
  }

  {
    std::set<std::string> names(config.features.begin(), config.features.end());
    size_t i = 0;
    for (const auto& combo : config.combos) {
      if (!names.insert(combo.name).second)
        parser.fail("$.combos[" + std::to_string(i) + "].name",
                    "duplicate grid name '" + combo.name + "'");
      ++i;
    }
  }

  if (root.contains("classifiers")) {
    if (!root.at("classifiers").is_array()) {
      parser.fail("$.classifiers", "must be an array");
    } else {
      size_t i = 0;
      for (const json& c : root.at("classifiers")) {
        std::string cpath = "$.classifiers[" + std::to_string(i++) + "]";
        ClassifierConfig cc;
        if (c.is_string()) {
          std::string name = c.get<std::string>();
          if (auto alg = classifiers::parse_algorithm(name)) {
            cc.algorithm = *alg;
            cc.display_name = name;
          } else {
            parser.fail(cpath, "unknown algorithm '" + name + "'");
            continue;
          }
        } else if (c.is_object()) {
          parser.check_keys(c, cpath, {"algorithm", "hyperparameters"});
          std::string name;
          if (!parser.read(c, cpath, "algorithm", name)) {
            parser.fail(cpath + ".algorithm", "required");
            continue;
          }
          auto alg = classifiers::parse_algorithm(name);
          if (!alg) {
            parser.fail(cpath + ".algorithm", "unknown algorithm '" + name + "'");
            continue;
          }
          cc.algorithm = *alg;
          cc.display_name = name;
          if (c.contains("hyperparameters")) {
            if (!c.at("hyperparameters").is_object())
              parser.fail(cpath + ".hyperparameters", "must be an object");
            else
              parse_hyperparameters(parser, c.at("hyperparameters"), cpath + ".hyperparameters",
                                    cc.algorithm, cc.hp);
          }
        } else {
          parser.fail(cpath, "must be a string or an object");
          continue;
        }
        config.classifiers.push_back(std::move(cc));
      }
      std::set<std::string> seen;
      for (size_t j = 0; j < config.classifiers.size(); ++j) {
        if (!seen.insert(config.classifiers[j].display_name).second)
          parser.fail("$.classifiers[" + std::to_string(j) + "]",
                      "duplicate classifier '" + config.classifiers[j].display_name + "'");
      }
    }
  }
  if (config.classifiers.empty())
    parser.fail("$.classifiers", "at least one classifier is required");

  parser.read(root, "$", "folds", config.folds);
  parser.read(root, "$", "seed", config.seed);
  parser.read(root, "$", "jobs", config.jobs);
  if (config.folds < 2) parser.fail("$.folds", "cross-validation needs k >= 2");
  if (config.jobs < 1) parser.fail("$.jobs", "jobs must be >= 1");

  if (root.contains("resources") && root.at("resources").is_object()) {
    const json& res = root.at("resources");
    parser.check_keys(res, "$.resources",
                      {"stopwords", "lexicon", "dictionary", "embeddings", "embedding_dim",
                       "sentiment_positive", "sentiment_negative", "precomputed_scores"});
    parser.read(res, "$.resources", "stopwords", config.resources.stopwords);
    parser.read(res, "$.resources", "lexicon", config.resources.lexicon);
    parser.read(res, "$.resources", "dictionary", config.resources.dictionary);
    parser.read(res, "$.resources", "embeddings", config.resources.embeddings);
    parser.read(res, "$.resources", "embedding_dim", config.resources.embedding_dim);
    parser.read(res, "$.resources", "sentiment_positive", config.resources.sentiment_positive);
    parser.read(res, "$.resources", "sentiment_negative", config.resources.sentiment_negative);
    if (res.contains("precomputed_scores") && !res.at("precomputed_scores").is_null())
      parser.read(res, "$.resources", "precomputed_scores", config.resources.precomputed_scores);
  } else if (root.contains("resources")) {
    parser.fail("$.resources", "must be an object");
  }
  if (config.resources.embedding_dim < 1)
    parser.fail("$.resources.embedding_dim", "must be >= 1");

  if (root.contains("ngg") && root.at("ngg").is_object()) {
    const json& g = root.at("ngg");
    parser.check_keys(g, "$.ngg", {"n", "window", "rcg_fraction"});
    parser.read(g, "$.ngg", "n", config.ngg_params.n);
    parser.read(g, "$.ngg", "window", config.ngg_params.window);
    parser.read(g, "$.ngg", "rcg_fraction", config.rcg_fraction);
    if (config.ngg_params.n < 1) parser.fail("$.ngg.n", "must be >= 1");
    if (config.ngg_params.window < 1) parser.fail("$.ngg.window", "must be >= 1");
    if (!(config.rcg_fraction > 0.0 && config.rcg_fraction <= 1.0))
      parser.fail("$.ngg.rcg_fraction", "must be in (0, 1]");
  } else if (root.contains("ngg")) {
    parser.fail("$.ngg", "must be an object");
  }

  if (root.contains("ngrams") && root.at("ngrams").is_object()) {
    const json& g = root.at("ngrams");
    parser.check_keys(g, "$.ngrams", {"char_n", "word_n", "top_k"});
    parser.read(g, "$.ngrams", "char_n", config.ngrams.char_n);
    parser.read(g, "$.ngrams", "word_n", config.ngrams.word_n);
    parser.read(g, "$.ngrams", "top_k", config.ngrams.top_k);
    if (config.ngrams.char_n < 1) parser.fail("$.ngrams.char_n", "must be >= 1");
    if (config.ngrams.word_n < 1) parser.fail("$.ngrams.word_n", "must be >= 1");
    if (config.ngrams.top_k < 1) parser.fail("$.ngrams.top_k", "must be >= 1");
  } else if (root.contains("ngrams")) {
    parser.fail("$.ngrams", "must be an object");
  }

  parser.read(root, "$", "alpha", config.alpha);
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) parser.fail("$.alpha", "must be in (0, 1)");
  parser.read(root, "$", "output_dir", config.output_dir);
  parser.read(root, "$", "emit_timings", config.emit_timings);
  parser.read(root, "$", "dump_models", config.dump_models);

  // CLI flags override config fields.
  if (overrides.out) config.output_dir = *overrides.out;
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.folds) {
    config.folds = *overrides.folds;
    if (config.folds < 2) parser.fail("--folds", "cross-validation needs k >= 2");
  }
  if (overrides.jobs) {
    config.jobs = *overrides.jobs;
    if (config.jobs < 1) parser.fail("--jobs", "jobs must be >= 1");
  }
  if (overrides.task) {
    if (auto task = parse_task(*overrides.task))
      config.task = *task;
    else
      parser.fail("--task", "unknown task '" + *overrides.task + "'");
  }

  if (config.output_dir.empty()) parser.fail("$.output_dir", "must not be empty");

  // Resolve paths against HATEGRAPH_DATA and check existence.
  auto& res = config.resources;
  for (std::string* p : {&res.stopwords, &res.lexicon, &res.dictionary, &res.embeddings,
                         &res.sentiment_positive, &res.sentiment_negative,
                         &res.precomputed_scores, &config.dataset.rs_path,
                         &config.dataset.hsol_path})
    *p = resolve_data_path(*p);

  bool needs_rs = config.task != Task::MulticlassHSOL;
  bool needs_hsol = config.task != Task::MulticlassRS;
  if (needs_rs) require_file(parser, config.dataset.rs_path, "$.dataset.rs_path");
  if (needs_hsol) require_file(parser, config.dataset.hsol_path, "$.dataset.hsol_path");

  require_file(parser, res.stopwords, "$.resources.stopwords");
  if (config.uses_feature("bow")) require_file(parser, res.lexicon, "$.resources.lexicon");
  if (config.uses_feature("glove")) require_file(parser, res.embeddings, "$.resources.embeddings");
  if (config.uses_feature("spelling"))
    require_file(parser, res.dictionary, "$.resources.dictionary");
  bool needs_sentiment = config.uses_feature("sentiment") || config.uses_feature("syntax");
  if (needs_sentiment) {
    if (!res.precomputed_scores.empty()) {
      require_file(parser, res.precomputed_scores, "$.resources.precomputed_scores");
    } else {
      require_file(parser, res.sentiment_positive, "$.resources.sentiment_positive");
      require_file(parser, res.sentiment_negative, "$.resources.sentiment_negative");
    }
  }
  return result;
}

std::string config_to_json(const ExperimentConfig& config) {
  json root;
  root["task"] = task_name(config.task);
  json ds;
  ds["rs_path"] = config.dataset.rs_path;
  ds["hsol_path"] = config.dataset.hsol_path;
  ds["rs_columns"] = {{"id", config.dataset.rs_columns.id},
                      {"text", config.dataset.rs_columns.text},
                      {"label", config.dataset.rs_columns.label}};
  ds["hsol_columns"] = {{"id", config.dataset.hsol_columns.id},
                        {"text", config.dataset.hsol_columns.text},
                        {"label", config.dataset.hsol_columns.label}};
  ds["delimiter"] = config.dataset.delimiter == 0
                        ? "auto"
                        : (config.dataset.delimiter == '\t' ? "tab" : "comma");
  root["dataset"] = ds;
  root["features"] = config.features;
  json combos = json::array();
  for (const auto& combo : config.combos)
    combos.push_back({{"name", combo.name}, {"parts", combo.parts}});
  root["combos"] = combos;
  json cls = json::array();
  for (const auto& c : config.classifiers) {
    json hp;
    switch (c.algorithm) {
      case classifiers::Algorithm::NB: hp["var_floor"] = c.hp.nb_var_floor; break;
      case classifiers::Algorithm::LR:
        hp["l2"] = c.hp.lr_l2;
        hp["tolerance"] = c.hp.lr_tolerance;
        hp["max_iterations"] = c.hp.lr_max_iterations;
        break;
      case classifiers::Algorithm::KNN: hp["k"] = c.hp.knn_k; break;
      case classifiers::Algorithm::RF:
        hp["trees"] = c.hp.rf_trees;
        hp["min_samples_split"] = c.hp.rf_min_samples_split;
        break;
      case classifiers::Algorithm::MLP:
        hp["hidden"] = c.hp.mlp_hidden;
        hp["dropout"] = c.hp.mlp_dropout;
        hp["learning_rate"] = c.hp.mlp_learning_rate;
        hp["epochs"] = c.hp.mlp_epochs;
        hp["batch_size"] = c.hp.mlp_batch_size;
        break;
    }
    cls.push_back({{"algorithm", c.display_name}, {"hyperparameters", hp}});
  }
  root["classifiers"] = cls;
  root["folds"] = config.folds;
  root["seed"] = config.seed;
  root["jobs"] = config.jobs;
  json res;
  res["stopwords"] = config.resources.stopwords;
  res["lexicon"] = config.resources.lexicon;
  res["dictionary"] = config.resources.dictionary;
  res["embeddings"] = config.resources.embeddings;
  res["embedding_dim"] = config.resources.embedding_dim;
  res["sentiment_positive"] = config.resources.sentiment_positive;
  res["sentiment_negative"] = config.resources.sentiment_negative;
  res["precomputed_scores"] = config.resources.precomputed_scores;
  root["resources"] = res;
  root["ngg"] = {{"n", config.ngg_params.n},
                 {"window", config.ngg_params.window},
                 {"rcg_fraction", config.rcg_fraction}};
  root["ngrams"] = {{"char_n", config.ngrams.char_n},
                    {"word_n", config.ngrams.word_n},
                    {"top_k", config.ngrams.top_k}};
  root["alpha"] = config.alpha;
  root["output_dir"] = config.output_dir;
  root["emit_timings"] = config.emit_timings;
  root["dump_models"] = config.dump_models;
  return root.dump(2);
}

}  // namespace hategraph::config
