#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "hategraph/stats.hpp"

namespace hategraph::stats {

namespace {

double response_of(const evaluation::RunRecord& r, Response response) {
  return response == Response::MacroF ? r.eval.macro_f : r.eval.micro_f;
}

const std::string& factor_of(const evaluation::RunRecord& r, Factor factor) {
  return factor == Factor::Features ? r.feature_config : r.classifier;
}

// Levels in first-appearance order.
std::vector<std::string> collect_levels(std::span<const evaluation::RunRecord> records,
                                        Factor factor) {
  std::vector<std::string> levels;
  for (const auto& r : records) {
    const std::string& level = factor_of(r, factor);
    if (std::find(levels.begin(), levels.end(), level) == levels.end()) levels.push_back(level);
  }
  return levels;
}

size_t level_index(const std::vector<std::string>& levels, const std::string& level) {
  return static_cast<size_t>(std::find(levels.begin(), levels.end(), level) - levels.begin());
}

}  // namespace

AnovaTable anova_two_factor(std::span<const evaluation::RunRecord> records, Response response) {
  if (records.empty()) throw std::invalid_argument("anova: no records");
  std::vector<std::string> features = collect_levels(records, Factor::Features);
  std::vector<std::string> classifiers = collect_levels(records, Factor::Classifiers);

  // Balance check: identical replicate count in every cell.
  std::map<std::pair<size_t, size_t>, size_t> cell_counts;
  for (const auto& r : records) {
    size_t fi = level_index(features, r.feature_config);
    size_t ci = level_index(classifiers, r.classifier);
    ++cell_counts[{fi, ci}];
  }
  if (cell_counts.size() != features.size() * classifiers.size())
    throw std::invalid_argument("anova: unbalanced design (missing cells)");
  size_t replicates = cell_counts.begin()->second;
  for (const auto& [cell, count] : cell_counts)
    if (count != replicates) throw std::invalid_argument("anova: unbalanced design");

  const double n = static_cast<double>(records.size());
  double grand = 0.0;
  for (const auto& r : records) grand += response_of(r, response);
  grand /= n;

  auto main_effect_ss = [&](Factor factor, const std::vector<std::string>& levels) {
    std::vector<double> sums(levels.size(), 0.0);
    std::vector<size_t> counts(levels.size(), 0);
    for (const auto& r : records) {
      size_t li = level_index(levels, factor_of(r, factor));
      sums[li] += response_of(r, response);
      ++counts[li];
    }
    double ss = 0.0;
    for (size_t li = 0; li < levels.size(); ++li) {
      double mean = sums[li] / static_cast<double>(counts[li]);
      ss += static_cast<double>(counts[li]) * (mean - grand) * (mean - grand);
    }
    return ss;
  };

  AnovaTable table;
  table.features.name = "features";
  table.classifiers.name = "classifiers";
  table.residual.name = "residuals";

  table.features.ss = main_effect_ss(Factor::Features, features);
  table.features.df = static_cast<int>(features.size()) - 1;
  table.classifiers.ss = main_effect_ss(Factor::Classifiers, classifiers);
  table.classifiers.df = static_cast<int>(classifiers.size()) - 1;

  double total_ss = 0.0;
  for (const auto& r : records) {
    double d = response_of(r, response) - grand;
    total_ss += d * d;
  }
  table.total_ss = total_ss;
  table.total_df = static_cast<int>(records.size()) - 1;

  table.residual.ss = total_ss - table.features.ss - table.classifiers.ss;
  if (table.residual.ss < 0.0) table.residual.ss = 0.0;
  table.residual.df = table.total_df - table.features.df - table.classifiers.df;
  if (table.residual.df < 1) throw std::invalid_argument("anova: no residual degrees of freedom");
  table.residual.ms = table.residual.ss / table.residual.df;

  for (AnovaRow* row : {&table.features, &table.classifiers}) {
    if (row->df < 1) {
      row->ms = 0.0;
      row->f = std::numeric_limits<double>::quiet_NaN();
      row->p = 1.0;
      continue;
    }
    row->ms = row->ss / row->df;
    if (table.residual.ms <= 0.0) {
      // all responses identical, or factors explain everything
      row->f = row->ss > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
      row->p = row->ss > 0.0 ? 0.0 : 1.0;
      continue;
    }
    row->f = row->ms / table.residual.ms;
    row->p = f_sf(row->f, static_cast<double>(row->df), static_cast<double>(table.residual.df));
  }
  return table;
}

std::vector<std::string> compact_letter_display(
    size_t level_count, const std::vector<std::pair<size_t, size_t>>& significant_pairs) {
  // Insert-and-absorb: start with one column holding every level; each
  // significant pair splits any column containing both; subset columns are
  // absorbed.
  std::vector<std::set<size_t>> columns;
  std::set<size_t> all;
  for (size_t i = 0; i < level_count; ++i) all.insert(i);
  columns.push_back(std::move(all));

  for (const auto& [a, b] : significant_pairs) {
    std::vector<std::set<size_t>> next;
    for (const auto& col : columns) {
      if (col.count(a) && col.count(b)) {
        std::set<size_t> without_a = col, without_b = col;
        without_a.erase(a);
        without_b.erase(b);
        if (!without_a.empty()) next.push_back(std::move(without_a));
        if (!without_b.empty()) next.push_back(std::move(without_b));
      } else {
        next.push_back(col);
      }
    }
    // absorb: drop columns contained in another
    std::vector<std::set<size_t>> kept;
    for (size_t i = 0; i < next.size(); ++i) {
      bool absorbed = false;
      for (size_t j = 0; j < next.size() && !absorbed; ++j) {
        if (i == j) continue;
        bool subset = std::includes(next[j].begin(), next[j].end(), next[i].begin(), next[i].end());
        // proper subset, or equal set kept once (first occurrence wins)
        if (subset && (next[j].size() > next[i].size() || j < i)) absorbed = true;
      }
      if (!absorbed) kept.push_back(next[i]);
    }
    columns = std::move(kept);
  }

  // Letters ordered by the best (lowest index = highest mean) member.
  std::sort(columns.begin(), columns.end(),
            [](const std::set<size_t>& a, const std::set<size_t>& b) {
              if (*a.begin() != *b.begin()) return *a.begin() < *b.begin();
              return a.size() > b.size();
            });
  std::vector<std::string> letters(level_count);
  for (size_t c = 0; c < columns.size(); ++c) {
    char letter = static_cast<char>('a' + (c % 26));
    std::string tag = c < 26 ? std::string(1, letter) : std::string(1, letter) + std::to_string(c / 26);
    for (size_t level : columns[c]) letters[level] += tag;
  }
  return letters;
}

TukeyResult tukey_hsd(std::span<const evaluation::RunRecord> records, Factor factor, double alpha,
                      Response response) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("tukey: alpha must be in (0, 1)");
  AnovaTable anova = anova_two_factor(records, response);
  const double ms_resid = anova.residual.ms;
  const double df_resid = static_cast<double>(anova.residual.df);

  std::vector<std::string> levels = collect_levels(records, factor);
  if (levels.size() < 2) throw std::invalid_argument("tukey: need at least 2 factor levels");

  std::vector<double> sums(levels.size(), 0.0);
  std::vector<size_t> counts(levels.size(), 0);
  for (const auto& r : records) {
    size_t li = level_index(levels, factor_of(r, factor));
    sums[li] += response_of(r, response);
    ++counts[li];
  }
  std::vector<double> means(levels.size());
  for (size_t li = 0; li < levels.size(); ++li)
    means[li] = sums[li] / static_cast<double>(counts[li]);

  // Order levels by descending mean (ties by first appearance).
  std::vector<size_t> order(levels.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return means[a] > means[b]; });

  TukeyResult result;
  result.factor = factor;
  result.alpha = alpha;

  const int k = static_cast<int>(levels.size());
  std::vector<std::pair<size_t, size_t>> significant_sorted;  // indices into `order`
  for (size_t i = 0; i < order.size(); ++i) {
    for (size_t j = i + 1; j < order.size(); ++j) {
      size_t a = order[i], b = order[j];
      double se = std::sqrt(ms_resid / 2.0 *
                            (1.0 / static_cast<double>(counts[a]) +
                             1.0 / static_cast<double>(counts[b])));
      TukeyRow row;
      row.level_a = levels[a];
      row.level_b = levels[b];
      row.mean_diff = means[a] - means[b];
      if (se > 0.0) {
        row.q = std::abs(row.mean_diff) / se;
        row.p_adj = studentized_range_sf(row.q, k, df_resid);
      } else {
        // zero residual variance: any mean difference is significant
        row.q = row.mean_diff != 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        row.p_adj = row.mean_diff != 0.0 ? 0.0 : 1.0;
      }
      row.significant = row.p_adj < alpha;
      if (row.significant) significant_sorted.emplace_back(i, j);
      result.pairs.push_back(std::move(row));
    }
  }

  std::vector<std::string> letters = compact_letter_display(levels.size(), significant_sorted);
  for (size_t i = 0; i < order.size(); ++i) {
    result.levels.push_back({levels[order[i]], means[order[i]], letters[i]});
  }
  return result;
}

}  // namespace hategraph::stats
