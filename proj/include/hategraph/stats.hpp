#pragma once

#include <span>
#include <string>
#include <vector>

#include "hategraph/evaluation.hpp"

namespace hategraph::stats {

// ---------------------------------------------------------------------------
// Distribution plumbing (validated against published tables; see tests)

double norm_pdf(double z);
double norm_cdf(double z);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

// Upper tails.
double f_sf(double f, double df1, double df2);
double t_sf(double t, double df);  // one-sided, t >= 0

// Studentized range distribution for k groups and df residual degrees of
// freedom, via nested Gauss-Legendre quadrature of the double-integral form.
double studentized_range_cdf(double q, int k, double df);
double studentized_range_sf(double q, int k, double df);

// Inverse CDF by bracketing root-search; absolute tolerance 1e-3 or better.
// Throws if the bracket or iteration budget is exhausted.
double studentized_range_quantile(double p, int k, double df);

// ---------------------------------------------------------------------------
// Two-factor ANOVA (main effects, no interaction) over per-fold F-scores

enum class Response { MacroF, MicroF };
enum class Factor { Features, Classifiers };

struct AnovaRow {
  std::string name;
  double ss = 0.0;
  int df = 0;
  double ms = 0.0;
  double f = 0.0;  // NaN when df = 0
  double p = 1.0;
};

struct AnovaTable {
  AnovaRow features;
  AnovaRow classifiers;
  AnovaRow residual;  // f, p unused
  double total_ss = 0.0;
  int total_df = 0;
};

// Requires a balanced design: every (feature, classifier) cell must hold the
// same number of replicates (>= 1).
AnovaTable anova_two_factor(std::span<const evaluation::RunRecord> records, Response response);

struct TukeyRow {
  std::string level_a;
  std::string level_b;
  double mean_diff = 0.0;  // mean_a - mean_b
  double q = 0.0;
  double p_adj = 0.0;
  bool significant = false;
};

struct TukeyLevel {
  std::string level;
  double mean = 0.0;
  std::string letters;
};

struct TukeyResult {
  Factor factor = Factor::Features;
  double alpha = 0.05;
  std::vector<TukeyRow> pairs;
  std::vector<TukeyLevel> levels;  // sorted by descending mean
};

TukeyResult tukey_hsd(std::span<const evaluation::RunRecord> records, Factor factor, double alpha,
                      Response response);

// Insert-and-absorb compact letter display: levels sorted by descending mean;
// two levels share a letter iff their pair is not significant.
std::vector<std::string> compact_letter_display(size_t level_count,
                                                const std::vector<std::pair<size_t, size_t>>&
                                                    significant_pairs);

}  // namespace hategraph::stats
