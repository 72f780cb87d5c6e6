#include <doctest.h>

#include <cmath>

#include "hategraph/rng.hpp"
#include "hategraph/stats.hpp"

using namespace hategraph;
using namespace hategraph::stats;
using evaluation::RunRecord;

namespace {

RunRecord record(const std::string& feature, const std::string& classifier, int fold,
                 double value) {
  RunRecord r;
  r.feature_config = feature;
  r.classifier = classifier;
  r.fold = fold;
  r.eval.macro_f = value;
  r.eval.micro_f = value;
  return r;
}

// One-factor layout: a single classifier level.
std::vector<RunRecord> one_factor(const std::vector<std::pair<std::string, std::vector<double>>>&
                                      groups) {
  std::vector<RunRecord> records;
  for (const auto& [name, values] : groups) {
    int fold = 0;
    for (double v : values) records.push_back(record(name, "only", fold++, v));
  }
  return records;
}

}  // namespace

TEST_CASE("incomplete beta basics") {
  CHECK(regularized_incomplete_beta(0.3, 1.0, 1.0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(0.0, 2.0, 3.0) == 0.0);
  CHECK(regularized_incomplete_beta(1.0, 2.0, 3.0) == 1.0);
  // symmetry: I_x(a,b) = 1 - I_{1-x}(b,a)
  double x = 0.37, a = 2.5, b = 4.25;
  CHECK(regularized_incomplete_beta(x, a, b) ==
        doctest::Approx(1.0 - regularized_incomplete_beta(1.0 - x, b, a)).epsilon(1e-12));
}

TEST_CASE("F upper tail matches the statistical oracle") {
  // frozen from an external statistical oracle
  CHECK(f_sf(13.5, 1.0, 4.0) == doctest::Approx(0.02131164112875672).epsilon(1e-9));
}

TEST_CASE("ANOVA one-factor degenerate example: F = 13.5, df (1, 4)") {
  auto records = one_factor({{"g1", {1, 2, 3}}, {"g2", {4, 5, 6}}});
  AnovaTable table = anova_two_factor(records, Response::MicroF);
  CHECK(std::abs(table.features.f - 13.5) < 1e-9);
  CHECK(table.features.df == 1);
  CHECK(table.residual.df == 4);
  CHECK(table.features.p == doctest::Approx(0.02131164112875672).epsilon(1e-3));
  // single-level classifier factor contributes nothing
  CHECK(table.classifiers.df == 0);
  CHECK(table.classifiers.ss == doctest::Approx(0.0));
}

TEST_CASE("ANOVA with identical responses: zero SS, p = 1") {
  auto records = one_factor({{"g1", {2, 2, 2}}, {"g2", {2, 2, 2}}});
  AnovaTable table = anova_two_factor(records, Response::MicroF);
  CHECK(table.features.ss == doctest::Approx(0.0));
  CHECK(table.features.p == doctest::Approx(1.0));
}

TEST_CASE("ANOVA is invariant under affine response transforms") {
  auto base = one_factor({{"g1", {1.0, 1.4, 0.9, 1.2}}, {"g2", {2.0, 2.2, 1.9, 2.4}}});
  auto shifted = base;
  for (auto& r : shifted) {
    r.eval.micro_f = 3.0 * r.eval.micro_f + 0.7;
    r.eval.macro_f = r.eval.micro_f;
  }
  AnovaTable t1 = anova_two_factor(base, Response::MicroF);
  AnovaTable t2 = anova_two_factor(shifted, Response::MicroF);
  CHECK(t1.features.f == doctest::Approx(t2.features.f).epsilon(1e-9));
  CHECK(t1.features.p == doctest::Approx(t2.features.p).epsilon(1e-9));
}

TEST_CASE("two-factor ANOVA against frozen oracle values") {
  // 3 features x 2 classifiers x 4 replicates; expected values computed with
  // an external statistical oracle on exactly these numbers.
  struct Row {
    const char* f;
    const char* c;
    double y;
  };
  const Row rows[] = {
      {"f1", "c1", 0.733811}, {"f1", "c1", 0.690681}, {"f1", "c1", 0.700656},
      {"f1", "c1", 0.70815},  {"f1", "c2", 0.734222}, {"f1", "c2", 0.750041},
      {"f1", "c2", 0.749982}, {"f1", "c2", 0.714906}, {"f2", "c1", 0.620353},
      {"f2", "c1", 0.61201},  {"f2", "c1", 0.587491}, {"f2", "c1", 0.596569},
      {"f2", "c2", 0.660106}, {"f2", "c2", 0.644773}, {"f2", "c2", 0.645145},
      {"f2", "c2", 0.620935}, {"f3", "c1", 0.511092}, {"f3", "c1", 0.502478},
      {"f3", "c1", 0.505489}, {"f3", "c1", 0.46947},  {"f3", "c2", 0.583014},
      {"f3", "c2", 0.553087}, {"f3", "c2", 0.542257}, {"f3", "c2", 0.590581},
  };
  std::vector<RunRecord> records;
  int fold = 0;
  for (const Row& r : rows) records.push_back(record(r.f, r.c, fold++ % 4, r.y));

  AnovaTable table = anova_two_factor(records, Response::MicroF);
  CHECK(table.features.ss == doctest::Approx(0.145436376344).epsilon(1e-9));
  CHECK(table.classifiers.ss == doctest::Approx(0.012640814100).epsilon(1e-9));
  CHECK(table.residual.ss == doctest::Approx(0.007827462434).epsilon(1e-7));
  CHECK(table.features.df == 2);
  CHECK(table.classifiers.df == 1);
  CHECK(table.residual.df == 20);
  CHECK(table.features.f == doctest::Approx(185.802713923814).epsilon(1e-9));
  CHECK(table.classifiers.f == doctest::Approx(32.298626038998).epsilon(1e-9));
  CHECK(table.features.p == doctest::Approx(1.20729368652e-13).epsilon(1e-2));
  CHECK(table.classifiers.p == doctest::Approx(1.46056769802e-05).epsilon(1e-3));
}

TEST_CASE("ANOVA rejects unbalanced designs") {
  auto records = one_factor({{"g1", {1, 2, 3}}, {"g2", {4, 5}}});
  CHECK_THROWS(anova_two_factor(records, Response::MicroF));
}

TEST_CASE("studentized range quantile matches published tables") {
  CHECK(studentized_range_quantile(0.95, 3, 10) == doctest::Approx(3.88).epsilon(0.01 / 3.88));
  CHECK(studentized_range_quantile(0.95, 5, 20) == doctest::Approx(4.23186).epsilon(0.01));
  CHECK(studentized_range_quantile(0.95, 2, 10) == doctest::Approx(3.15106).epsilon(0.01));
  CHECK(studentized_range_quantile(0.99, 4, 6) == doctest::Approx(7.03326).epsilon(0.01));
  CHECK(studentized_range_quantile(0.95, 10, 60) == doctest::Approx(4.64632).epsilon(0.01));
}

TEST_CASE("studentized range approaches sqrt(2) z for k = 2 and large df") {
  double q = studentized_range_quantile(0.95, 2, 1e6);
  CHECK(q == doctest::Approx(2.7718).epsilon(0.01 / 2.7718));
}

TEST_CASE("studentized range CDF round-trips through the quantile") {
  for (double p : {0.5, 0.9, 0.95, 0.99}) {
    for (int k : {2, 4, 8}) {
      for (double df : {3.0, 12.0, 60.0}) {
        double q = studentized_range_quantile(p, k, df);
        CHECK(studentized_range_cdf(q, k, df) == doctest::Approx(p).epsilon(1e-3));
      }
    }
  }
}

TEST_CASE("studentized range CDF reference values") {
  CHECK(studentized_range_cdf(2.0, 3, 9) == doctest::Approx(0.625687253909).epsilon(1e-6));
  CHECK(studentized_range_cdf(3.5, 3, 9) == doctest::Approx(0.918154607810).epsilon(1e-6));
  CHECK(studentized_range_cdf(3.0, 4, 12) == doctest::Approx(0.798735923409).epsilon(1e-6));
  CHECK(studentized_range_cdf(2.5, 2, 5) == doctest::Approx(0.862657873566).epsilon(1e-6));
  CHECK(studentized_range_cdf(4.5, 6, 30) == doctest::Approx(0.963822414631).epsilon(1e-6));
}

TEST_CASE("quantile grows with the group count") {
  double prev = 0.0;
  for (int k : {2, 3, 5, 8, 12}) {
    double q = studentized_range_quantile(0.95, k, 20);
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("Tukey with k = 2 agrees with the pooled two-sided t-test") {
  for (double q : {0.5, 1.0, 2.0, 3.5, 5.0}) {
    for (double df : {4.0, 10.0, 40.0}) {
      double tukey_p = studentized_range_sf(q, 2, df);
      double t_p = 2.0 * t_sf(q / std::sqrt(2.0), df);
      CHECK(std::abs(tukey_p - t_p) < 1e-6);
    }
  }
}

TEST_CASE("tukey_hsd on the frozen three-group example") {
  auto records = one_factor({{"g1", {5.1, 4.9, 5.3, 5.0}},
                             {"g2", {5.6, 5.4, 5.8, 5.5}},
                             {"g3", {5.2, 5.3, 5.1, 5.4}}});
  TukeyResult result = tukey_hsd(records, Factor::Features, 0.05, Response::MicroF);
  REQUIRE(result.pairs.size() == 3);

  auto find_pair = [&](const std::string& a, const std::string& b) -> const TukeyRow& {
    for (const auto& row : result.pairs)
      if ((row.level_a == a && row.level_b == b) || (row.level_a == b && row.level_b == a))
        return row;
    throw std::logic_error("pair not found");
  };
  // frozen against an external statistical oracle
  CHECK(find_pair("g1", "g2").q == doctest::Approx(6.324555320337).epsilon(1e-9));
  CHECK(find_pair("g1", "g2").p_adj == doctest::Approx(0.00396733203369).epsilon(1e-3));
  CHECK(find_pair("g1", "g3").q == doctest::Approx(2.213594362118).epsilon(1e-9));
  CHECK(find_pair("g1", "g3").p_adj == doctest::Approx(0.308409420122).epsilon(1e-3));
  CHECK(find_pair("g2", "g3").q == doctest::Approx(4.110960958219).epsilon(1e-9));
  CHECK(find_pair("g2", "g3").p_adj == doctest::Approx(0.0417961822804).epsilon(1e-3));

  CHECK(find_pair("g1", "g2").significant);
  CHECK(find_pair("g2", "g3").significant);
  CHECK_FALSE(find_pair("g1", "g3").significant);

  // levels sorted by descending mean: g2 (5.575), g3 (5.25), g1 (5.075)
  REQUIRE(result.levels.size() == 3);
  CHECK(result.levels[0].level == "g2");
  CHECK(result.levels[0].letters == "a");
  CHECK(result.levels[1].level == "g3");
  CHECK(result.levels[1].letters == "b");
  CHECK(result.levels[2].level == "g1");
  CHECK(result.levels[2].letters == "b");
}

TEST_CASE("tukey_hsd with identical replicate values shares one letter") {
  auto records = one_factor({{"g1", {1.0, 1.0, 1.0}}, {"g2", {1.0, 1.0, 1.0}}});
  TukeyResult result = tukey_hsd(records, Factor::Features, 0.05, Response::MicroF);
  REQUIRE(result.pairs.size() == 1);
  CHECK(result.pairs[0].q == doctest::Approx(0.0));
  CHECK_FALSE(result.pairs[0].significant);
  CHECK(result.levels[0].letters == "a");
  CHECK(result.levels[1].letters == "a");
}

TEST_CASE("tukey_hsd separates a far-removed level") {
  auto records = one_factor({{"low1", {0.10, 0.11, 0.09, 0.10}},
                             {"low2", {0.12, 0.11, 0.13, 0.12}},
                             {"high", {0.90, 0.91, 0.89, 0.90}}});
  TukeyResult result = tukey_hsd(records, Factor::Features, 0.05, Response::MicroF);
  CHECK(result.levels[0].level == "high");
  std::string high_letters = result.levels[0].letters;
  for (size_t i = 1; i < result.levels.size(); ++i) {
    for (char letter : high_letters)
      CHECK(result.levels[i].letters.find(letter) == std::string::npos);
  }
  for (const auto& row : result.pairs) {
    if (row.level_a == "high" || row.level_b == "high") {
      CHECK(row.significant);
      CHECK(row.p_adj < 1e-6);
    }
  }
}

TEST_CASE("tukey_hsd rejects invalid alpha") {
  auto records = one_factor({{"g1", {1, 2}}, {"g2", {3, 4}}});
  CHECK_THROWS(tukey_hsd(records, Factor::Features, 0.0, Response::MicroF));
  CHECK_THROWS(tukey_hsd(records, Factor::Features, 1.0, Response::MicroF));
}

TEST_CASE("compact letter display: pairs share a letter iff not significant") {
  Rng rng(23);
  for (int it = 0; it < 150; ++it) {
    size_t levels = 2 + rng.uniform_below(4);  // <= 5 levels keeps single-char letters
    std::vector<std::pair<size_t, size_t>> significant;
    std::vector<std::vector<bool>> sig(levels, std::vector<bool>(levels, false));
    for (size_t i = 0; i < levels; ++i) {
      for (size_t j = i + 1; j < levels; ++j) {
        if (rng.uniform_double() < 0.4) {
          significant.emplace_back(i, j);
          sig[i][j] = sig[j][i] = true;
        }
      }
    }
    std::vector<std::string> letters = compact_letter_display(levels, significant);
    for (size_t i = 0; i < levels; ++i) {
      for (size_t j = i + 1; j < levels; ++j) {
        bool share = false;
        for (char c : letters[i])
          if (letters[j].find(c) != std::string::npos) share = true;
        CHECK(share == !sig[i][j]);
      }
    }
  }
}

TEST_CASE("tukey letters are internally consistent with significance flags") {
  Rng rng(31);
  for (int it = 0; it < 20; ++it) {
    std::vector<std::pair<std::string, std::vector<double>>> groups;
    size_t level_count = 2 + rng.uniform_below(4);
    for (size_t g = 0; g < level_count; ++g) {
      std::vector<double> values;
      double base = rng.uniform_double();
      for (int rep = 0; rep < 4; ++rep) values.push_back(base + rng.normal() * 0.05);
      groups.emplace_back("lvl" + std::to_string(g), values);
    }
    TukeyResult result = tukey_hsd(one_factor(groups), Factor::Features, 0.05, Response::MicroF);
    auto letters_of = [&](const std::string& level) {
      for (const auto& l : result.levels)
        if (l.level == level) return l.letters;
      return std::string();
    };
    for (const auto& row : result.pairs) {
      std::string la = letters_of(row.level_a), lb = letters_of(row.level_b);
      bool share = false;
      for (char c : la)
        if (lb.find(c) != std::string::npos) share = true;
      CHECK(share == !row.significant);
    }
  }
}
