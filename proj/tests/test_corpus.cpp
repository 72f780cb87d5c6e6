#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <set>

#include "hategraph/corpus.hpp"

using namespace hategraph;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("hategraph_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path file(const std::string& name, const std::string& content) const {
    fs::path p = path / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
  }
};

}  // namespace

TEST_CASE("load_hsol maps class codes and skips empty text") {
  TempDir dir;
  auto p = dir.file("hsol.csv",
                    ",count,class,tweet\n"
                    "0,3,0,\"a hateful, quoted tweet\"\n"
                    "1,3,1,an offensive tweet\n"
                    "2,3,2,a clean tweet\n"
                    "3,3,2,\n");
  corpus::LoadResult lr = corpus::load_hsol(p);
  REQUIRE(lr.ok());
  REQUIRE(lr.corpus.documents.size() == 3);
  CHECK(lr.corpus.documents[0].label == "HateSpeech");
  CHECK(lr.corpus.documents[0].text == "a hateful, quoted tweet");
  CHECK(lr.corpus.documents[1].label == "Offensive");
  CHECK(lr.corpus.documents[2].label == "Clean");
  CHECK(lr.skipped_empty == 1);
  CHECK(lr.corpus.label_set ==
        std::vector<std::string>{"HateSpeech", "Offensive", "Clean"});
}

TEST_CASE("load_hsol header-only file gives empty corpus without error") {
  TempDir dir;
  auto p = dir.file("empty.csv", ",count,class,tweet\n");
  corpus::LoadResult lr = corpus::load_hsol(p);
  CHECK(lr.ok());
  CHECK(lr.corpus.documents.empty());
}

TEST_CASE("load_hsol reports unmapped label with row number") {
  TempDir dir;
  auto p = dir.file("bad.csv",
                    ",count,class,tweet\n"
                    "0,3,2,fine\n"
                    "1,3,9,unknown label here\n");
  corpus::LoadResult lr = corpus::load_hsol(p);
  REQUIRE(lr.errors.size() == 1);
  CHECK(lr.errors[0].row == 2);
  CHECK(lr.errors[0].message.find("9") != std::string::npos);
  CHECK(lr.corpus.documents.size() == 1);
}

TEST_CASE("load_hsol missing file throws") {
  CHECK_THROWS(corpus::load_hsol("/nonexistent/file.csv"));
}

TEST_CASE("load_rs normalizes labels case-insensitively") {
  TempDir dir;
  auto p = dir.file("rs.tsv",
                    "id\tlabel\ttext\n"
                    "1\tsexism\tsome sexist text\n"
                    "2\tNONE\tordinary text\n"
                    "3\tRacism\tsome racist text\n"
                    "4\tspam\tbad label\n");
  corpus::LoadResult lr = corpus::load_rs(p);
  REQUIRE(lr.corpus.documents.size() == 3);
  CHECK(lr.corpus.documents[0].label == "Sexist");
  CHECK(lr.corpus.documents[1].label == "None");
  CHECK(lr.corpus.documents[2].label == "Racist");
  REQUIRE(lr.errors.size() == 1);
  CHECK(lr.errors[0].row == 4);
  CHECK(lr.errors[0].message.find("spam") != std::string::npos);
}

TEST_CASE("loading preserves file row order") {
  TempDir dir;
  auto p = dir.file("rs.tsv",
                    "id\tlabel\ttext\n"
                    "z\tnone\tfirst\n"
                    "a\tnone\tsecond\n"
                    "m\tnone\tthird\n");
  corpus::LoadResult lr = corpus::load_rs(p);
  REQUIRE(lr.corpus.documents.size() == 3);
  CHECK(lr.corpus.documents[0].text == "first");
  CHECK(lr.corpus.documents[1].text == "second");
  CHECK(lr.corpus.documents[2].text == "third");
}

namespace {
corpus::LabeledCorpus make_rs(std::initializer_list<std::pair<const char*, const char*>> docs) {
  corpus::LabeledCorpus c;
  c.provenance = "RS";
  c.label_set = {"Racist", "Sexist", "None"};
  int i = 0;
  for (const auto& [label, text] : docs)
    c.documents.push_back({std::to_string(i++), text, label});
  return c;
}
corpus::LabeledCorpus make_hsol(std::initializer_list<std::pair<const char*, const char*>> docs) {
  corpus::LabeledCorpus c;
  c.provenance = "HSOL";
  c.label_set = {"HateSpeech", "Offensive", "Clean"};
  int i = 0;
  for (const auto& [label, text] : docs)
    c.documents.push_back({std::to_string(i++), text, label});
  return c;
}
}  // namespace

TEST_CASE("combine_binary maps labels and drops Offensive") {
  corpus::LabeledCorpus rs = make_rs({{"Racist", "ra"}, {"Sexist", "sa"}, {"None", "na"}});
  corpus::LabeledCorpus hsol =
      make_hsol({{"HateSpeech", "hb"}, {"Offensive", "ob"}, {"Clean", "cb"}});
  corpus::LabeledCorpus combined = corpus::combine_binary(rs, hsol);

  CHECK(combined.label_set == std::vector<std::string>{"HateSpeech", "Clean"});
  REQUIRE(combined.documents.size() == 5);  // offensive dropped
  CHECK(combined.documents[0].label == "HateSpeech");  // Racist
  CHECK(combined.documents[1].label == "HateSpeech");  // Sexist
  CHECK(combined.documents[2].label == "Clean");       // None
  CHECK(combined.documents[3].label == "HateSpeech");  // HSOL HateSpeech
  CHECK(combined.documents[4].label == "Clean");
  for (const auto& d : combined.documents)
    CHECK((d.id.starts_with("rs:") || d.id.starts_with("hsol:")));
}

TEST_CASE("combine_binary prefixes colliding ids") {
  corpus::LabeledCorpus rs = make_rs({{"Racist", "x"}});
  corpus::LabeledCorpus hsol = make_hsol({{"Clean", "y"}});
  rs.documents[0].id = "42";
  hsol.documents[0].id = "42";
  corpus::LabeledCorpus combined = corpus::combine_binary(rs, hsol);
  CHECK(combined.documents[0].id == "rs:42");
  CHECK(combined.documents[1].id == "hsol:42");
}

TEST_CASE("combine_binary with no qualifying instances throws") {
  corpus::LabeledCorpus rs = make_rs({});
  corpus::LabeledCorpus hsol = make_hsol({{"Offensive", "o"}});
  CHECK_THROWS(corpus::combine_binary(rs, hsol));
}

namespace {
corpus::LabeledCorpus binary_corpus(int a_count, int b_count) {
  corpus::LabeledCorpus c;
  c.provenance = "combined";
  c.label_set = {"HateSpeech", "Clean"};
  for (int i = 0; i < a_count; ++i)
    c.documents.push_back({"a" + std::to_string(i), "text", "HateSpeech"});
  for (int i = 0; i < b_count; ++i)
    c.documents.push_back({"b" + std::to_string(i), "text", "Clean"});
  return c;
}
}  // namespace

TEST_CASE("stratified_folds keeps exact class balance when divisible") {
  corpus::LabeledCorpus c = binary_corpus(5, 5);
  corpus::FoldPlan plan = corpus::stratified_folds(c, 5, 1);
  REQUIRE(plan.folds.size() == 5);
  for (const auto& fold : plan.folds) {
    REQUIRE(fold.size() == 2);
    int hate = 0;
    for (size_t idx : fold)
      if (c.documents[idx].label == "HateSpeech") ++hate;
    CHECK(hate == 1);
  }
}

TEST_CASE("stratified_folds is deterministic in seed") {
  corpus::LabeledCorpus c = binary_corpus(13, 9);
  corpus::FoldPlan p1 = corpus::stratified_folds(c, 4, 77);
  corpus::FoldPlan p2 = corpus::stratified_folds(c, 4, 77);
  corpus::FoldPlan p3 = corpus::stratified_folds(c, 4, 78);
  CHECK(p1.folds == p2.folds);
  CHECK(p1.folds != p3.folds);
}

TEST_CASE("stratified_folds splits 4 instances into 2/1/1 over 3 folds") {
  corpus::LabeledCorpus c = binary_corpus(4, 6);
  corpus::FoldPlan plan = corpus::stratified_folds(c, 3, 5);
  std::multiset<size_t> hate_sizes;
  for (const auto& fold : plan.folds) {
    size_t hate = 0;
    for (size_t idx : fold)
      if (c.documents[idx].label == "HateSpeech") ++hate;
    hate_sizes.insert(hate);
  }
  CHECK(hate_sizes == std::multiset<size_t>{2, 1, 1});
}

TEST_CASE("stratified_folds partitions the index set") {
  corpus::LabeledCorpus c = binary_corpus(17, 23);
  corpus::FoldPlan plan = corpus::stratified_folds(c, 7, 3);
  std::set<size_t> seen;
  size_t total = 0;
  for (const auto& fold : plan.folds) {
    total += fold.size();
    for (size_t idx : fold) CHECK(seen.insert(idx).second);  // disjoint
  }
  CHECK(total == c.documents.size());
  CHECK(seen.size() == c.documents.size());
}

TEST_CASE("stratified_folds rejects k < 2 and scarce labels") {
  corpus::LabeledCorpus c = binary_corpus(3, 10);
  CHECK_THROWS_AS(corpus::stratified_folds(c, 1, 0), std::invalid_argument);
  CHECK_THROWS_WITH_AS(corpus::stratified_folds(c, 4, 0),
                       doctest::Contains("HateSpeech"), std::runtime_error);
}

TEST_CASE("train_indices is the sorted complement of the fold") {
  corpus::LabeledCorpus c = binary_corpus(6, 6);
  corpus::FoldPlan plan = corpus::stratified_folds(c, 3, 2);
  for (int f = 0; f < 3; ++f) {
    std::vector<size_t> train = plan.train_indices(f);
    std::set<size_t> test(plan.folds[static_cast<size_t>(f)].begin(),
                          plan.folds[static_cast<size_t>(f)].end());
    CHECK(train.size() + test.size() == c.documents.size());
    CHECK(std::is_sorted(train.begin(), train.end()));
    for (size_t idx : train) CHECK(test.count(idx) == 0);
  }
}
