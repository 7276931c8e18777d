#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <set>

#include "asag/corpus.hpp"
#include "asag/csv.hpp"
#include "asag/error.hpp"
#include "asag/rng.hpp"
#include "support/synthetic.hpp"

using namespace asag;
using namespace asag::corpus;

namespace {

std::filesystem::path write_tmp(const std::string& name, const std::string& body) {
  static const auto dir = asag::testing::scratch_dir("corpus");
  auto p = dir / name;
  std::ofstream(p) << body;
  return p;
}

Dataset docs(const std::vector<std::vector<std::string>>& token_lists) {
  Dataset ds;
  for (std::size_t i = 0; i < token_lists.size(); ++i)
    ds.items.push_back({std::to_string(i), "", token_lists[i], static_cast<int>(i % 2)});
  return ds;
}

}  // namespace

TEST(LoadDataset, ParsesRowAndKeepsRawText) {
  auto p = write_tmp("a.csv", "id,response,label\n7,\"akan mendapat suasana baru\",0\n8,\"Yg, \"\"kutip\"\"\",1\n");
  const auto ds = load_dataset(p, Split::train);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.items[0].id, "7");
  EXPECT_EQ(ds.items[0].raw_text, "akan mendapat suasana baru");
  EXPECT_EQ(ds.items[0].label, 0);
  EXPECT_TRUE(ds.items[0].tokens.empty());
  EXPECT_EQ(ds.items[1].raw_text, "Yg, \"kutip\"");
  EXPECT_EQ(ds.question_id, "a");
  EXPECT_TRUE(ds.warnings.empty());
}

TEST(LoadDataset, HeaderOnlyGivesEmptyDatasetWithWarning) {
  auto p = write_tmp("empty.csv", "id,response,label\n");
  const auto ds = load_dataset(p, Split::dev);
  EXPECT_EQ(ds.size(), 0u);
  EXPECT_EQ(ds.warnings.size(), 1u);
}

TEST(LoadDataset, LabelOutsideDomainNamesTheRow) {
  auto p = write_tmp("bad_label.csv", "id,response,label\n1,ok,1\n2,\"jawaban\",2\n");
  try {
    load_dataset(p, Split::train);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("'2'"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(LoadDataset, WrongColumnCountIsParseErrorWithLine) {
  auto p = write_tmp("bad_cols.csv", "id,response,label\n1,ok,1\n2,too,many,0\n");
  try {
    load_dataset(p, Split::train);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadDataset, QuotedNewlineKeepsLineNumbersAccurate) {
  auto p = write_tmp("multiline.csv", "id,response,label\n1,\"two\nlines\",1\n2,x,y,0\n");
  try {
    load_dataset(p, Split::train);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(LoadDataset, DuplicateIdRejected) {
  auto p = write_tmp("dup.csv", "id,response,label\n1,a,1\n1,b,0\n");
  EXPECT_THROW(load_dataset(p, Split::train), ValidationError);
}

TEST(LoadDataset, SingleClassIsFlagged) {
  auto p = write_tmp("one.csv", "id,response,label\n1,a,1\n2,b,1\n");
  const auto ds = load_dataset(p, Split::train);
  EXPECT_TRUE(ds.single_class());
  EXPECT_EQ(ds.warnings.size(), 1u);
}

TEST(LoadUnlabeled, AcceptsMissingLabelColumn) {
  auto p = write_tmp("unl.csv", "id,response\n1,a\n");
  const auto ds = load_unlabeled(p);
  EXPECT_EQ(ds.size(), 1u);
  EXPECT_FALSE(ds.labeled);
  auto q = write_tmp("unl2.csv", "id,response,label\n1,a,banana\n");
  EXPECT_NO_THROW(load_unlabeled(q));
}

TEST(Csv, UnterminatedQuoteThrows) { EXPECT_THROW(csv::parse("a,\"b\n"), ParseError); }

TEST(Preprocess, DefaultLexiconNormalisesYg) {
  EXPECT_EQ(preprocess("Yg penting", default_lexicon(), {}), (std::vector<std::string>{"yang", "penting"}));
}

TEST(Preprocess, EmptyInput) { EXPECT_TRUE(preprocess("", default_lexicon(), {}).empty()); }

TEST(Preprocess, PunctuationStrippedAndCaseFolded) {
  EXPECT_EQ(preprocess("Banjir, banjir!", {}, {}), (std::vector<std::string>{"banjir", "banjir"}));
  EXPECT_EQ(preprocess("\xE2\x80\x9CKarena\xE2\x80\x9D \xC2\xBFsampah\xE2\x80\xA6", {}, {}),
            (std::vector<std::string>{"karena", "sampah"}));
  EXPECT_EQ(preprocess("\xC3\x89T\xC3\x89", {}, {}), (std::vector<std::string>{"\xC3\xA9t\xC3\xA9"}));
}

TEST(Preprocess, PunctuationStrippingCanBeDisabled) {
  PreprocessOptions keep{false};
  EXPECT_EQ(preprocess("Banjir, banjir!", {}, {}, keep), (std::vector<std::string>{"banjir,", "banjir!"}));
}

TEST(Preprocess, StoplistRemovesTokensAfterLexicon) {
  Stoplist stop;
  stop.removed_tokens = {"yang"};
  EXPECT_EQ(preprocess("yg karena", default_lexicon(), stop), (std::vector<std::string>{"karena"}));
}

TEST(Preprocess, IdempotentOnPunctuationFreeInput) {
  Rng rng(5);
  const std::vector<std::string> alphabet{"a", "B", "c", "Dd", "e", " ", " ", "\t", "\xC3\x80"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const auto n = rng.below(30);
    for (std::uint64_t i = 0; i < n; ++i) text += alphabet[rng.below(alphabet.size())];
    const auto once = preprocess(text, {}, {});
    std::string joined;
    for (const auto& t : once) joined += t + " ";
    EXPECT_EQ(preprocess(joined, {}, {}), once) << text;
  }
}

TEST(LoadLexicon, ParsesTabSeparatedPairs) {
  auto p = write_tmp("lex.tsv", "# comment\nyg\tyang\nGak\ttidak\n\n");
  const auto lex = load_lexicon(p);
  EXPECT_EQ(lex.size(), 2u);
  EXPECT_EQ(lex.at("gak"), "tidak");
  auto bad = write_tmp("lex_bad.tsv", "yg yang\n");
  EXPECT_THROW(load_lexicon(bad), ParseError);
}

TEST(BuildStoplist, NoneIsEmptyAndNeverChangesTokens) {
  auto ds = docs({{"a", "b"}, {"a"}});
  const auto stop = build_stoplist(ds, {StopMode::none, 0.0});
  EXPECT_TRUE(stop.removed_tokens.empty());
  EXPECT_EQ(preprocess("a b c", {}, stop), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(BuildStoplist, DocFractionRemovesUbiquitousToken) {
  std::vector<std::vector<std::string>> lists;
  for (int i = 0; i < 10; ++i) lists.push_back({"karena", "w" + std::to_string(i)});
  lists[0].push_back("jarang");
  lists[1].push_back("jarang");
  const auto stop = build_stoplist(docs(lists), {StopMode::doc_fraction, 0.9});
  EXPECT_EQ(stop.removed_tokens, (std::set<std::string, std::less<>>{"karena"}));
}

TEST(BuildStoplist, DocFractionCountsDocumentsNotOccurrences) {
  // "x" appears 10 times but only in 1 of 2 docs: df = 0.5.
  auto ds = docs({{"x", "x", "x", "x", "x", "x", "x", "x", "x", "x"}, {"y"}});
  EXPECT_TRUE(build_stoplist(ds, {StopMode::doc_fraction, 0.5}).removed_tokens.empty());
  EXPECT_EQ(build_stoplist(ds, {StopMode::doc_fraction, 0.49}).removed_tokens.size(), 2u);
}

TEST(BuildStoplist, TopKBreaksTiesLexicographically) {
  auto ds = docs({{"b", "a", "b", "a", "c"}, {"a", "b", "b", "a", "a", "b"}});
  // counts a:5, b:5, c:1
  const auto stop = build_stoplist(ds, {StopMode::top_k, 1});
  EXPECT_EQ(stop.removed_tokens, (std::set<std::string, std::less<>>{"a"}));
}

TEST(BuildStoplist, RemovedTokensAreTrainingVocabulary) {
  auto ds = docs({{"a", "b"}, {"b", "c"}, {"b"}});
  for (double k : {0.0, 1.0, 2.0, 10.0}) {
    const auto stop = build_stoplist(ds, {StopMode::top_k, k});
    for (const auto& t : stop.removed_tokens) EXPECT_TRUE(t == "a" || t == "b" || t == "c");
  }
}

TEST(BuildStoplist, InvalidThresholdIsConfigError) {
  auto ds = docs({{"a"}});
  EXPECT_THROW(build_stoplist(ds, {StopMode::doc_fraction, 1.5}), ConfigError);
  EXPECT_THROW(build_stoplist(ds, {StopMode::doc_fraction, -0.1}), ConfigError);
  EXPECT_THROW(build_stoplist(ds, {StopMode::top_k, 1.5}), ConfigError);
}

TEST(SplitFolds, TenItemsFiveFoldsArePairs) {
  Labels y{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  const auto folds = split_folds(y, 5, 3);
  std::set<std::size_t> all;
  for (const auto& f : folds) {
    EXPECT_EQ(f.size(), 2u);
    all.insert(f.begin(), f.end());
  }
  EXPECT_EQ(all.size(), 10u);
}

TEST(SplitFolds, QuestionOf268RowsGivesExpectedFoldSizes) {
  Labels y(268, 0);
  std::fill(y.begin(), y.begin() + 191, 1);
  const auto folds = split_folds(y, 5, 42);
  std::vector<std::size_t> sizes;
  for (const auto& f : folds) sizes.push_back(f.size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{54, 54, 54, 53, 53}));
}

TEST(SplitFolds, DeterministicInSeed) {
  Labels y(50);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = i % 3 == 0;
  EXPECT_EQ(split_folds(y, 5, 9), split_folds(y, 5, 9));
  EXPECT_NE(split_folds(y, 5, 9), split_folds(y, 5, 10));
}

TEST(SplitFolds, PartitionAndStratificationProperty) {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(6));
    const std::size_t n = static_cast<std::size_t>(k) + rng.below(60);
    Labels y(n);
    const double p = rng.uniform();
    for (auto& v : y) v = rng.uniform() < p;
    const auto folds = split_folds(y, k, rng.next_u64());
    ASSERT_EQ(folds.size(), static_cast<std::size_t>(k));
    std::vector<int> seen(n, 0);
    std::size_t min_size = n, max_size = 0;
    const auto ones = static_cast<double>(std::accumulate(y.begin(), y.end(), 0));
    for (const auto& f : folds) {
      min_size = std::min(min_size, f.size());
      max_size = std::max(max_size, f.size());
      double fold_ones = 0;
      for (auto i : f) {
        ++seen[i];
        fold_ones += y[i];
      }
      // Within one item of the global class share for this fold.
      EXPECT_LE(std::abs(fold_ones - ones / k), 1.0);
    }
    EXPECT_LE(max_size - min_size, 1u);
    for (int c : seen) EXPECT_EQ(c, 1);
  }
}

TEST(SplitFolds, TooFewItemsOrFolds) {
  EXPECT_THROW(split_folds(Labels{0, 1, 0}, 5, 0), ConfigError);
  EXPECT_THROW(split_folds(Labels{0, 1, 0}, 1, 0), ConfigError);
}
