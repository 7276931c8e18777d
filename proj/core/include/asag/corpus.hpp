#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "asag/types.hpp"

namespace asag::corpus {

enum class Split { train, dev, test };

std::string_view to_string(Split split);
Split split_from_string(std::string_view name);

struct LabeledResponse {
  std::string id;
  std::string raw_text;
  std::vector<std::string> tokens;  // empty until tokenized
  int label = 0;                    // 0 = incorrect, 1 = correct
};

struct Dataset {
  std::string question_id;
  std::vector<LabeledResponse> items;
  Split split = Split::train;
  bool labeled = true;
  std::vector<std::string> warnings;

  std::size_t size() const { return items.size(); }
  Labels labels() const;
  /// True when fewer than two distinct labels are present.
  bool single_class() const;
  /// Copy holding only `indices`, in the given order.
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

/// Nonstandard token -> standard token.
using Lexicon = std::map<std::string, std::string, std::less<>>;

/// The built-in lexicon: {"yg" -> "yang"}.
Lexicon default_lexicon();

/// Reads `nonstandard<TAB>standard` lines. Blank lines and lines starting
/// with '#' are skipped. Keys and values are case folded.
Lexicon load_lexicon(const std::filesystem::path& path);

enum class StopMode { none, doc_fraction, top_k };

std::string_view to_string(StopMode mode);
StopMode stop_mode_from_string(std::string_view name);

struct StopPolicy {
  StopMode mode = StopMode::doc_fraction;
  /// doc_fraction: document-frequency fraction above which a token is
  /// removed, in [0, 1]. top_k: number of most frequent tokens removed.
  double threshold = 0.9;
};

struct Stoplist {
  std::set<std::string, std::less<>> removed_tokens;
  StopPolicy policy{StopMode::none, 0.0};

  bool contains(std::string_view token) const { return removed_tokens.contains(token); }
};

struct PreprocessOptions {
  bool strip_punctuation = true;
};

/// Loads a CSV with header `id,response,label`. Column order is taken from
/// the header. Throws ParseError (row arity, missing columns) or
/// ValidationError (label outside {0,1}, duplicate id).
Dataset load_dataset(const std::filesystem::path& path, Split split);

/// Like load_dataset but the label column is optional and never read.
Dataset load_unlabeled(const std::filesystem::path& path);

/// Case folds, strips Unicode punctuation, splits on whitespace, applies the
/// lexicon per token and drops stoplisted tokens.
std::vector<std::string> preprocess(std::string_view text, const Lexicon& lexicon,
                                    const Stoplist& stoplist,
                                    const PreprocessOptions& options = {});

/// Returns a copy of `ds` with every item's tokens filled by preprocess().
Dataset tokenize(const Dataset& ds, const Lexicon& lexicon, const Stoplist& stoplist,
                 const PreprocessOptions& options = {});

/// Builds the frequency stoplist from tokenized training data.
Stoplist build_stoplist(const Dataset& train, const StopPolicy& policy);

/// Stratified k-fold split. Items of each class are shuffled and dealt
/// round-robin, so fold sizes and per-fold class counts differ by at most
/// one. Each returned index set is sorted.
std::vector<std::vector<std::size_t>> split_folds(const Labels& labels, int k,
                                                  std::uint64_t seed);
std::vector<std::vector<std::size_t>> split_folds(const Dataset& ds, int k, std::uint64_t seed);

}  // namespace asag::corpus
