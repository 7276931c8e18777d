#include "asag/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "asag/csv.hpp"
#include "asag/error.hpp"
#include "asag/io.hpp"
#include "asag/rng.hpp"

namespace asag::corpus {

namespace {

// Decodes one UTF-8 code point starting at text[i]; advances i. Invalid
// sequences decode as the single byte value so they pass through untouched.
char32_t decode_utf8(std::string_view text, std::size_t& i, std::size_t& len) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  auto cont = [&](std::size_t k) {
    return i + k < text.size() && (static_cast<unsigned char>(text[i + k]) & 0xC0) == 0x80;
  };
  auto byte = [&](std::size_t k) { return static_cast<char32_t>(text[i + k] & 0x3F); };
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    len = 2;
    return (static_cast<char32_t>(b0 & 0x1F) << 6) | byte(1);
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    len = 3;
    return (static_cast<char32_t>(b0 & 0x0F) << 12) | (byte(1) << 6) | byte(2);
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    len = 4;
    return (static_cast<char32_t>(b0 & 0x07) << 18) | (byte(1) << 12) | (byte(2) << 6) | byte(3);
  }
  len = 1;
  return 0xFFFD;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// General category P* for ASCII, Latin-1, General Punctuation, CJK symbols
// and the fullwidth forms.
bool is_punctuation(char32_t cp) {
  if (cp < 0x80) {
    switch (cp) {
      case '!': case '"': case '#': case '%': case '&': case '\'': case '(': case ')':
      case '*': case ',': case '-': case '.': case '/': case ':': case ';': case '?':
      case '@': case '[': case '\\': case ']': case '_': case '{': case '}':
        return true;
      default:
        return false;
    }
  }
  switch (cp) {
    case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
      return true;
    default:
      break;
  }
  if (cp >= 0x2010 && cp <= 0x2027) return true;
  if (cp >= 0x2030 && cp <= 0x205E) return true;
  if (cp >= 0x3001 && cp <= 0x3003) return true;
  if (cp >= 0x3008 && cp <= 0x3011) return true;
  if (cp >= 0xFF01 && cp <= 0xFF0F && cp != 0xFF04 && cp != 0xFF0B) return true;
  return false;
}

bool is_space(char32_t cp) {
  return cp == ' ' || (cp >= 0x09 && cp <= 0x0D) || cp == 0xA0 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
         cp == 0x205F || cp == 0x3000;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    std::size_t len = 1;
    const char32_t cp = decode_utf8(s, i, len);
    if (cp == 0xFFFD && len == 1 && static_cast<unsigned char>(s[i]) >= 0x80)
      out.push_back(s[i]);
    else
      encode_utf8(to_lower(cp), out);
    i += len;
  }
  return out;
}

struct ColumnMap {
  std::size_t id = SIZE_MAX;
  std::size_t response = SIZE_MAX;
  std::size_t label = SIZE_MAX;
  std::size_t width = 0;
};

ColumnMap read_header(const csv::Row& header, bool label_required) {
  ColumnMap cols;
  cols.width = header.fields.size();
  for (std::size_t c = 0; c < header.fields.size(); ++c) {
    std::string name = fold_case(header.fields[c]);
    name.erase(std::remove_if(name.begin(), name.end(), [](unsigned char ch) { return std::isspace(ch); }),
               name.end());
    if (name == "id") cols.id = c;
    else if (name == "response") cols.response = c;
    else if (name == "label") cols.label = c;
  }
  if (cols.id == SIZE_MAX || cols.response == SIZE_MAX || (label_required && cols.label == SIZE_MAX))
    throw ParseError(label_required ? "header must contain id,response,label"
                                    : "header must contain id,response",
                     header.line);
  return cols;
}

Dataset load_impl(const std::filesystem::path& path, Split split, bool labeled) {
  const auto rows = csv::parse(io::read_file(path));
  if (rows.empty()) throw ParseError("missing header in " + path.string(), 1);

  Dataset ds;
  ds.question_id = path.stem().string();
  ds.split = split;
  ds.labeled = labeled;
  const ColumnMap cols = read_header(rows.front(), labeled);

  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != cols.width)
      throw ParseError("expected " + std::to_string(cols.width) + " columns, found " +
                           std::to_string(row.fields.size()),
                       row.line);
    LabeledResponse item;
    item.id = row.fields[cols.id];
    item.raw_text = row.fields[cols.response];
    if (labeled) {
      const std::string& lab = row.fields[cols.label];
      if (lab == "0") item.label = 0;
      else if (lab == "1") item.label = 1;
      else
        throw ValidationError("label '" + lab + "' outside {0,1} for id '" + item.id + "' at line " +
                              std::to_string(row.line));
    }
    if (!seen.insert(item.id).second)
      throw ValidationError("duplicate id '" + item.id + "' at line " + std::to_string(row.line));
    ds.items.push_back(std::move(item));
  }
  if (ds.items.empty()) ds.warnings.push_back(path.string() + ": no data rows");
  else if (labeled && ds.single_class())
    ds.warnings.push_back(path.string() + ": only one label present");
  return ds;
}

}  // namespace

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

Split split_from_string(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "dev") return Split::dev;
  if (name == "test") return Split::test;
  throw ConfigError("unknown split '" + std::string(name) + "'");
}

std::string_view to_string(StopMode mode) {
  switch (mode) {
    case StopMode::none: return "none";
    case StopMode::doc_fraction: return "doc_fraction";
    case StopMode::top_k: return "top_k";
  }
  return "none";
}

StopMode stop_mode_from_string(std::string_view name) {
  if (name == "none") return StopMode::none;
  if (name == "doc_fraction") return StopMode::doc_fraction;
  if (name == "top_k") return StopMode::top_k;
  throw ConfigError("unknown stoplist mode '" + std::string(name) + "'");
}

Labels Dataset::labels() const {
  Labels y;
  y.reserve(items.size());
  for (const auto& it : items) y.push_back(it.label);
  return y;
}

bool Dataset::single_class() const {
  bool has0 = false, has1 = false;
  for (const auto& it : items) (it.label ? has1 : has0) = true;
  return !(has0 && has1);
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.question_id = question_id;
  out.split = split;
  out.labeled = labeled;
  out.items.reserve(indices.size());
  for (auto i : indices) out.items.push_back(items.at(i));
  return out;
}

Lexicon default_lexicon() { return Lexicon{{"yg", "yang"}}; }

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon: " + path.string());
  Lexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos)
      throw ParseError("lexicon line must be 'nonstandard<TAB>standard'", lineno);
    lex.emplace(fold_case(line.substr(0, tab)), fold_case(line.substr(tab + 1)));
  }
  return lex;
}

Dataset load_dataset(const std::filesystem::path& path, Split split) {
  return load_impl(path, split, true);
}

Dataset load_unlabeled(const std::filesystem::path& path) {
  return load_impl(path, Split::test, false);
}

std::vector<std::string> preprocess(std::string_view text, const Lexicon& lexicon,
                                    const Stoplist& stoplist, const PreprocessOptions& options) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (auto it = lexicon.find(current); it != lexicon.end()) current = it->second;
    if (!current.empty() && !stoplist.contains(current)) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    std::size_t len = 1;
    const char32_t cp = decode_utf8(text, i, len);
    if (is_space(cp)) {
      flush();
    } else if (!(options.strip_punctuation && is_punctuation(cp))) {
      if (cp == 0xFFFD && len == 1 && static_cast<unsigned char>(text[i]) >= 0x80)
        current.push_back(text[i]);
      else
        encode_utf8(to_lower(cp), current);
    }
    i += len;
  }
  flush();
  return tokens;
}

Dataset tokenize(const Dataset& ds, const Lexicon& lexicon, const Stoplist& stoplist,
                 const PreprocessOptions& options) {
  Dataset out = ds;
  for (auto& item : out.items) item.tokens = preprocess(item.raw_text, lexicon, stoplist, options);
  return out;
}

Stoplist build_stoplist(const Dataset& train, const StopPolicy& policy) {
  Stoplist stop;
  stop.policy = policy;
  switch (policy.mode) {
    case StopMode::none:
      return stop;
    case StopMode::doc_fraction: {
      if (!(policy.threshold >= 0.0 && policy.threshold <= 1.0))
        throw ConfigError("doc_fraction threshold must lie in [0,1]");
      if (train.items.empty()) return stop;
      std::unordered_map<std::string, std::size_t> df;
      for (const auto& item : train.items) {
        std::unordered_set<std::string_view> uniq(item.tokens.begin(), item.tokens.end());
        for (auto tok : uniq) ++df[std::string(tok)];
      }
      const double n = static_cast<double>(train.items.size());
      for (const auto& [tok, count] : df)
        if (static_cast<double>(count) / n > policy.threshold) stop.removed_tokens.insert(tok);
      return stop;
    }
    case StopMode::top_k: {
      if (!(policy.threshold >= 0.0) || policy.threshold != std::floor(policy.threshold))
        throw ConfigError("top_k threshold must be a non-negative integer");
      std::unordered_map<std::string, std::size_t> tf;
      for (const auto& item : train.items)
        for (const auto& tok : item.tokens) ++tf[tok];
      std::vector<std::pair<std::string, std::size_t>> ranked(tf.begin(), tf.end());
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
      });
      const auto k = std::min(ranked.size(), static_cast<std::size_t>(policy.threshold));
      for (std::size_t i = 0; i < k; ++i) stop.removed_tokens.insert(ranked[i].first);
      return stop;
    }
  }
  return stop;
}

std::vector<std::vector<std::size_t>> split_folds(const Labels& labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2");
  if (labels.size() < static_cast<std::size_t>(k))
    throw ConfigError("cannot split " + std::to_string(labels.size()) + " items into " +
                      std::to_string(k) + " folds");
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  std::size_t dealt = 0;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if ((labels[i] != 0) == (cls != 0)) idx.push_back(i);
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
    for (auto i : idx) folds[dealt++ % folds.size()].push_back(i);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::vector<std::vector<std::size_t>> split_folds(const Dataset& ds, int k, std::uint64_t seed) {
  return split_folds(ds.labels(), k, seed);
}

}  // namespace asag::corpus
