#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace stylo {

// Lowercase word list: one entry per line, '#' comments, blanks skipped.
std::vector<std::string> parse_word_list(std::string_view content);
std::vector<std::string> load_word_list(const std::filesystem::path& path);

class PrefixLexicon {
 public:
  using Stoplist = std::set<std::string, std::less<>>;

  // Prefixes must be non-empty lowercase strings; they are reordered
  // longest-first (ties alphabetical) so "inter" is tried before "in".
  PrefixLexicon(std::vector<std::string> prefixes, std::size_t min_stem_length,
                Stoplist stoplist = {});

  // Shipped lexicon (data/prefixes.txt, data/prefix_stoplist.txt), stem 3.
  static const PrefixLexicon& defaults();
  static PrefixLexicon load(const std::filesystem::path& prefixes,
                            const std::filesystem::path& stoplist,
                            std::size_t min_stem_length = 3);

  // The prefix a token carries, if any. Stoplisted words and their inflected
  // forms never match; otherwise the first prefix (longest-first) leaving a
  // stem of at least min_stem_length letters/digits wins.
  std::optional<std::string_view> match(std::string_view word) const;

  // True when the word or its inflected base is on the stoplist.
  bool stoplisted(std::string_view word) const;

  const std::vector<std::string>& prefixes() const { return prefixes_; }
  std::size_t min_stem_length() const { return min_stem_length_; }
  const Stoplist& stoplist() const { return stoplist_; }

 private:
  std::vector<std::string> prefixes_;
  std::size_t min_stem_length_;
  Stoplist stoplist_;
};

class RelativeMarkerLexicon {
 public:
  using Markers = std::set<std::string, std::less<>>;

  explicit RelativeMarkerLexicon(Markers markers);

  // who, whom, whose, which, that, where, when, why.
  static const RelativeMarkerLexicon& defaults();
  static RelativeMarkerLexicon load(const std::filesystem::path& path);

  bool contains(std::string_view token) const {
    return markers_.find(token) != markers_.end();
  }
  const Markers& markers() const { return markers_; }

 private:
  Markers markers_;
};

}  // namespace stylo
