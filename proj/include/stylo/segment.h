#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace stylo {

struct Sentence {
  // Lowercased word tokens; each holds at least one letter or digit.
  std::vector<std::string> words;
  // Number of ',', ':' and ';' characters inside the sentence span.
  std::size_t tracked_punct_count = 0;
};

struct Paragraph {
  std::vector<Sentence> sentences;
  // Paragraph text with internal line breaks folded to spaces.
  std::string text;
};

struct SegmentedText {
  std::vector<Paragraph> paragraphs;

  std::size_t sentence_count() const;
  std::size_t word_count() const;
  // All word tokens in reading order.
  std::vector<std::string> words() const;
};

// Tokens ending in '.' that do not terminate a sentence ("e.g.", "fig.").
// Entries are stored lowercase with the trailing period.
class AbbreviationList {
 public:
  AbbreviationList() = default;
  using Entries = std::set<std::string, std::less<>>;

  explicit AbbreviationList(Entries entries);

  // The built-in list; data/abbreviations.txt carries the same entries.
  static const AbbreviationList& defaults();
  // One abbreviation per line; '#' starts a comment.
  static AbbreviationList load(const std::filesystem::path& path);
  static AbbreviationList parse(std::string_view content);

  bool contains(std::string_view token) const;
  const Entries& entries() const { return entries_; }

 private:
  Entries entries_;
};

// Splits text into paragraphs (blank lines), sentences (terminal . ! ?
// followed by whitespace and an uppercase letter, digit or opening quote,
// unless the period closes a listed abbreviation) and lowercased word tokens.
// Throws PreconditionError when the text is blank or holds no words.
SegmentedText segment(std::string_view text,
                      const AbbreviationList& abbreviations =
                          AbbreviationList::defaults());

// Word tokens of a text fragment, using the same rules as segment().
std::vector<std::string> tokenize_words(std::string_view text);

// Letters and digits in a token; apostrophes, hyphens and decimal points
// do not count.
std::size_t word_length(std::string_view word);

}  // namespace stylo
