#include "stylo/segment.h"

#include <fstream>
#include <sstream>

#include "embedded_data.h"
#include "stylo/corpus.h"
#include "stylo/error.h"
#include "text_util.h"

namespace stylo {
namespace {

enum class CharClass { kLetter, kDigit, kApostrophe, kHyphen, kPeriod, kOther };

bool is_symbol_code_point(char32_t cp) {
  if (cp >= 0x80 && cp <= 0xBF) return true;  // Latin-1 punctuation/symbols
  if (cp == 0xD7 || cp == 0xF7) return true;
  if (cp >= 0x2000 && cp <= 0x2BFF) return true;  // general punct, arrows, math
  if (cp >= 0x3000 && cp <= 0x303F) return true;
  if (cp >= 0xFE30 && cp <= 0xFE4F) return true;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return true;
  return false;
}

CharClass classify(char32_t cp) {
  if (cp < 0x80) {
    const char c = static_cast<char>(cp);
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      return CharClass::kLetter;
    }
    if (c >= '0' && c <= '9') return CharClass::kDigit;
    if (c == '\'') return CharClass::kApostrophe;
    if (c == '-') return CharClass::kHyphen;
    if (c == '.') return CharClass::kPeriod;
    return CharClass::kOther;
  }
  if (cp == 0x2019 || cp == 0x02BC) return CharClass::kApostrophe;
  if (cp == 0x2010 || cp == 0x2011) return CharClass::kHyphen;
  if (is_symbol_code_point(cp)) return CharClass::kOther;
  return CharClass::kLetter;
}

bool is_alnum_class(CharClass c) {
  return c == CharClass::kLetter || c == CharClass::kDigit;
}

void append_lower(std::string& out, std::string_view text, std::size_t pos,
                  std::size_t len) {
  for (std::size_t k = 0; k < len; ++k) {
    char c = text[pos + k];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    out.push_back(c);
  }
}

// Closing marks that stay attached to the sentence they follow.
std::size_t closer_length(std::string_view s, std::size_t pos) {
  const char c = s[pos];
  if (c == ')' || c == ']' || c == '"' || c == '\'') return 1;
  const auto cp = utf8::decode(s, pos);
  if (cp.value == 0x201D || cp.value == 0x2019 || cp.value == 0xBB) {
    return cp.length;
  }
  return 0;
}

bool opens_sentence(std::string_view s, std::size_t pos) {
  const char c = s[pos];
  if (c >= 'A' && c <= 'Z') return true;
  if (c >= '0' && c <= '9') return true;
  if (c == '"' || c == '\'') return true;
  const auto cp = utf8::decode(s, pos);
  return cp.value == 0x201C || cp.value == 0x2018 || cp.value == 0xAB;
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

// The letters-and-periods run ending at `period` (inclusive), lowercased.
std::string abbreviation_candidate(std::string_view s, std::size_t period) {
  std::size_t b = period;
  while (b > 0) {
    const char c = s[b - 1];
    const bool ascii_letter = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (!ascii_letter && c != '.') break;
    --b;
  }
  std::string token;
  append_lower(token, s, b, period + 1 - b);
  return token;
}

std::vector<std::string_view> split_sentences(
    std::string_view paragraph, const AbbreviationList& abbreviations) {
  std::vector<std::string_view> spans;
  std::size_t start = 0;
  std::size_t i = 0;
  const std::size_t n = paragraph.size();
  while (i < n) {
    if (!is_terminal(paragraph[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && is_terminal(paragraph[j])) ++j;
    std::size_t k = j;
    while (k < n) {
      const std::size_t len = closer_length(paragraph, k);
      if (len == 0) break;
      k += len;
    }
    if (k == n) break;
    if (!is_space(paragraph[k])) {
      i = k;
      continue;
    }
    std::size_t m = k;
    while (m < n && is_space(paragraph[m])) ++m;
    if (m == n) break;
    bool split = opens_sentence(paragraph, m);
    if (split && j - i == 1 && paragraph[i] == '.' &&
        abbreviations.contains(abbreviation_candidate(paragraph, i))) {
      split = false;
    }
    if (split) {
      spans.push_back(paragraph.substr(start, k - start));
      start = m;
    }
    i = m;
  }
  if (start < n) spans.push_back(paragraph.substr(start));
  return spans;
}

Sentence make_sentence(std::string_view span) {
  Sentence sentence;
  sentence.words = tokenize_words(span);
  for (const char c : span) {
    if (c == ',' || c == ':' || c == ';') ++sentence.tracked_punct_count;
  }
  return sentence;
}

std::string fold_lines(std::string_view block) {
  std::string text;
  text.reserve(block.size());
  for (const char c : block) {
    if (c == '\n' || c == '\r') {
      if (!text.empty() && text.back() != ' ') text.push_back(' ');
    } else {
      text.push_back(c);
    }
  }
  return text;
}


}  // namespace

std::size_t SegmentedText::sentence_count() const {
  std::size_t total = 0;
  for (const auto& p : paragraphs) total += p.sentences.size();
  return total;
}

std::size_t SegmentedText::word_count() const {
  std::size_t total = 0;
  for (const auto& p : paragraphs) {
    for (const auto& s : p.sentences) total += s.words.size();
  }
  return total;
}

std::vector<std::string> SegmentedText::words() const {
  std::vector<std::string> all;
  all.reserve(word_count());
  for (const auto& p : paragraphs) {
    for (const auto& s : p.sentences) {
      all.insert(all.end(), s.words.begin(), s.words.end());
    }
  }
  return all;
}

AbbreviationList::AbbreviationList(Entries entries)
    : entries_(std::move(entries)) {}

const AbbreviationList& AbbreviationList::defaults() {
  static const AbbreviationList list = parse(data::kAbbreviations);
  return list;
}

AbbreviationList AbbreviationList::parse(std::string_view content) {
  Entries entries;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::string_view entry = trim(line);
    if (entry.empty()) continue;
    std::string normalized;
    append_lower(normalized, entry, 0, entry.size());
    if (normalized.back() != '.') normalized.push_back('.');
    entries.insert(std::move(normalized));
  }
  return AbbreviationList(std::move(entries));
}

AbbreviationList AbbreviationList::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open abbreviation list '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

bool AbbreviationList::contains(std::string_view token) const {
  return entries_.find(token) != entries_.end();
}

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  bool last_was_digit = false;
  std::size_t i = 0;
  const std::size_t n = text.size();

  auto flush = [&] {
    if (!current.empty()) words.push_back(std::move(current));
    current.clear();
    last_was_digit = false;
  };

  while (i < n) {
    const auto cp = utf8::decode(text, i);
    const CharClass cls = classify(cp.value);
    if (is_alnum_class(cls)) {
      append_lower(current, text, i, cp.length);
      last_was_digit = cls == CharClass::kDigit;
      i += cp.length;
      continue;
    }
    // Joiners are kept only between two word characters.
    if (!current.empty() && i + cp.length < n &&
        (cls == CharClass::kApostrophe || cls == CharClass::kHyphen ||
         cls == CharClass::kPeriod)) {
      const auto next = utf8::decode(text, i + cp.length);
      const CharClass next_cls = classify(next.value);
      const bool joins =
          cls == CharClass::kPeriod
              ? last_was_digit && next_cls == CharClass::kDigit
              : is_alnum_class(next_cls);
      if (joins) {
        if (cls == CharClass::kApostrophe) {
          current.push_back('\'');
        } else if (cls == CharClass::kHyphen) {
          current.push_back('-');
        } else {
          current.push_back('.');
        }
        i += cp.length;
        continue;
      }
    }
    flush();
    i += cp.length;
  }
  flush();
  return words;
}

std::size_t word_length(std::string_view word) {
  std::size_t length = 0;
  std::size_t i = 0;
  while (i < word.size()) {
    const auto cp = utf8::decode(word, i);
    if (is_alnum_class(classify(cp.value))) ++length;
    i += cp.length;
  }
  return length;
}

SegmentedText segment(std::string_view text,
                      const AbbreviationList& abbreviations) {
  if (trim(text).empty()) throw PreconditionError("cannot segment empty text");

  SegmentedText result;
  for (const std::string_view block : paragraph_blocks(text)) {
    Paragraph paragraph;
    paragraph.text = fold_lines(block);
    for (const std::string_view span :
         split_sentences(paragraph.text, abbreviations)) {
      Sentence sentence = make_sentence(span);
      if (!sentence.words.empty()) {
        paragraph.sentences.push_back(std::move(sentence));
      }
    }
    if (!paragraph.sentences.empty()) {
      result.paragraphs.push_back(std::move(paragraph));
    }
  }
  if (result.paragraphs.empty()) {
    throw PreconditionError("text contains no word tokens");
  }
  return result;
}

}  // namespace stylo
