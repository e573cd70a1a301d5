#include "stylo/lexicon.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "embedded_data.h"
#include "stylo/error.h"
#include "stylo/segment.h"
#include "text_util.h"

namespace stylo {
namespace {

bool is_lowercase_entry(std::string_view s) {
  return !s.empty() && std::none_of(s.begin(), s.end(), [](char c) {
    return c >= 'A' && c <= 'Z';
  });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open word list '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Suffixes whose removal maps an inflected form back to a stoplist entry.
constexpr std::array<std::string_view, 10> kInflections = {
    "s", "es", "d", "ed", "ing", "ly", "er", "ers", "ion", "ions"};

bool drops_final_e(std::string_view suffix) {
  return suffix == "ed" || suffix == "er" || suffix == "ers" ||
         suffix == "ing" || suffix == "ion" || suffix == "ions";
}

}  // namespace

std::vector<std::string> parse_word_list(std::string_view content) {
  std::vector<std::string> entries;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string_view entry = trim(line);
    if (!entry.empty()) entries.emplace_back(entry);
  }
  return entries;
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  return parse_word_list(read_file(path));
}

PrefixLexicon::PrefixLexicon(std::vector<std::string> prefixes,
                             std::size_t min_stem_length, Stoplist stoplist)
    : prefixes_(std::move(prefixes)),
      min_stem_length_(min_stem_length),
      stoplist_(std::move(stoplist)) {
  if (prefixes_.empty()) throw PreconditionError("prefix lexicon is empty");
  if (min_stem_length_ == 0) {
    throw PreconditionError("min_stem_length must be positive");
  }
  for (const auto& p : prefixes_) {
    if (!is_lowercase_entry(p)) {
      throw PreconditionError("prefix '" + p + "' must be non-empty lowercase");
    }
  }
  std::sort(prefixes_.begin(), prefixes_.end(),
            [](const std::string& a, const std::string& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a < b;
            });
  prefixes_.erase(std::unique(prefixes_.begin(), prefixes_.end()),
                  prefixes_.end());
}

const PrefixLexicon& PrefixLexicon::defaults() {
  static const PrefixLexicon lexicon = [] {
    const auto stop = parse_word_list(data::kPrefixStoplist);
    return PrefixLexicon(parse_word_list(data::kPrefixes), 3,
                         Stoplist(stop.begin(), stop.end()));
  }();
  return lexicon;
}

PrefixLexicon PrefixLexicon::load(const std::filesystem::path& prefixes,
                                  const std::filesystem::path& stoplist,
                                  std::size_t min_stem_length) {
  const auto stop = load_word_list(stoplist);
  return PrefixLexicon(load_word_list(prefixes), min_stem_length,
                       Stoplist(stop.begin(), stop.end()));
}

bool PrefixLexicon::stoplisted(std::string_view word) const {
  if (stoplist_.contains(word)) return true;
  for (const std::string_view suffix : kInflections) {
    if (word.size() <= suffix.size() || !word.ends_with(suffix)) continue;
    const std::string_view base = word.substr(0, word.size() - suffix.size());
    if (stoplist_.contains(base)) return true;
    if (drops_final_e(suffix) && stoplist_.contains(std::string(base) + "e")) {
      return true;
    }
  }
  return false;
}

std::optional<std::string_view> PrefixLexicon::match(
    std::string_view word) const {
  if (stoplisted(word)) return std::nullopt;
  for (const std::string& prefix : prefixes_) {
    if (!word.starts_with(prefix)) continue;
    if (word_length(word.substr(prefix.size())) >= min_stem_length_) {
      return std::string_view(prefix);
    }
  }
  return std::nullopt;
}

RelativeMarkerLexicon::RelativeMarkerLexicon(Markers markers)
    : markers_(std::move(markers)) {
  if (markers_.empty()) throw PreconditionError("marker lexicon is empty");
  for (const auto& m : markers_) {
    if (!is_lowercase_entry(m)) {
      throw PreconditionError("marker '" + m + "' must be non-empty lowercase");
    }
  }
}

const RelativeMarkerLexicon& RelativeMarkerLexicon::defaults() {
  static const RelativeMarkerLexicon lexicon = [] {
    const auto words = parse_word_list(data::kRelativeMarkers);
    return RelativeMarkerLexicon(Markers(words.begin(), words.end()));
  }();
  return lexicon;
}

RelativeMarkerLexicon RelativeMarkerLexicon::load(
    const std::filesystem::path& path) {
  const auto words = load_word_list(path);
  return RelativeMarkerLexicon(Markers(words.begin(), words.end()));
}

}  // namespace stylo
