#include "stylo/synth.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>

#include "random_util.h"
#include "stylo/lexicon.h"
#include "stylo/segment.h"

namespace stylo {
namespace {

constexpr std::size_t kMinWordLength = 3;
constexpr std::size_t kMaxWordLength = 14;
constexpr std::size_t kWordsPerLength = 300;
constexpr double kFunctionWordRate = 0.3;

constexpr std::array<const char*, 16> kFunctionWords = {
    "the", "of", "and", "to", "in", "a",  "is", "for",
    "on",  "with", "as", "by", "are", "we", "an", "at",
};

constexpr std::string_view kConsonants = "bcdfghklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + uniform_index(rng, hi - lo + 1);
}

bool chance(Rng& rng, double p) { return uniform_unit(rng) < p; }

// Pseudo-words grouped by length. Words that would read as abbreviations
// or relative markers are excluded.
class Vocabulary {
 public:
  explicit Vocabulary(std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x70c4b));
    const auto& abbreviations = AbbreviationList::defaults();
    const auto& markers = RelativeMarkerLexicon::defaults();
    std::set<std::string> seen(kFunctionWords.begin(), kFunctionWords.end());
    by_length_.resize(kMaxWordLength + 1);
    for (std::size_t len = kMinWordLength; len <= kMaxWordLength; ++len) {
      auto& pool = by_length_[len];
      while (pool.size() < kWordsPerLength) {
        std::string w;
        bool vowel = chance(rng, 0.3);
        while (w.size() < len) {
          const std::string_view letters = vowel ? kVowels : kConsonants;
          w += letters[uniform_index(rng, letters.size())];
          vowel = !vowel;
        }
        if (abbreviations.contains(w + ".") || markers.contains(w)) continue;
        if (seen.insert(w).second) pool.push_back(std::move(w));
      }
    }
  }

  // Zipf-like pick: larger `concentration` favours low ranks.
  const std::string& pick(Rng& rng, std::size_t len, double concentration) const {
    const auto& pool = by_length_[len];
    const double u = std::pow(uniform_unit(rng), concentration);
    return pool[std::min(pool.size() - 1,
                         static_cast<std::size_t>(u * static_cast<double>(pool.size())))];
  }

 private:
  std::vector<std::vector<std::string>> by_length_;
};

struct Style {
  double content_length;    // mean content-word length
  double sentence_words;    // mean words per sentence
  double commas;            // mean commas per sentence
  double relative_rate;     // relative clauses per sentence
  double title_reuse;       // chance a content word comes from the title
  double concentration;     // vocabulary narrowness
  double citation_rate;     // citations per sentence
};

Style draw_style(Rng& rng, Source source) {
  Style s{};
  if (source == Source::kGpt) {
    s.content_length = uniform(rng, 7.1, 8.7);
    s.sentence_words = uniform(rng, 19.0, 31.0);
    s.commas = uniform(rng, 0.8, 2.0);
    s.relative_rate = uniform(rng, 0.15, 0.45);
    s.title_reuse = uniform(rng, 0.01, 0.07);
    s.concentration = uniform(rng, 1.4, 2.4);
    s.citation_rate = 0.0;
  } else {
    s.content_length = uniform(rng, 5.9, 7.5);
    s.sentence_words = uniform(rng, 16.0, 28.0);
    s.commas = uniform(rng, 0.5, 1.7);
    s.relative_rate = uniform(rng, 0.1, 0.4);
    s.title_reuse = uniform(rng, 0.0, 0.05);
    s.concentration = uniform(rng, 1.1, 2.0);
    s.citation_rate = 0.15;
  }
  return s;
}

std::string capitalized(std::string w) {
  w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

class Writer {
 public:
  Writer(const Vocabulary& vocab, Rng& rng, const Style& style,
         const std::vector<std::string>& title_words)
      : vocab_(vocab), rng_(rng), style_(style), title_words_(title_words) {}

  std::string sentence() {
    const double jitter = uniform(rng_, -6.0, 6.0);
    const auto words = static_cast<std::size_t>(
        std::max(6.0, std::round(style_.sentence_words + jitter)));
    std::vector<std::string> out;
    for (std::size_t i = 0; i < words; ++i) {
      const bool last = i + 1 == words;
      if (!last && i > 0 && chance(rng_, kFunctionWordRate)) {
        out.emplace_back(kFunctionWords[uniform_index(rng_, kFunctionWords.size())]);
      } else {
        out.push_back(content_word());
      }
    }
    out[0] = capitalized(out[0]);

    const auto& markers = RelativeMarkerLexicon::defaults().markers();
    if (words > 8 && chance(rng_, style_.relative_rate)) {
      const std::size_t at = uniform_int(rng_, 3, words - 4);
      auto it = markers.begin();
      std::advance(it, static_cast<long>(uniform_index(rng_, markers.size())));
      out[at - 1] += ",";
      out[at] = *it;
    }
    const std::size_t commas = static_cast<std::size_t>(
        std::floor(style_.commas + uniform_unit(rng_)));
    for (std::size_t c = 0; c < commas && words > 4; ++c) {
      std::string& w = out[uniform_int(rng_, 1, words - 3)];
      if (w.back() != ',') w += ",";
    }

    std::string text;
    for (const auto& w : out) {
      if (!text.empty()) text += ' ';
      text += w;
    }
    if (text.back() == ',') text.pop_back();
    if (chance(rng_, style_.citation_rate)) text += citation();
    text += '.';
    return text;
  }

  std::string paragraph(std::size_t sentences) {
    std::string text;
    for (std::size_t i = 0; i < sentences; ++i) {
      if (i) text += ' ';
      text += sentence();
    }
    return text;
  }

 private:
  std::string content_word() {
    if (!title_words_.empty() && chance(rng_, style_.title_reuse)) {
      return title_words_[uniform_index(rng_, title_words_.size())];
    }
    const double len = style_.content_length + 2.2 * standard_normal(rng_);
    const auto clamped = static_cast<std::size_t>(std::clamp(
        std::round(len), static_cast<double>(kMinWordLength),
        static_cast<double>(kMaxWordLength)));
    return vocab_.pick(rng_, clamped, style_.concentration);
  }

  std::string citation() {
    if (chance(rng_, 0.5)) {
      return " [" + std::to_string(uniform_int(rng_, 1, 40)) + "]";
    }
    const std::string name = capitalized(vocab_.pick(rng_, uniform_int(rng_, 5, 8), 1.0));
    return " (" + name + " et al., " + std::to_string(uniform_int(rng_, 1990, 2022)) + ")";
  }

  const Vocabulary& vocab_;
  Rng& rng_;
  const Style& style_;
  const std::vector<std::string>& title_words_;
};

std::string join_paragraphs(const std::vector<std::string>& paragraphs) {
  std::string text;
  for (const auto& p : paragraphs) {
    if (!text.empty()) text += "\n\n";
    text += p;
  }
  return text;
}

std::string body(Writer& w, Rng& rng, Source source, Section section) {
  std::vector<std::string> paragraphs;
  if (source == Source::kGpt) {
    const std::size_t count = section == Section::kAbstract
                                  ? uniform_int(rng, 2, 3)
                                  : uniform_int(rng, 4, 7);
    for (std::size_t i = 0; i < count; ++i) {
      paragraphs.push_back(w.paragraph(uniform_int(rng, 2, 3)));
    }
  } else if (section == Section::kAbstract) {
    paragraphs.push_back(w.paragraph(uniform_int(rng, 5, 9)));
  } else {
    const std::size_t count = uniform_int(rng, 6, 7);
    for (std::size_t i = 0; i < count; ++i) {
      paragraphs.push_back(w.paragraph(uniform_int(rng, 4, 8)));
    }
  }
  return join_paragraphs(paragraphs);
}

std::string two_digits(std::size_t i) {
  return (i < 10 ? "0" : "") + std::to_string(i);
}

}  // namespace

std::vector<Document> synthesize(const SynthConfig& config) {
  const Vocabulary vocab(config.seed);
  std::vector<Document> docs;
  docs.reserve(config.titles * 4);
  constexpr std::array<Branch, 7> branches = {
      Branch::kPhysics,   Branch::kBiology,   Branch::kIndustrialEng,
      Branch::kComputerEng, Branch::kSociology, Branch::kPhilosophy,
      Branch::kEconomics,
  };
  for (std::size_t t = 0; t < config.titles; ++t) {
    Rng rng(derive_seed(config.seed, 1000 + t));
    std::vector<std::string> title_words;
    const std::size_t title_len = uniform_int(rng, 4, 7);
    std::string title;
    for (std::size_t i = 0; i < title_len; ++i) {
      title_words.push_back(vocab.pick(rng, uniform_int(rng, 6, 11), 1.0));
      if (i) title += ' ';
      title += capitalized(title_words.back());
    }
    const Branch branch = branches[t % branches.size()];
    for (const Source source : {Source::kHuman, Source::kGpt}) {
      for (const Section section : {Section::kAbstract, Section::kIntroduction}) {
        const Style style = draw_style(rng, source);
        Writer writer(vocab, rng, style, title_words);
        Document doc;
        doc.id = std::string(to_string(source)) + "-" +
                 (section == Section::kAbstract ? "abs" : "intro") + "-" +
                 two_digits(t + 1);
        doc.title = title;
        doc.branch = branch;
        doc.section = section;
        doc.source = source;
        doc.text = body(writer, rng, source, section);
        docs.push_back(std::move(doc));
      }
    }
  }
  return docs;
}

}  // namespace stylo
