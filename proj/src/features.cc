#include "stylo/features.h"

#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "stylo/error.h"

namespace stylo {
namespace {

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "paragraph_size",      "sentence_length",       "word_size",
    "pct_long_words",      "punct_per_sentence",    "entropy_nats",
    "prefix_ratio",        "relative_clause_ratio", "mtld",
    "title_similarity",    "paragraph_similarity",
};

void require_words(const SegmentedText& seg) {
  if (seg.word_count() == 0) throw PreconditionError("text has no words");
}

template <typename Predicate>
double word_fraction(const SegmentedText& seg, Predicate&& pred) {
  require_words(seg);
  std::size_t hits = 0;
  std::size_t total = 0;
  for (const auto& p : seg.paragraphs) {
    for (const auto& s : p.sentences) {
      for (const auto& w : s.words) {
        if (pred(w)) ++hits;
        ++total;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

std::string_view feature_name(Feature f) { return kFeatureNames[index_of(f)]; }

std::optional<Feature> parse_feature(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kFeatureNames[i] == name) return kAllFeatures[i];
  }
  return std::nullopt;
}

double FeatureVector::at(Feature f) const {
  const auto& v = values[index_of(f)];
  if (!v) {
    throw PreconditionError("feature '" + std::string(feature_name(f)) +
                            "' is absent");
  }
  return *v;
}

double paragraph_size(const SegmentedText& seg) {
  if (seg.paragraphs.empty()) throw PreconditionError("no paragraphs");
  return static_cast<double>(seg.sentence_count()) /
         static_cast<double>(seg.paragraphs.size());
}

double sentence_length(const SegmentedText& seg) {
  const std::size_t sentences = seg.sentence_count();
  if (sentences == 0) throw PreconditionError("no sentences");
  return static_cast<double>(seg.word_count()) /
         static_cast<double>(sentences);
}

double word_size(const SegmentedText& seg) {
  require_words(seg);
  std::size_t chars = 0;
  for (const auto& p : seg.paragraphs) {
    for (const auto& s : p.sentences) {
      for (const auto& w : s.words) chars += word_length(w);
    }
  }
  return static_cast<double>(chars) / static_cast<double>(seg.word_count());
}

double pct_long_words(const SegmentedText& seg) {
  return word_fraction(seg, [](const std::string& w) {
    return word_length(w) >= kLongWordMinLength;
  });
}

double punct_per_sentence(const SegmentedText& seg) {
  const std::size_t sentences = seg.sentence_count();
  if (sentences == 0) throw PreconditionError("no sentences");
  std::size_t marks = 0;
  for (const auto& p : seg.paragraphs) {
    for (const auto& s : p.sentences) marks += s.tracked_punct_count;
  }
  return static_cast<double>(marks) / static_cast<double>(sentences);
}

double entropy(std::span<const std::string> tokens) {
  if (tokens.empty()) throw PreconditionError("entropy of an empty text");
  std::unordered_map<std::string_view, std::size_t> counts;
  for (const auto& t : tokens) ++counts[t];
  const double n = static_cast<double>(tokens.size());
  double h = 0.0;
  for (const auto& [token, count] : counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log(p);
  }
  return h < 0.0 ? 0.0 : h;
}

double entropy(const SegmentedText& seg) {
  const auto tokens = seg.words();
  return entropy(tokens);
}

double prefix_ratio(const SegmentedText& seg, const PrefixLexicon& lexicon) {
  return word_fraction(seg, [&](const std::string& w) {
    return lexicon.match(w).has_value();
  });
}

double relative_clause_ratio(const SegmentedText& seg,
                             const RelativeMarkerLexicon& lexicon) {
  return word_fraction(
      seg, [&](const std::string& w) { return lexicon.contains(w); });
}

template <typename It>
static double mtld_walk(It begin, It end, std::size_t n, double threshold) {
  std::unordered_set<std::string_view> types;
  std::size_t window = 0;
  double factors = 0.0;
  double ttr = 1.0;
  for (It it = begin; it != end; ++it) {
    ++window;
    types.insert(*it);
    ttr = static_cast<double>(types.size()) / static_cast<double>(window);
    if (ttr <= threshold) {
      factors += 1.0;
      types.clear();
      window = 0;
      ttr = 1.0;
    }
  }
  if (window > 0) factors += (1.0 - ttr) / (1.0 - threshold);
  if (factors == 0.0) return static_cast<double>(n);
  return static_cast<double>(n) / factors;
}

double mtld_pass(std::span<const std::string> tokens, double threshold) {
  if (tokens.empty()) throw PreconditionError("mtld of an empty text");
  return mtld_walk(tokens.begin(), tokens.end(), tokens.size(), threshold);
}

double mtld(std::span<const std::string> tokens, double threshold) {
  if (tokens.empty()) throw PreconditionError("mtld of an empty text");
  const double forward =
      mtld_walk(tokens.begin(), tokens.end(), tokens.size(), threshold);
  const double backward =
      mtld_walk(tokens.rbegin(), tokens.rend(), tokens.size(), threshold);
  return (forward + backward) / 2.0;
}

double mtld(const SegmentedText& seg) {
  const auto tokens = seg.words();
  return mtld(tokens);
}

const Lexicons& Lexicons::defaults() {
  static const Lexicons lexicons;
  return lexicons;
}

FeatureVector extract_all(const Document& doc, const SegmentedText& seg,
                          const EmbeddingProvider& embedder,
                          const Lexicons& lexicons) {
  FeatureVector fv;
  fv.set(Feature::kParagraphSize, paragraph_size(seg));
  fv.set(Feature::kSentenceLength, sentence_length(seg));
  fv.set(Feature::kWordSize, word_size(seg));
  fv.set(Feature::kPctLongWords, pct_long_words(seg));
  fv.set(Feature::kPunctPerSentence, punct_per_sentence(seg));
  const auto tokens = seg.words();
  fv.set(Feature::kEntropyNats, entropy(tokens));
  fv.set(Feature::kPrefixRatio, prefix_ratio(seg, lexicons.prefixes));
  fv.set(Feature::kRelativeClauseRatio,
         relative_clause_ratio(seg, lexicons.markers));
  fv.set(Feature::kMtld, mtld(tokens));

  std::vector<std::string> texts;
  texts.reserve(seg.paragraphs.size() + 1);
  texts.push_back(doc.title);
  for (const auto& p : seg.paragraphs) texts.push_back(p.text);

  std::vector<EmbeddingVector> vectors;
  try {
    vectors = embedder.embed(texts);
  } catch (const TransportError& e) {
    throw TransportError("document '" + doc.id + "': " + e.what());
  } catch (const ProtocolError& e) {
    throw ProtocolError("document '" + doc.id + "': " + e.what());
  } catch (const EmbeddingError& e) {
    throw EmbeddingError("document '" + doc.id + "': " + e.what());
  } catch (const PreconditionError& e) {
    throw EmbeddingError("document '" + doc.id + "': " + e.what());
  }
  if (vectors.size() != texts.size()) {
    throw EmbeddingError("document '" + doc.id + "': provider returned " +
                         std::to_string(vectors.size()) + " vectors for " +
                         std::to_string(texts.size()) + " texts");
  }
  const std::span<const EmbeddingVector> paragraphs(vectors.data() + 1,
                                                    vectors.size() - 1);
  fv.set(Feature::kTitleSimilarity, title_similarity(paragraphs, vectors[0]));
  fv.set(Feature::kParagraphSimilarity, paragraph_similarity(paragraphs));
  return fv;
}

FeatureVector extract_all(const Document& doc,
                          const EmbeddingProvider& embedder,
                          const Lexicons& lexicons) {
  const SegmentedText seg = segment(doc.text, lexicons.abbreviations);
  validate(doc);
  return extract_all(doc, seg, embedder, lexicons);
}

}  // namespace stylo
