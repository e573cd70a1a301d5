#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylo/corpus.h"
#include "stylo/embed.h"
#include "stylo/lexicon.h"
#include "stylo/segment.h"

namespace stylo {

// Canonical feature order. Matrices, models and attributions index by it.
enum class Feature : std::size_t {
  kParagraphSize,
  kSentenceLength,
  kWordSize,
  kPctLongWords,
  kPunctPerSentence,
  kEntropyNats,
  kPrefixRatio,
  kRelativeClauseRatio,
  kMtld,
  kTitleSimilarity,
  kParagraphSimilarity,
};

inline constexpr std::size_t kFeatureCount = 11;

inline constexpr std::array<Feature, kFeatureCount> kAllFeatures = {
    Feature::kParagraphSize,     Feature::kSentenceLength,
    Feature::kWordSize,          Feature::kPctLongWords,
    Feature::kPunctPerSentence,  Feature::kEntropyNats,
    Feature::kPrefixRatio,       Feature::kRelativeClauseRatio,
    Feature::kMtld,              Feature::kTitleSimilarity,
    Feature::kParagraphSimilarity,
};

constexpr std::size_t index_of(Feature f) { return static_cast<std::size_t>(f); }

std::string_view feature_name(Feature f);
std::optional<Feature> parse_feature(std::string_view name);

// The eleven values for one document. Only paragraph_similarity may be
// absent (documents with fewer than two paragraphs).
struct FeatureVector {
  std::array<std::optional<double>, kFeatureCount> values;

  std::optional<double> get(Feature f) const { return values[index_of(f)]; }
  // Value of a feature that is always present; throws if absent.
  double at(Feature f) const;
  void set(Feature f, std::optional<double> v) { values[index_of(f)] = v; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline constexpr double kMtldThreshold = 0.72;
inline constexpr std::size_t kLongWordMinLength = 6;  // strictly more than 5

double paragraph_size(const SegmentedText& seg);
double sentence_length(const SegmentedText& seg);
double word_size(const SegmentedText& seg);
double pct_long_words(const SegmentedText& seg);
double punct_per_sentence(const SegmentedText& seg);

// Shannon entropy (nats) of the word-frequency distribution.
double entropy(const SegmentedText& seg);
double entropy(std::span<const std::string> tokens);

double prefix_ratio(const SegmentedText& seg, const PrefixLexicon& lexicon);
double relative_clause_ratio(const SegmentedText& seg,
                             const RelativeMarkerLexicon& lexicon);

// Bidirectional MTLD. One pass walks the tokens keeping the running
// type/token ratio of the current factor; reaching <= threshold closes a
// factor. The unfinished tail adds (1 - ttr) / (1 - threshold). A pass
// equals tokens / factors, or the token count when no factor accrued.
// The result is the mean of the forward and reversed passes.
double mtld(const SegmentedText& seg);
double mtld(std::span<const std::string> tokens,
            double threshold = kMtldThreshold);
double mtld_pass(std::span<const std::string> tokens,
                 double threshold = kMtldThreshold);

struct Lexicons {
  AbbreviationList abbreviations = AbbreviationList::defaults();
  PrefixLexicon prefixes = PrefixLexicon::defaults();
  RelativeMarkerLexicon markers = RelativeMarkerLexicon::defaults();

  static const Lexicons& defaults();
};

// Computes all eleven features. The title and every paragraph are embedded
// in one provider call. Provider failures are rethrown as EmbeddingError
// carrying the document id.
FeatureVector extract_all(const Document& doc, const EmbeddingProvider& embedder,
                          const Lexicons& lexicons = Lexicons::defaults());

// Same, on an already segmented text.
FeatureVector extract_all(const Document& doc, const SegmentedText& seg,
                          const EmbeddingProvider& embedder,
                          const Lexicons& lexicons = Lexicons::defaults());

}  // namespace stylo
